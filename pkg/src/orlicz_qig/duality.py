"""
Legendre-Fenchel conjugate of the quantum Young function and the inequalities
tying the primal and dual pictures together.

Cotangent vectors ``v = sigma - rho0`` are paired with perturbations through
the trace form ``Tr(X v)``.  The conjugate

    Phi*(v) = sup_X { Tr(X v) - Phi(X) }

is computed by ascent on the concave objective with an Armijo backtracking
line search.  The default direction is the Newton direction (solved by
conjugate gradients with the exact Hessian from the divided differences of
``exp``); ``method="gradient"`` takes plain steepest-ascent steps instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .linalg import eigh, hermitian, trace_pair
from .quantum_young import luxemburg_norm, phi
from .states import OVERFLOW_EXPONENT, GibbsModel, _check_dims, log_trace_exp

ARMIJO_C = 1e-4
ARMIJO_SHRINK = 0.5
DIVERGENCE_LEVEL = 1e12


@dataclass(frozen=True, eq=False)
class CotangentVector:
    v: np.ndarray
    source_sigma: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "v", hermitian(self.v))
        if self.source_sigma is not None:
            tr = float(np.trace(self.v).real)
            if abs(tr) > 1e-8:
                raise ValueError(f"difference of densities has trace {tr:.3e}")

    @classmethod
    def from_state(cls, m: GibbsModel, sigma) -> "CotangentVector":
        sigma = hermitian(sigma)
        return cls(sigma - m.rho0, sigma)

    def scaled(self, s: float) -> "CotangentVector":
        return CotangentVector(s * self.v)


@dataclass(frozen=True, eq=False)
class ConjugateResult:
    value: float
    argmax_x: np.ndarray
    iterations: int
    converged: bool
    grad_norm: float = math.nan


def _exp_divided_differences(lam: np.ndarray) -> np.ndarray:
    li, lj = lam[:, None], lam[None, :]
    top = np.maximum(li, lj)
    gap = np.abs(li - lj)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(gap > 0, -np.expm1(-gap) / gap, 1.0)
    return np.exp(top) * ratio


class _LocalModel:
    """Value, gradient and Hessian action of Phi at one point."""

    def __init__(self, m: GibbsModel, x: np.ndarray):
        self.dp = eigh(-m.h0 + x)
        self.dm = eigh(-m.h0 - x)
        top = max(self.dp.eigenvalues[-1], self.dm.eigenvalues[-1])
        self.saturated = bool(top > OVERFLOW_EXPONENT)
        if self.saturated:
            return
        ep = np.exp(self.dp.eigenvalues)
        em = np.exp(self.dm.eigenvalues)
        t0 = m.trace_exp
        self.value = 0.5 * ((np.sum(em) - t0) + (np.sum(ep) - t0))
        up, um = self.dp.eigenvectors, self.dm.eigenvectors
        self.grad = 0.5 * ((up * ep) @ up.conj().T - (um * em) @ um.conj().T)
        self.kp = _exp_divided_differences(self.dp.eigenvalues)
        self.km = _exp_divided_differences(self.dm.eigenvalues)

    def hess(self, b: np.ndarray) -> np.ndarray:
        up, um = self.dp.eigenvectors, self.dm.eigenvectors
        hp = up @ (self.kp * (up.conj().T @ b @ up)) @ up.conj().T
        hm = um @ (self.km * (um.conj().T @ b @ um)) @ um.conj().T
        out = 0.5 * (hp + hm)
        return 0.5 * (out + out.conj().T)


def _dot(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.real(np.vdot(a, b)))


def _cg(apply, rhs: np.ndarray, rtol: float, max_iter: int) -> np.ndarray:
    x = np.zeros_like(rhs)
    r = rhs.copy()
    p = r.copy()
    rr = _dot(r, r)
    stop = (rtol**2) * rr
    for _ in range(max_iter):
        if rr <= stop:
            break
        ap = apply(p)
        pap = _dot(p, ap)
        if pap <= 0:
            break
        alpha = rr / pap
        x = x + alpha * p
        r = r - alpha * ap
        rr_new = _dot(r, r)
        p = r + (rr_new / rr) * p
        rr = rr_new
    return x if np.any(x) else rhs


def _objective(m: GibbsModel, x: np.ndarray, v: np.ndarray) -> float:
    val = phi(m, x).value
    return -math.inf if math.isinf(val) else trace_pair(x, v) - val


def conjugate_phi(
    m: GibbsModel,
    v: CotangentVector,
    max_iter: int = 500,
    tol: float = 1e-8,
    step: float = 1.0,
    method: str = "newton",
    x0=None,
) -> ConjugateResult:
    """Maximize ``Tr(X v) - Phi(X)`` over Hermitian ``X``.

    Parameters
    ----------
    m : GibbsModel
        Base point.
    v : CotangentVector
        Dual variable, typically ``sigma - rho0``.
    max_iter : int
        Iteration cap; on reaching it the best iterate is returned with
        ``converged=False``.
    tol : float
        Stop when the Frobenius norm of the gradient ``v - grad Phi(X)``
        is at most ``tol``.
    step : float
        Initial trial step of the line search.
    method : {"newton", "gradient"}
        Search direction.
    x0 : array, optional
        Starting point (default ``0``).
    """
    if method not in ("newton", "gradient"):
        raise ValueError(f"unknown method {method!r}")
    vv = v.v
    _check_dims(m, vv)
    x = np.zeros_like(vv) if x0 is None else hermitian(x0)
    if not np.any(vv):
        return ConjugateResult(0.0, np.zeros_like(vv), 0, True, 0.0)
    if x0 is not None and _objective(m, x, vv) < 0.0:
        x = np.zeros_like(vv)
    n2 = vv.size
    gnorm = math.inf
    for it in range(max_iter + 1):
        loc = _LocalModel(m, x)
        f = trace_pair(x, vv) - loc.value
        g = vv - loc.grad
        gnorm = float(np.linalg.norm(g))
        if gnorm <= tol:
            return ConjugateResult(max(f, 0.0), x, it, True, gnorm)
        if f > DIVERGENCE_LEVEL:
            return ConjugateResult(math.inf, x, it, False, gnorm)
        if it == max_iter:
            break
        if method == "newton":
            d = _cg(loc.hess, g, min(0.5, math.sqrt(gnorm)), 2 * n2)
        else:
            d = g
        slope = _dot(g, d)
        if slope <= 0:
            d, slope = g, gnorm**2
        t = step
        noise = 1e-14 * (1.0 + abs(f) + loc.value)
        for _ in range(60):
            x_new = x + t * d
            if _objective(m, x_new, vv) >= f + ARMIJO_C * t * slope - noise:
                break
            t *= ARMIJO_SHRINK
        else:
            break
        x = hermitian(x_new)
    f = _objective(m, x, vv)
    return ConjugateResult(max(f, 0.0), x, max_iter, False, gnorm)


def conjugate_diag_value(rho_diag, delta) -> float:
    """Exact conjugate for commuting ``rho0 = diag(rho)`` and ``v = diag(delta)``."""
    rho = np.asarray(rho_diag, dtype=float)
    delta = np.asarray(delta, dtype=float)
    x = np.arcsinh(delta / rho)
    return float(np.sum(delta * x - rho * (np.cosh(x) - 1.0)))


def conjugate_diag_oracle(rho_diag, sigma_diag) -> float:
    rho = np.asarray(rho_diag, dtype=float)
    sigma = np.asarray(sigma_diag, dtype=float)
    if np.any(rho <= 0) or np.any(sigma <= 0):
        raise ValueError("diagonals must be strictly positive")
    if abs(rho.sum() - 1.0) > 1e-10 or abs(sigma.sum() - 1.0) > 1e-10:
        raise ValueError("diagonals must sum to 1")
    return conjugate_diag_value(rho, sigma - rho)


def dual_luxemburg_norm(m: GibbsModel, v: CotangentVector, a: float = 1.0,
                        rtol: float = 1e-12) -> float:
    """``inf{r > 0 : Phi*(v / r) < a}``.

    Works in ``s = 1/r``: ``s -> Phi*(s v)`` is convex and increasing with
    derivative ``Tr(X*(s) v)`` at the maximizer ``X*(s)``, so the bracket is
    narrowed by Newton steps that fall back to bisection.
    """
    if a <= 0:
        raise ValueError("threshold a must be positive")
    vv = v.v
    if not np.any(vv):
        return 0.0
    warm: dict[float, np.ndarray] = {}

    def solve(s: float) -> tuple[float, float]:
        x0 = None
        if warm:
            s_near = min(warm, key=lambda k: abs(math.log(k / s)))
            x0 = warm[s_near] * (s / s_near)
        res = conjugate_phi(m, CotangentVector(s * vv), x0=x0)
        if not res.converged:
            raise ConvergenceError(f"conjugate did not converge at scale {s:.6g}")
        warm[s] = res.argmax_x
        return res.value, trace_pair(res.argmax_x, vv)

    s = 1.0 / max(np.max(np.abs(eigh(vv).eigenvalues)), 1e-300)
    g, dg = solve(s)
    lo = hi = None
    if g < a:
        while g < a:
            lo = s
            s *= 2.0
            g, dg = solve(s)
        hi = s
    else:
        while g >= a:
            hi, g_hi, dg_hi = s, g, dg
            s *= 0.5
            g, dg = solve(s)
        lo = s
        s, g, dg = hi, g_hi, dg_hi
    # g(hi) >= a > g(lo); s is one of the endpoints with its values g, dg
    for _ in range(200):
        if hi - lo <= rtol * hi:
            break
        cand = s - (g - a) / dg if dg > 0 else 0.5 * (lo + hi)
        if not lo < cand < hi:
            cand = 0.5 * (lo + hi)
        s = cand
        g, dg = solve(s)
        if g < a:
            lo = s
        else:
            hi = s
        if abs(g - a) <= 1e-15 * a:
            lo = hi = s
            break
    return 1.0 / hi


def youngs_inequality_margin(m: GibbsModel, x, v: CotangentVector) -> float:
    """``Phi(X) + Phi*(v) - Tr(X v)``; nonnegative by Young's inequality."""
    x = hermitian(x)
    return phi(m, x).value + conjugate_phi(m, v).value - trace_pair(x, v.v)


def matched_probe(m: GibbsModel, x) -> CotangentVector:
    """The dual point touching ``Phi`` at ``X``: ``v = grad Phi(X)``."""
    from .quantum_young import phi_gradient

    return CotangentVector(phi_gradient(m, x))


def double_conjugate_gap(m: GibbsModel, x, probe_vs=None) -> float:
    """``Phi(X) - max_v {Tr(X v) - Phi*(v)}`` over the probes (default: the matched probe)."""
    x = hermitian(x)
    probes = [matched_probe(m, x)] if probe_vs is None else list(probe_vs)
    best = -math.inf
    for v in probes:
        best = max(best, trace_pair(x, v.v) - conjugate_phi(m, v).value)
    return phi(m, x).value - best


def holder_orlicz_margin(m: GibbsModel, x, v: CotangentVector) -> float:
    """``2 ||X||_L ||v||_L* - Tr(X v)``; nonnegative by the Hölder-Orlicz inequality."""
    x = hermitian(x)
    nx = luxemburg_norm(m, x, 1.0)
    if nx == 0.0:
        return 0.0 - trace_pair(x, v.v)
    return 2.0 * nx * dual_luxemburg_norm(m, v, 1.0) - trace_pair(x, v.v)


def bogoliubov_peierls_margin(m: GibbsModel, x) -> float:
    """``log Tr exp(-h0 + X) - log Tr exp(-h0) - Tr(rho0 X)``."""
    x = hermitian(x)
    _check_dims(m, x)
    lte, _ = log_trace_exp(-m.h0 + x)
    lte0, _ = log_trace_exp(-m.h0)
    return lte - lte0 - trace_pair(m.rho0, x)


def golden_thompson_margin(a, b) -> float:
    """``Tr(exp(A) exp(B)) - Tr exp(A + B)``; nonnegative for Hermitian ``A``, ``B``.

    Exactly commuting inputs (``AB == BA`` in floating point) return 0, the
    value both sides share in exact arithmetic.
    """
    from .linalg import expm_h

    a = hermitian(a)
    b = hermitian(b)
    if a.shape != b.shape:
        raise ValueError("dimension mismatch")
    if np.array_equal(a @ b, b @ a):
        return 0.0
    lhs = trace_pair(expm_h(a), expm_h(b))
    return lhs - float(np.sum(np.exp(eigh(a + b).eigenvalues)))
