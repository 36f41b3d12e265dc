"""
Scalar Young functions and discrete classical Orlicz spaces.

This module is the commutative reference: the quantum Young function reduces
to ``sum_i rho_i * phi1(x_i)`` when ``h0`` and ``X`` commute, and the tests
use that reduction as an oracle.

Young functions are represented numerically.  ``YoungFunction1D.fn`` must
accept ``numpy`` arrays; Legendre duals are evaluated by golden-section
search and memoized per instance (share a dual across workers only after it
has been fully built).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
DUAL_X_CAP = 1e15


@dataclass(frozen=True, eq=False)
class YoungFunction1D:
    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    finite_radius: float = math.inf

    def __call__(self, x):
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DiscreteMeasureSpace:
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        if w.size == 0 or np.any(~(w > 0)):
            raise ValueError("weights must be a non-empty array of positive numbers")
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return self.weights.size


def _phi1(x):
    return np.cosh(x) - 1.0


def _phi2(x):
    a = np.abs(x)
    return np.expm1(a) - a


def _phi3(x):
    a = np.abs(x)
    return (1.0 + a) * np.log1p(a) - a


def builtin(name: str, p: float | None = None) -> YoungFunction1D:
    """Named Young function: ``phi1``, ``phi2``, ``phi3`` or ``power`` (needs ``p >= 1``)."""
    if name == "phi1":
        return YoungFunction1D("phi1", _phi1)
    if name == "phi2":
        return YoungFunction1D("phi2", _phi2)
    if name == "phi3":
        return YoungFunction1D("phi3", _phi3)
    if name == "power":
        if p is None or not p >= 1.0:
            raise ValueError(f"power Young function needs p >= 1, got {p}")
        return YoungFunction1D(f"power({p:g})", lambda x: np.abs(x) ** p)
    raise ValueError(f"unknown Young function {name!r}")


def young_axioms_hold(phi: YoungFunction1D, n: int = 64, span: float = 8.0) -> bool:
    """Grid probe of evenness, ``phi(0) = 0``, midpoint convexity and growth."""
    top = min(span, 0.999 * phi.finite_radius)
    xs = np.linspace(-top, top, n)
    v = phi(xs)
    if phi(0.0) != 0.0:
        return False
    if not np.allclose(v, v[::-1], rtol=1e-12, atol=1e-14):
        return False
    mid = phi(0.5 * (xs[:-1] + xs[1:]))
    if np.any(mid > 0.5 * (v[:-1] + v[1:]) + 1e-12 * (1.0 + np.abs(v[1:]))):
        return False
    if np.any(v < 0):
        return False
    far = top if math.isfinite(phi.finite_radius) else 1e3
    return bool(phi(far) > 10.0 * phi(1.0) or not math.isfinite(phi(far)))


def _golden_max(g: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray,
                rtol: float = 1e-13, max_iter: int = 200) -> np.ndarray:
    # Vectorized golden-section search for the maximum of concave g on [lo, hi].
    a, b = lo.copy(), hi.copy()
    for _ in range(max_iter):
        if np.all(b - a <= rtol * (1.0 + np.abs(b))):
            break
        c = b - GOLDEN * (b - a)
        d = a + GOLDEN * (b - a)
        left = g(c) >= g(d)
        b = np.where(left, d, b)
        a = np.where(left, a, c)
    return np.maximum(np.maximum(g(0.5 * (a + b)), g(a)), g(b))


def legendre_dual_values(phi: YoungFunction1D, ys) -> np.ndarray:
    """``sup_{x >= 0} (x|y| - phi(x))`` for each ``y``; ``inf`` where unbounded."""
    y = np.abs(np.atleast_1d(np.asarray(ys, dtype=float)))
    out = np.zeros_like(y)
    todo = np.flatnonzero(y > 0)
    if todo.size == 0:
        return out
    yy = y[todo]

    def g(x):
        with np.errstate(over="ignore", invalid="ignore"):
            v = x * yy - phi(x)
        return np.where(np.isnan(v), -np.inf, v)

    # Bracket the maximizer by doubling: g concave with g(0) = 0.
    x = np.ones_like(yy)
    gx = g(x)
    lo = np.zeros_like(yy)
    active = gx > 0
    unbounded = np.zeros(yy.shape, dtype=bool)
    while np.any(active):
        x2 = np.where(active, 2.0 * x, x)
        g2 = g(x2)
        grow = active & (g2 > gx)
        lo = np.where(grow, x, lo)
        x = np.where(grow, x2, x)
        gx = np.where(grow, g2, gx)
        capped = grow & (x > DUAL_X_CAP)
        unbounded |= capped
        active = grow & ~capped
    hi = np.where(gx > 0, 2.0 * x, x)
    lo = np.where(gx > 0, lo, 0.0)
    vals = _golden_max(g, lo, hi)
    vals = np.where(unbounded, np.inf, np.maximum(vals, 0.0))
    out[todo] = vals
    return out


def legendre_dual_1d(phi: YoungFunction1D, y: float) -> float:
    return float(legendre_dual_values(phi, [y])[0])


@dataclass(frozen=True, eq=False)
class _MemoDual:
    phi: YoungFunction1D
    cache: dict = field(default_factory=dict)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        flat = np.abs(x.ravel())
        missing = np.array([v for v in np.unique(flat) if v not in self.cache])
        if missing.size:
            for k, v in zip(missing, legendre_dual_values(self.phi, missing)):
                self.cache[float(k)] = float(v)
        return np.array([self.cache[float(v)] for v in flat]).reshape(x.shape)


def legendre_dual(phi: YoungFunction1D) -> YoungFunction1D:
    """The numeric Legendre-Fenchel dual as a memoized :class:`YoungFunction1D`."""
    return YoungFunction1D(f"{phi.name}*", _MemoDual(phi))


@dataclass(frozen=True)
class Delta2Verdict:
    holds: bool
    kappa: float
    slope: float
    grid_limited: bool = True


def _tail_slope(xs: np.ndarray, ys: np.ndarray) -> float:
    # least-squares slope of log ys against log xs over the last decade
    sel = xs >= xs[-1] / 10.0
    if np.count_nonzero(sel) < 2:
        sel = slice(None)
    return float(np.polyfit(np.log(xs[sel]), np.log(ys[sel]), 1)[0])


def is_delta2(phi: YoungFunction1D, x0: float = 1.0, grid=None) -> Delta2Verdict:
    """Probe ``phi(2x) <= kappa phi(x)`` on a grid beyond ``x0``.

    The ratio is declared bounded when the log-log slope of
    ``phi(2x)/phi(x)`` over the last decade of the grid is below 0.1.
    """
    xs = np.asarray(grid if grid is not None else x0 * np.logspace(0.0, 2.0, 41), dtype=float)
    if np.any(xs < x0) or np.any(xs >= phi.finite_radius):
        raise ValueError("grid must lie in [x0, finite_radius)")
    v = phi(xs)
    if np.any(v == 0):
        raise ValueError(f"phi vanishes at grid point {xs[np.argmax(v == 0)]}")
    with np.errstate(over="ignore", invalid="ignore"):
        ratio = phi(2.0 * xs) / v
    if not np.all(np.isfinite(ratio)):
        return Delta2Verdict(False, math.inf, math.inf)
    slope = _tail_slope(xs, ratio)
    return Delta2Verdict(bool(slope < 0.1), float(np.max(ratio)), slope)


def _inverse(phi: YoungFunction1D, value: float) -> float:
    # smallest s >= 0 with phi(s) >= value, by bracketing then bisection
    if value <= 0:
        return 0.0
    hi = 1.0
    while not phi(hi) >= value:
        hi *= 2.0
        if hi > 1e300:
            return math.inf
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if phi(mid) >= value:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * hi:
            break
    return hi


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: bool
    c: float
    C: float
    slope: float
    grid_limited: bool = True


def equivalent(phi: YoungFunction1D, psi: YoungFunction1D, x0: float = 1.0,
               grid=None) -> EquivalenceVerdict:
    """Search constants with ``phi(c x) <= psi(x) <= phi(C x)`` on the grid.

    Per grid point the tight constant is ``t(x) = phi^{-1}(psi(x)) / x``; the
    witness is ``(min t, max t)``.  Equivalence is rejected when ``t``
    escapes to 0 or infinity, judged by its log-log trend over the last decade.
    """
    xs = np.asarray(grid if grid is not None else x0 * np.logspace(0.0, 2.0, 41), dtype=float)
    if np.any(xs < x0):
        raise ValueError("grid must lie beyond x0")
    t = []
    for x in xs:
        target = psi(x)
        if not math.isfinite(target):
            return EquivalenceVerdict(False, math.nan, math.nan, math.inf)
        t.append(_inverse(phi, target) / x)
    t = np.array(t)
    if not np.all(np.isfinite(t)) or np.any(t <= 0):
        return EquivalenceVerdict(False, math.nan, math.nan, math.inf)
    slope = _tail_slope(xs, t)
    return EquivalenceVerdict(bool(abs(slope) < 0.1), float(t.min()), float(t.max()), slope)


def equivalence_witness_holds(phi, psi, c: float, C: float, grid) -> bool:
    xs = np.asarray(grid, dtype=float)
    p = psi(xs)
    slack = 1e-12 * (1.0 + np.abs(p))
    return bool(np.all(phi(c * xs) <= p + slack) and np.all(p <= phi(C * xs) + slack))


def gauge_infimum(modular: Callable[[float], float], start: float, a: float,
                  rtol: float = 1e-13, max_iter: int = 300) -> float:
    # inf{r > 0 : modular(r) < a} for modular nonincreasing in r
    hi = start
    while not modular(hi) < a:
        hi *= 2.0
    lo = hi
    while modular(lo) < a:
        lo *= 0.5
        if lo < 1e-300:
            return 0.0
    for _ in range(max_iter):
        if hi - lo <= rtol * hi:
            break
        mid = 0.5 * (lo + hi)
        if modular(mid) < a:
            hi = mid
        else:
            lo = mid
    return hi


def luxemburg_norm_discrete(u, mu: DiscreteMeasureSpace, phi: YoungFunction1D,
                            a: float = 1.0) -> float:
    """``inf{r > 0 : sum_i mu_i phi(u_i / r) < a}``."""
    if a <= 0:
        raise ValueError("threshold a must be positive")
    u = np.asarray(u, dtype=float).ravel()
    if u.size != mu.size:
        raise ValueError(f"u has {u.size} entries, measure has {mu.size} atoms")
    top = float(np.max(np.abs(u)))
    if top == 0.0:
        return 0.0

    def modular(r):
        v = phi(u / r)
        return float(np.sum(mu.weights * v)) if np.all(np.isfinite(v)) else math.inf

    return gauge_infimum(modular, top, a)


def orlicz_holder_check(u, v, mu: DiscreteMeasureSpace, phi: YoungFunction1D,
                        dual: YoungFunction1D | None = None) -> float:
    """Margin ``2 ||u||_phi ||v||_phi* - sum mu |u v|``; nonnegative by Hölder-Orlicz."""
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    if u.size != v.size:
        raise ValueError("u and v differ in length")
    dual = dual if dual is not None else legendre_dual(phi)
    lhs = float(np.sum(mu.weights * np.abs(u * v)))
    nu = luxemburg_norm_discrete(u, mu, phi)
    nv = luxemburg_norm_discrete(v, mu, dual) if nu > 0 else 0.0
    return 2.0 * nu * nv - lhs


def _check_f0(f0) -> np.ndarray:
    f0 = np.asarray(f0, dtype=float).ravel()
    if np.any(f0 <= 0) or abs(f0.sum() - 1.0) > 1e-10:
        raise ValueError("f0 must be strictly positive and sum to 1")
    return f0


def cramer_psi(f0, u, lam: float) -> float:
    """Free energy ``log sum_i f0_i exp(-lam u_i)``."""
    f0 = _check_f0(f0)
    e = -lam * np.asarray(u, dtype=float).ravel()
    top = float(np.max(e))
    return top + math.log(float(np.sum(f0 * np.exp(e - top))))


def exp_family(f0, u, lam: float) -> np.ndarray:
    """Density ``f0_i exp(-lam u_i - psi(lam u))``; ``lam = -1`` gives ``f0 e^{u - psi}``."""
    f0 = _check_f0(f0)
    e = -lam * np.asarray(u, dtype=float).ravel()
    top = float(np.max(e))
    w = f0 * np.exp(e - top)
    return w / w.sum()
