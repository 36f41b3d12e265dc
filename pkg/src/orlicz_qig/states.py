"""Gibbs base points, perturbed states and the boundedness/nearness predicates."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import MagnitudeError, NotPSDError
from .linalg import (
    PSD_TOL,
    SpectralDecomposition,
    eigh,
    hermitian,
    matrix_fn,
    operator_norm,
    psd_order,
)

OVERFLOW_EXPONENT = 700.0
BETA_GRID = tuple(round(0.1 * k, 1) for k in range(1, 11))
NORMALIZATION_TOL = 1e-10
INPUT_TRACE_TOL = 1e-8


def _beta_profile(h0_eigenvalues: np.ndarray) -> tuple[tuple[float, float], ...]:
    rho = np.exp(-h0_eigenvalues)
    return tuple((b, float(np.sum(rho**b))) for b in BETA_GRID)


@dataclass(frozen=True, eq=False)
class GibbsModel:
    """Base point ``rho0 = exp(-h0)`` with ``h0`` shifted so that ``Tr exp(-h0) = 1``.

    Build instances with :func:`gibbs_model`, :func:`make_oscillator` or
    :func:`make_random_model`; the constructor only validates.
    """

    h0: np.ndarray
    family: str = "custom"
    family_params: dict = field(default_factory=dict)
    beta_profile: tuple = ()

    def __post_init__(self):
        h0 = hermitian(self.h0)
        h0.setflags(write=False)
        object.__setattr__(self, "h0", h0)
        w = self.spectrum.eigenvalues
        z = float(np.sum(np.exp(-w)))
        if abs(z - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"Tr exp(-h0) = {z!r}, expected 1 within {NORMALIZATION_TOL}")
        if np.min(np.exp(-w)) <= 0.0:
            raise ValueError("rho0 is not faithful")
        if not self.beta_profile:
            object.__setattr__(self, "beta_profile", _beta_profile(w))

    @property
    def dim(self) -> int:
        return self.h0.shape[0]

    @cached_property
    def spectrum(self) -> SpectralDecomposition:
        return eigh(self.h0)

    @cached_property
    def rho0(self) -> np.ndarray:
        return matrix_fn(self.spectrum, lambda e: np.exp(-e))

    @cached_property
    def rho0_eigenvalues(self) -> np.ndarray:
        """Eigenvalues of ``rho0`` in the eigenbasis order of ``h0`` (descending)."""
        return np.exp(-self.spectrum.eigenvalues)

    @cached_property
    def trace_exp(self) -> float:
        """Numerically evaluated ``Tr exp(-h0)``; equals 1 to rounding.

        Evaluated along the same path as the traces inside ``phi`` so that
        ``phi(m, 0)`` cancels exactly.
        """
        return float(np.sum(np.exp(eigh(-self.h0).eigenvalues)))

    def rho0_power(self, p: float) -> np.ndarray:
        return matrix_fn(self.spectrum, lambda e: np.exp(-p * e))

    def h0_shifted_power(self, c: float, p: float) -> np.ndarray:
        """``(h0 + c)^p``; requires ``h0 + c`` positive definite."""
        w = self.spectrum.eigenvalues + c
        if w[0] <= 0.0:
            raise ValueError(f"h0 + {c} is not positive definite (min eigenvalue {w[0]:.3e})")
        return matrix_fn(SpectralDecomposition(w, self.spectrum.eigenvectors), lambda t: t**p)


@dataclass(frozen=True, eq=False)
class PerturbedState:
    x: np.ndarray
    psi_x: float
    rho_x: np.ndarray


def gibbs_model(h_raw, family: str = "custom", family_params: dict | None = None) -> GibbsModel:
    """Shift ``h_raw`` by ``log Tr exp(-h_raw)`` and wrap it as a :class:`GibbsModel`."""
    h = hermitian(h_raw)
    w = eigh(h).eigenvalues
    lo = w[0]
    shift = float(-lo + math.log(float(np.sum(np.exp(-(w - lo))))))
    params = dict(family_params or {})
    params.setdefault("shift", shift)
    return GibbsModel(h + shift * np.eye(h.shape[0]), family, params)


def make_oscillator(n_levels: int, omega: float = 1.0) -> GibbsModel:
    """Truncated harmonic oscillator, raw energies ``omega (n + 1/2)``."""
    if n_levels < 2:
        raise ValueError("n_levels must be at least 2")
    if omega <= 0:
        raise ValueError("omega must be positive")
    energies = omega * (np.arange(n_levels) + 0.5)
    return gibbs_model(np.diag(energies), "oscillator", {"omega": float(omega)})


def make_random_model(dim: int, seed: int, scale: float = 1.0) -> GibbsModel:
    """``h0 = scale (G + G^T)/2`` from a seeded standard normal ``G``, then shifted."""
    if dim < 2:
        raise ValueError("dim must be at least 2")
    g = np.random.default_rng(seed).standard_normal((dim, dim))
    return gibbs_model(
        scale * 0.5 * (g + g.T), "random", {"seed": int(seed), "scale": float(scale)}
    )


def make_diagonal_model(rho_diag) -> GibbsModel:
    """Model whose ``rho0`` is the diagonal density ``rho_diag``."""
    p = np.asarray(rho_diag, dtype=float)
    if np.any(p <= 0):
        raise ValueError("rho_diag must be strictly positive")
    return gibbs_model(np.diag(-np.log(p / p.sum())), "custom", {})


def _check_dims(m: GibbsModel, x: np.ndarray) -> None:
    if x.shape != (m.dim, m.dim):
        raise ValueError(f"perturbation has shape {x.shape}, model dim is {m.dim}")


def log_trace_exp(a) -> tuple[float, SpectralDecomposition]:
    """``log Tr exp(a)`` by a max-shifted eigenvalue sum, plus the decomposition."""
    d = eigh(a)
    top = d.eigenvalues[-1]
    return top + math.log(float(np.sum(np.exp(d.eigenvalues - top)))), d


def perturb(m: GibbsModel, x) -> PerturbedState:
    """``rho_X = exp(-h0 - X - psi_X)`` with ``psi_X = log Tr exp(-h0 - X)``."""
    x = hermitian(x)
    _check_dims(m, x)
    psi, d = log_trace_exp(-m.h0 - x)
    if d.eigenvalues[-1] > OVERFLOW_EXPONENT:
        raise MagnitudeError(
            f"eigenvalue {d.eigenvalues[-1]:.4g} of -h0-X exceeds {OVERFLOW_EXPONENT}"
        )
    rho = matrix_fn(d, lambda w: np.exp(w - psi))
    return PerturbedState(x, psi, rho)


def center_score(m: GibbsModel, x) -> tuple[np.ndarray, float]:
    """Subtract the mean ``Tr(rho0 X)`` so the returned score has zero mean."""
    x = hermitian(x)
    _check_dims(m, x)
    c = float(np.real(np.sum(m.rho0 * x.T)))
    return x - c * np.eye(m.dim), c


def kato_profile(m: GibbsModel, x, b_grid) -> np.ndarray:
    """Rows ``(b, a(b))`` with ``a(b) = ||(h0+b)^{-1/2} X (h0+b)^{-1/2}||``.

    ``a(b)`` is nonincreasing in ``b``; its infimum over the grid is the
    finite-dimensional stand-in for the Kato form bound.
    """
    x = hermitian(x)
    _check_dims(m, x)
    rows = []
    for b in np.asarray(b_grid, dtype=float):
        if b <= 0:
            raise ValueError("b_grid must be positive")
        r = m.h0_shifted_power(b, -0.5)
        rows.append((b, operator_norm(r @ x @ r)))
    return np.array(rows, dtype=float).reshape(-1, 2)


def epsilon_sandwich_norm(m: GibbsModel, x, epsilon: float, c: float) -> float:
    """Largest singular value of ``(h0+c)^{-1/2-eps} X (h0+c)^{-1/2+eps}``."""
    x = hermitian(x)
    _check_dims(m, x)
    left = m.h0_shifted_power(c, -0.5 - epsilon)
    right = m.h0_shifted_power(c, -0.5 + epsilon)
    return float(np.linalg.norm(left @ x @ right, ord=2))


def epsilon_bounded(m: GibbsModel, x, epsilon: float, c: float) -> bool:
    if not 0.0 < epsilon <= 0.5:
        raise ValueError(f"epsilon must lie in (0, 1/2], got {epsilon}")
    if c <= 0:
        raise ValueError("c must be positive")
    return epsilon_sandwich_norm(m, x, epsilon, c) <= c


def _check_density(sigma: np.ndarray, tol: float = PSD_TOL) -> np.ndarray:
    sigma = hermitian(sigma)
    tr = float(np.trace(sigma).real)
    if abs(tr - 1.0) > INPUT_TRACE_TOL:
        raise ValueError(f"density has trace {tr!r}")
    if eigh(sigma).eigenvalues[0] < -tol:
        raise NotPSDError("density is not positive semidefinite")
    return sigma


def p_nearby(
    m: GibbsModel,
    sigma,
    p: float,
    c: float,
    lower_exp: float | None = None,
    upper_exp: float | None = None,
    tol: float = PSD_TOL,
) -> bool:
    """``c^{-1} rho0^{lower_exp} <= sigma <= c rho0^{upper_exp}``.

    The exponents default to ``1 + p`` and ``1 - p``.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if c <= 1.0:
        raise ValueError("c must exceed 1")
    sigma = _check_density(sigma, tol)
    _check_dims(m, sigma)
    lo = 1.0 + p if lower_exp is None else lower_exp
    hi = 1.0 - p if upper_exp is None else upper_exp
    return psd_order(m.rho0_power(lo) / c, sigma, tol) and psd_order(
        sigma, c * m.rho0_power(hi), tol
    )


def p_nearby_constant(
    m: GibbsModel,
    sigma,
    p: float,
    lower_exp: float | None = None,
    upper_exp: float | None = None,
) -> float:
    """Smallest ``c`` for which :func:`p_nearby` holds (``inf`` if ``sigma`` is singular)."""
    sigma = _check_density(sigma)
    lo = 1.0 + p if lower_exp is None else lower_exp
    hi = 1.0 - p if upper_exp is None else upper_exp
    ds = eigh(sigma)
    if ds.eigenvalues[0] <= 0.0:
        return math.inf
    s_inv_half = matrix_fn(ds, lambda w: w**-0.5)
    lower = eigh(s_inv_half @ m.rho0_power(lo) @ s_inv_half).eigenvalues[-1]
    u_inv_half = m.rho0_power(-0.5 * hi)
    upper = eigh(u_inv_half @ sigma @ u_inv_half).eigenvalues[-1]
    return float(max(lower, upper))


# -- file format -------------------------------------------------------------


def _encode_matrix(a: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(a).ravel()]


def _decode_matrix(entries: list, dim: int) -> np.ndarray:
    if len(entries) != dim * dim:
        raise ValueError(f"expected {dim * dim} entries, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries])
    return flat.reshape(dim, dim)


def model_to_dict(m: GibbsModel) -> dict:
    return {
        "dim": m.dim,
        "family": m.family,
        "family_params": dict(m.family_params),
        "h0": _encode_matrix(m.h0),
        "beta_profile": [[b, v] for b, v in m.beta_profile],
    }


def model_from_dict(d: dict) -> GibbsModel:
    dim = int(d["dim"])
    return GibbsModel(
        _decode_matrix(d["h0"], dim),
        d.get("family", "custom"),
        dict(d.get("family_params", {})),
        tuple((float(b), float(v)) for b, v in d.get("beta_profile", [])),
    )


def save_model(m: GibbsModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(m), indent=1) + "\n")


def load_model(path) -> GibbsModel:
    return model_from_dict(json.loads(Path(path).read_text()))


def matrix_to_dict(a) -> dict:
    a = np.asarray(a)
    return {"dim": a.shape[0], "matrix": _encode_matrix(a)}


def matrix_from_dict(d: dict) -> np.ndarray:
    return hermitian(_decode_matrix(d["matrix"], int(d["dim"])))
