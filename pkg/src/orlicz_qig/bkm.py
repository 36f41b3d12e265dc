"""
BKM (Bogoliubov-Kubo-Mori) geometry, generalized means and entropies.

In the eigenbasis of ``rho`` the BKM pairing has the logarithmic-mean kernel

    K_ij = (l_i - l_j) / (log l_i - log l_j),   K_ii = l_i,

so ``<X, Y>_B = prefactor * sum_ij K_ij X_ij conj(Y_ij)``.  The quadrature
routines below integrate the defining one-parameter family directly and are
kept as independent oracles.

Relative entropy follows the argument order ``S(sigma|rho) = Tr rho(log rho - log sigma)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .linalg import PSD_TOL, eigh, hermitian, matrix_fn, powm_h, trace_pair
from .states import GibbsModel, PerturbedState

FAITHFUL_TOL = 1e-14
DEGENERACY_TOL = 1e-8


def _faithful_spectrum(rho):
    d = eigh(rho)
    if d.eigenvalues[0] <= FAITHFUL_TOL:
        raise DomainError(f"state is not faithful (min eigenvalue {d.eigenvalues[0]:.3e})")
    return d


def log_mean_kernel(lam: np.ndarray) -> np.ndarray:
    """Matrix of logarithmic means of the positive numbers ``lam``."""
    lam = np.asarray(lam, dtype=float)
    li, lj = lam[:, None], lam[None, :]
    delta = np.log(li) - np.log(lj)
    ad = np.abs(delta)
    with np.errstate(divide="ignore", invalid="ignore"):
        quotient = (li - lj) / delta
        half = 0.5 * delta
        geometric = np.sqrt(li * lj) * np.sinh(half) / half
    series = 0.5 * (li + lj) * (1.0 - delta**2 / 12.0)
    k = np.where(ad >= 1.0, quotient, geometric)
    return np.where(ad < DEGENERACY_TOL, series, k)


@dataclass(frozen=True, eq=False)
class BkmKernel:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    kernel: np.ndarray
    prefactor: float = 0.5

    @classmethod
    def from_state(cls, rho, prefactor: float = 0.5) -> "BkmKernel":
        d = _faithful_spectrum(rho)
        return cls(d.eigenvalues, d.eigenvectors, log_mean_kernel(d.eigenvalues), prefactor)

    def inner(self, x, y) -> float:
        u = self.eigenvectors
        xt = u.conj().T @ np.asarray(x) @ u
        yt = u.conj().T @ np.asarray(y) @ u
        return float(self.prefactor * np.real(np.sum(self.kernel * xt * yt.conj())))


def bkm_inner(rho, x, y, prefactor: float = 0.5) -> float:
    """BKM inner product ``prefactor * int_0^1 Tr(rho^a X rho^(1-a) Y) da`` in closed form."""
    x = hermitian(x)
    y = hermitian(y)
    if x.shape != np.shape(rho) or y.shape != np.shape(rho):
        raise ValueError("dimension mismatch")
    return BkmKernel.from_state(rho, prefactor).inner(x, y)


def _gauss_legendre_01(nodes: int):
    t, w = np.polynomial.legendre.leggauss(nodes)
    return 0.5 * (t + 1.0), 0.5 * w


def bkm_quadrature_oracle(rho, x, y, nodes: int = 64, prefactor: float = 0.5) -> float:
    """Gauss-Legendre evaluation of the BKM integral with full matrix products."""
    d = _faithful_spectrum(rho)
    x = np.asarray(x)
    y = np.asarray(y)
    total = 0.0
    for a, w in zip(*_gauss_legendre_01(nodes)):
        ra = matrix_fn(d, lambda lam: lam**a)
        rb = matrix_fn(d, lambda lam: lam ** (1.0 - a))
        total += w * np.trace(ra @ x @ rb @ y).real
    return float(prefactor * total)


def generalized_mean(rho, x) -> float:
    """``rho . X = Tr int_0^1 rho^t X rho^(1-t) dt``, which equals ``Tr(rho X)``."""
    return trace_pair(hermitian(rho), hermitian(x))


def generalized_mean_quadrature(rho, x, nodes: int = 64) -> float:
    d = _faithful_spectrum(rho)
    x = np.asarray(x)
    total = 0.0
    for t, w in zip(*_gauss_legendre_01(nodes)):
        total += w * np.trace(
            matrix_fn(d, lambda lam: lam**t) @ x @ matrix_fn(d, lambda lam: lam ** (1.0 - t))
        ).real
    return float(total)


def relative_entropy(sigma, rho) -> float:
    """``S(sigma|rho) = Tr rho (log rho - log sigma)``; both states faithful."""
    log_sigma = matrix_fn(_faithful_spectrum(sigma), np.log)
    d_rho = _faithful_spectrum(rho)
    rho_log_rho = matrix_fn(d_rho, lambda lam: lam * np.log(lam))
    return float(np.trace(rho_log_rho).real - trace_pair(hermitian(rho), log_sigma))


def von_neumann_entropy(rho) -> float:
    """``-Tr rho log rho`` with ``0 log 0 = 0``.

    Note the sign: this is the nonnegative entropy, the negative of ``Tr rho log rho``.
    """
    w = eigh(rho).eigenvalues
    if w[0] < -PSD_TOL:
        raise DomainError(f"state has negative eigenvalue {w[0]:.3e}")
    w = w[w > 0]
    return float(max(-np.sum(w * np.log(w)), 0.0))


def alpha_entropy(sigma, rho, alpha: float) -> float:
    """``(1 - alpha)^{-1} Tr(rho - rho^alpha sigma^(1-alpha))``; tends to ``S(sigma|rho)`` as alpha -> 1."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    dr = _faithful_spectrum(rho)
    ds = _faithful_spectrum(sigma)
    ra = matrix_fn(dr, lambda lam: lam**alpha)
    sb = matrix_fn(ds, lambda lam: lam ** (1.0 - alpha))
    return float((np.sum(dr.eigenvalues) - np.trace(ra @ sb).real) / (1.0 - alpha))


def amari_embedding(rho, alpha: float, variant: str = "classical") -> np.ndarray:
    """Power coordinates of a state.

    ``variant="classical"`` returns ``rho^((1-alpha)/2)``; ``variant="quantum"``
    returns ``rho^(2/(1-alpha))``.  ``alpha`` lies in ``[-1, 1)``; use
    :func:`ell_plus` for the ``alpha -> 1`` limit.
    """
    if not -1.0 <= alpha < 1.0:
        raise ValueError(f"alpha must lie in [-1, 1), got {alpha}")
    if variant == "classical":
        p = 0.5 * (1.0 - alpha)
    elif variant == "quantum":
        p = 2.0 / (1.0 - alpha)
    else:
        raise ValueError(f"unknown embedding variant {variant!r}")
    return powm_h(rho, p)


def ell_plus(rho) -> np.ndarray:
    return matrix_fn(_faithful_spectrum(rho), np.log)


def ell_minus(rho) -> np.ndarray:
    return hermitian(rho)


def entropy_sum_identity_gap(m: GibbsModel, s: PerturbedState) -> float:
    """``|S(rho0|rhoX) + S(rhoX|rho0) - Tr[(log rhoX - log rho0)(rhoX - rho0)]|``.

    The left side uses numerical matrix logarithms; the right side uses the
    exact logarithms ``log rhoX = -h0 - X - psi_X`` and ``log rho0 = -h0``.
    """
    lhs = relative_entropy(m.rho0, s.rho_x) + relative_entropy(s.rho_x, m.rho0)
    log_diff = -s.x - s.psi_x * np.eye(m.dim)
    rhs = trace_pair(log_diff, s.rho_x - m.rho0)
    return abs(lhs - rhs)
