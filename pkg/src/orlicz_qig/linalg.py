"""
Dense Hermitian linear algebra.

Every matrix function in the package goes through the spectral route
``U diag(f(lambda)) U^dagger``.  Matrices are plain complex ``numpy`` arrays;
:func:`hermitian` validates and symmetrizes them.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from .errors import ConvergenceError, DomainError, NotPSDError, NumericDegradationError

PSD_TOL = 1e-10
HERMITIAN_TOL = 1e-8
JACOBI_MAX_SWEEPS = 100
JACOBI_THRESHOLD = 1e-14

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class SpectralDecomposition(NamedTuple):
    """Ascending real eigenvalues and the unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``a`` as a complex Hermitian array, symmetrized.

    Raises ``ValueError`` for non-square, empty or non-finite input, or when
    ``a`` departs from ``a^dagger`` by more than ``tol * (1 + max|a|)``.
    """
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    asym = np.max(np.abs(m - m.conj().T))
    if asym > tol * (1.0 + np.max(np.abs(m))):
        raise ValueError(f"matrix is not Hermitian (max |A - A^H| = {asym:.3e})")
    return 0.5 * (m + m.conj().T)


def _jacobi(h: np.ndarray) -> SpectralDecomposition:
    # Cyclic complex Jacobi: each rotation is a phase fix followed by a real
    # Givens rotation that zeroes a[p, q].
    a = h.copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        return SpectralDecomposition(np.real(np.diag(a)).copy(), v)
    threshold = JACOBI_THRESHOLD * scale
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[q, p] = a[p, q] = 0.0
                v[:, idx] = v[:, idx] @ g
    else:
        raise ConvergenceError(
            f"Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps "
            f"(dim={n}, ||H||_F={scale:.3e})"
        )
    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return SpectralDecomposition(w[order], v[:, order])


def eigh(h, method: str = "lapack") -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    ``method="lapack"`` delegates to :func:`numpy.linalg.eigh`;
    ``method="jacobi"`` runs the cyclic Jacobi iteration (100 sweep cap,
    off-diagonal threshold ``1e-14 * ||H||_F``).
    """
    h = hermitian(h)
    if method == "jacobi":
        return _jacobi(h)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    try:
        w, u = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(
            f"eigensolver failed (dim={h.shape[0]}, ||H||_F={np.linalg.norm(h):.3e})"
        ) from exc
    return SpectralDecomposition(w, u)


def matrix_fn(d: SpectralDecomposition, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply the scalar function ``f`` through the spectral decomposition ``d``."""
    with np.errstate(all="ignore"):
        fw = np.asarray(f(d.eigenvalues), dtype=float)
    bad = ~np.isfinite(fw)
    if np.any(bad):
        lam = d.eigenvalues[np.argmax(bad)]
        raise DomainError(f"function is undefined at eigenvalue {lam!r}")
    u = d.eigenvectors
    out = (u * fw) @ u.conj().T
    return 0.5 * (out + out.conj().T)


def expm_h(h) -> np.ndarray:
    return matrix_fn(eigh(h), np.exp)


def logm_h(h) -> np.ndarray:
    return matrix_fn(eigh(h), np.log)


def powm_h(h, p: float) -> np.ndarray:
    """``h ** p`` for PSD ``h``; eigenvalues in ``[-PSD_TOL, 0)`` are clamped to zero."""
    d = eigh(h)
    if d.eigenvalues[0] < -PSD_TOL:
        raise NotPSDError(f"fractional power of a matrix with eigenvalue {d.eigenvalues[0]:.3e}")
    w = np.clip(d.eigenvalues, 0.0, None)
    return matrix_fn(SpectralDecomposition(w, d.eigenvectors), lambda x: np.power(x, p))


def trace_pair(a, b) -> float:
    """``Tr(AB)`` for Hermitian ``a`` and ``b``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    t = np.sum(a * b.T)
    if abs(t.imag) > 1e-9 * max(1.0, abs(t.real)):
        raise NumericDegradationError(f"Tr(AB) has imaginary residue {t.imag:.3e}")
    return float(t.real)


def psd_order(a, b, tol: float = PSD_TOL) -> bool:
    """True iff ``a <= b`` in the positive semidefinite order, up to ``tol``."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return bool(eigh(b - a).eigenvalues[0] >= -tol)


def schatten_quasi_norm(rho, beta: float, tol: float = PSD_TOL) -> float:
    """``(Tr rho^beta)^(1/beta)`` for PSD ``rho`` and ``beta`` in (0, 1]."""
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    w = eigh(rho).eigenvalues
    if w[0] < -tol:
        raise NotPSDError(f"matrix has eigenvalue {w[0]:.3e} < 0")
    w = np.clip(w, 0.0, None)
    return float(np.sum(w**beta) ** (1.0 / beta))


def operator_norm(a) -> float:
    w = eigh(a).eigenvalues
    return float(max(abs(w[0]), abs(w[-1])))


def random_hermitian(rng: np.random.Generator, dim: int, real: bool = False) -> np.ndarray:
    """GUE-like sample ``(G + G^H)/2``; real symmetric when ``real`` is set."""
    g = rng.standard_normal((dim, dim))
    if not real:
        g = g + 1j * rng.standard_normal((dim, dim))
    return hermitian(0.5 * (g + g.conj().T))


def random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Faithful density matrix drawn from the Hilbert-Schmidt ensemble."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T + 1e-3 * np.eye(dim)
    return hermitian(rho / np.trace(rho).real)
