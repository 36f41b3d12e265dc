"""
The quantum Young function at a Gibbs base point and its Luxemburg norms.

    Phi(X) = 1/2 Tr(exp(-h0 - X) + exp(-h0 + X)) - 1

with ``Tr exp(-h0) = 1``.  An exponent above :data:`OVERFLOW_EXPONENT`
makes ``Phi`` saturate to ``inf``, which stands in for a perturbation whose
Gibbs operator is not trace class.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .classical import gauge_infimum
from .errors import SaturationError
from .linalg import eigh, hermitian, matrix_fn, operator_norm
from .states import OVERFLOW_EXPONENT, GibbsModel, _check_dims

LUX_RTOL = 1e-13


class PhiValue(NamedTuple):
    value: float
    saturated: bool


def _trace_exp(a) -> tuple[float, bool]:
    w = eigh(a).eigenvalues
    if w[-1] > OVERFLOW_EXPONENT:
        return math.inf, True
    return float(np.sum(np.exp(w))), False


def phi(m: GibbsModel, x) -> PhiValue:
    """Evaluate the quantum Young function at ``x``.

    Both traces are measured against the numerically evaluated
    ``Tr exp(-h0)`` rather than the literal 1, so ``phi(m, 0)`` is exactly
    zero and ``phi(m, -x) == phi(m, x)`` bit for bit.
    """
    x = hermitian(x)
    _check_dims(m, x)
    t_minus, s1 = _trace_exp(-m.h0 - x)
    t_plus, s2 = _trace_exp(-m.h0 + x)
    if s1 or s2:
        return PhiValue(math.inf, True)
    t0 = m.trace_exp
    return PhiValue(0.5 * ((t_minus - t0) + (t_plus - t0)), False)


def phi_value(m: GibbsModel, x) -> float:
    return phi(m, x).value


def phi_gradient(m: GibbsModel, x) -> np.ndarray:
    """``G = (exp(-h0 + X) - exp(-h0 - X)) / 2``, so ``dPhi(X)[B] = Tr(G B)``."""
    x = hermitian(x)
    _check_dims(m, x)
    dp = eigh(-m.h0 + x)
    dm = eigh(-m.h0 - x)
    if max(dp.eigenvalues[-1], dm.eigenvalues[-1]) > OVERFLOW_EXPONENT:
        raise SaturationError("Phi is infinite at this perturbation")
    return 0.5 * (matrix_fn(dp, np.exp) - matrix_fn(dm, np.exp))


def luxemburg_norm(m: GibbsModel, x, a: float = 1.0, rtol: float = LUX_RTOL) -> float:
    """``inf{r > 0 : Phi(X / r) < a}`` by bracketing and bisection in ``r``."""
    if a <= 0:
        raise ValueError("threshold a must be positive")
    x = hermitian(x)
    _check_dims(m, x)
    start = operator_norm(x)
    if start == 0.0:
        return 0.0
    return gauge_infimum(lambda r: phi(m, x / r).value, start, a, rtol=rtol)


class NormEquivalence(NamedTuple):
    norm_a: float
    norm_b: float
    bound_ok: bool


def norm_equivalence_report(m: GibbsModel, x, a: float = 1.0, b: float = 0.5,
                            slack: float = 1e-9) -> NormEquivalence:
    """Check ``||X||_a <= ||X||_b <= (a/b) ||X||_a`` for thresholds ``a > b > 0``."""
    if not a > b > 0:
        raise ValueError("need a > b > 0")
    na = luxemburg_norm(m, x, a)
    nb = luxemburg_norm(m, x, b)
    ok = nb <= (a / b) * na + slack and na <= nb + slack
    return NormEquivalence(na, nb, bool(ok))
