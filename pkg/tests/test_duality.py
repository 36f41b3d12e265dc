import math

import numpy as np
import pytest

from orlicz_qig.classical import gauge_infimum
from orlicz_qig.duality import (
    ConjugateResult,
    CotangentVector,
    bogoliubov_peierls_margin,
    conjugate_diag_oracle,
    conjugate_diag_value,
    conjugate_phi,
    double_conjugate_gap,
    dual_luxemburg_norm,
    golden_thompson_margin,
    holder_orlicz_margin,
    matched_probe,
    youngs_inequality_margin,
)
from orlicz_qig.linalg import PAULI_X, PAULI_Z, random_density, random_hermitian, trace_pair
from orlicz_qig.quantum_young import phi_gradient, phi_value
from orlicz_qig.states import make_diagonal_model, make_oscillator

from conftest import DIMS, random_model, random_x

HALF = make_diagonal_model([0.5, 0.5])
GT_SPOT = 2 * math.cosh(1) ** 2 - 2 * math.cosh(math.sqrt(2))


def commuting(rng, dim):
    rho = rng.dirichlet(np.full(dim, 2.0)) * 0.9 + 0.1 / dim
    sigma = rng.dirichlet(np.full(dim, 2.0)) * 0.9 + 0.1 / dim
    return rho, sigma


def test_cotangent_vector_validation():
    v = CotangentVector.from_state(HALF, np.diag([0.75, 0.25]))
    np.testing.assert_allclose(v.v, np.diag([0.25, -0.25]))
    assert v.source_sigma is not None
    with pytest.raises(ValueError):
        CotangentVector(np.eye(2), source_sigma=np.eye(2))
    assert CotangentVector(np.eye(2)).scaled(-2.0).v[0, 0] == -2.0


def test_conjugate_examples():
    zero = conjugate_phi(HALF, CotangentVector(np.zeros((2, 2))))
    assert zero.value == 0.0 and np.all(zero.argmax_x == 0) and zero.converged
    res = conjugate_phi(HALF, CotangentVector.from_state(HALF, np.diag([0.75, 0.25])))
    assert isinstance(res, ConjugateResult) and res.converged
    oracle = 2 * (0.25 * math.asinh(0.5) - 0.5 * (math.sqrt(1.25) - 1))
    assert res.value == pytest.approx(oracle, abs=1e-12)
    assert res.value == pytest.approx(0.1225719238, abs=1e-9)
    np.testing.assert_allclose(np.diag(res.argmax_x).real, [math.asinh(0.5), -math.asinh(0.5)], atol=1e-8)


def test_diag_oracle_examples():
    assert conjugate_diag_oracle([0.3, 0.7], [0.3, 0.7]) == 0.0
    assert conjugate_diag_oracle([0.5, 0.5], [0.75, 0.25]) == pytest.approx(0.12257192378, abs=1e-10)
    with pytest.raises(ValueError):
        conjugate_diag_oracle([0.5, 0.5], [1.0, 0.0])
    with pytest.raises(ValueError):
        conjugate_diag_oracle([0.5, 0.6], [0.5, 0.5])


@pytest.mark.parametrize("dim", DIMS)
def test_conjugate_matches_diag_oracle(dim, rng):
    for _ in range(50):
        rho, sigma = commuting(rng, dim)
        m = make_diagonal_model(rho)
        res = conjugate_phi(m, CotangentVector(np.diag(sigma - rho).astype(complex)))
        assert res.converged
        assert abs(res.value - conjugate_diag_oracle(rho, sigma)) <= 1e-6


@pytest.mark.parametrize("dim", DIMS)
def test_conjugate_result_invariants(dim, rng):
    for _ in range(10):
        m = random_model(rng, dim)
        v = CotangentVector.from_state(m, random_density(rng, dim))
        res = conjugate_phi(m, v)
        assert res.converged and res.value >= 0 and res.grad_norm <= 1e-7
        # the supremum dominates every sampled affine minorant
        for probe in [v.v, random_x(rng, dim, 0.5), random_x(rng, dim, 2.0)]:
            assert res.value >= trace_pair(probe, v.v) - phi_value(m, probe) - 1e-12


def test_conjugate_even_and_convex(rng):
    for _ in range(20):
        m = random_model(rng, 4)
        v1 = CotangentVector.from_state(m, random_density(rng, 4))
        v2 = CotangentVector.from_state(m, random_density(rng, 4))
        f1, f2 = conjugate_phi(m, v1).value, conjugate_phi(m, v2).value
        assert conjugate_phi(m, v1.scaled(-1)).value == pytest.approx(f1, abs=1e-7)
        mid = conjugate_phi(m, CotangentVector(0.5 * (v1.v + v2.v))).value
        assert mid <= 0.5 * (f1 + f2) + 1e-7


def test_gradient_method_agrees_when_well_conditioned():
    m = HALF
    v = CotangentVector.from_state(m, np.diag([0.75, 0.25]))
    res = conjugate_phi(m, v, method="gradient")
    assert res.converged
    assert res.value == pytest.approx(conjugate_diag_oracle([0.5, 0.5], [0.75, 0.25]), abs=1e-10)
    with pytest.raises(ValueError):
        conjugate_phi(m, v, method="bfgs")


def test_conjugate_iteration_cap_reports_non_convergence(rng):
    m = random_model(rng, 8)
    v = CotangentVector.from_state(m, random_density(rng, 8))
    res = conjugate_phi(m, v, max_iter=1)
    assert not res.converged and res.iterations == 1


def test_conjugate_warm_start_reaches_same_value(rng):
    m = random_model(rng, 6)
    v = CotangentVector.from_state(m, random_density(rng, 6))
    cold = conjugate_phi(m, v)
    warm = conjugate_phi(m, v, x0=cold.argmax_x)
    assert warm.iterations <= 1
    assert warm.value == pytest.approx(cold.value, abs=1e-12)


def test_dual_norm_examples(rng):
    assert dual_luxemburg_norm(HALF, CotangentVector(np.zeros((2, 2)))) == 0.0
    m = random_model(rng, 4)
    v = CotangentVector.from_state(m, random_density(rng, 4))
    n = dual_luxemburg_norm(m, v)
    for lam in (-2.5, 0.3, 4.0):
        assert abs(dual_luxemburg_norm(m, v.scaled(lam)) - abs(lam) * n) <= 1e-7 * abs(lam) * n
    # definition: Phi*(v / r) reaches a exactly at r = norm
    assert conjugate_phi(m, v.scaled(1 / n)).value == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ValueError):
        dual_luxemburg_norm(m, v, a=0.0)


@pytest.mark.parametrize("dim", [2, 4, 8])
def test_dual_norm_matches_diag_bisection(dim, rng):
    for _ in range(5):
        rho, sigma = commuting(rng, dim)
        m = make_diagonal_model(rho)
        delta = sigma - rho
        oracle = gauge_infimum(lambda r: conjugate_diag_value(rho, delta / r),
                               float(np.max(np.abs(delta))), 1.0)
        n = dual_luxemburg_norm(m, CotangentVector(np.diag(delta).astype(complex)))
        assert abs(n - oracle) <= 1e-6


def test_young_margin_examples(rng):
    z = np.zeros((2, 2))
    assert youngs_inequality_margin(HALF, z, CotangentVector(z)) == 0.0
    m = random_model(rng, 4)
    v = CotangentVector.from_state(m, random_density(rng, 4))
    x_star = conjugate_phi(m, v).argmax_x
    assert abs(youngs_inequality_margin(m, x_star, v)) <= 1e-6


@pytest.mark.parametrize("dim", DIMS)
def test_inequality_battery(dim, rng):
    for _ in range(10):
        m = random_model(rng, dim)
        x = random_x(rng, dim, rng.uniform(0.05, 3))
        v = CotangentVector.from_state(m, random_density(rng, dim))
        assert youngs_inequality_margin(m, x, v) >= -1e-7
        assert holder_orlicz_margin(m, x, v) >= -1e-6
        assert bogoliubov_peierls_margin(m, x) >= -1e-10
        assert golden_thompson_margin(random_x(rng, dim, 2.0), x) >= -1e-10
        probes = [CotangentVector.from_state(m, random_density(rng, dim)) for _ in range(3)]
        assert double_conjugate_gap(m, x, probes) >= -1e-7
        assert abs(double_conjugate_gap(m, x)) <= 1e-5


def test_conjugacy_equality_on_gradient_range(rng):
    for _ in range(10):
        m = random_model(rng, 4)
        x = random_x(rng, 4, rng.uniform(0.1, 2))
        v = CotangentVector(phi_gradient(m, x))
        assert abs(youngs_inequality_margin(m, x, v)) <= 1e-6


def test_double_conjugate_examples(rng):
    m = random_model(rng, 3)
    assert double_conjugate_gap(m, np.zeros((3, 3))) == 0.0
    for _ in range(5):
        rho = rng.dirichlet(np.ones(3))
        md = make_diagonal_model(rho)
        xd = np.diag(rng.uniform(-1, 1, 3))
        probe = matched_probe(md, xd)
        expected = 0.5 * (np.diag(rho * np.exp(np.diag(xd))) - np.diag(rho * np.exp(-np.diag(xd))))
        np.testing.assert_allclose(probe.v, expected, atol=1e-14)
        assert abs(double_conjugate_gap(md, xd, [probe])) <= 1e-6


def test_holder_examples(rng):
    m = random_model(rng, 3)
    v = CotangentVector.from_state(m, random_density(rng, 3))
    assert holder_orlicz_margin(m, np.zeros((3, 3)), v) == 0.0
    margin = holder_orlicz_margin(m, np.eye(3), v)
    assert margin >= 0
    assert trace_pair(np.eye(3), v.v) == pytest.approx(0.0, abs=1e-14)


def test_bogoliubov_peierls_examples(rng):
    m = random_model(rng, 3)
    assert bogoliubov_peierls_margin(m, np.zeros((3, 3))) == 0.0
    assert bogoliubov_peierls_margin(m, 0.7 * np.eye(3)) == pytest.approx(0.0, abs=1e-14)


def test_golden_thompson_examples(rng):
    assert golden_thompson_margin(PAULI_Z, PAULI_X) == pytest.approx(GT_SPOT, abs=1e-12)
    assert golden_thompson_margin(PAULI_Z, PAULI_X) == pytest.approx(0.4058285779, abs=1e-9)
    a = np.diag(rng.standard_normal(3))
    assert golden_thompson_margin(a, np.diag(rng.standard_normal(3))) == 0.0
    h = random_hermitian(rng, 3)
    assert golden_thompson_margin(h, 2 * h) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        golden_thompson_margin(np.eye(2), np.eye(3))


def test_oscillator_conjugate_converges():
    # spread of rho0 eigenvalues near 1e-6 still converges under Newton steps
    m = make_oscillator(16, 0.9)
    sigma = make_oscillator(16, 1.1).rho0
    res = conjugate_phi(m, CotangentVector.from_state(m, sigma))
    assert res.converged and res.value > 0
