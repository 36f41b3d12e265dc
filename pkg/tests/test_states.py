import json
import math

import numpy as np
import pytest

from orlicz_qig.errors import MagnitudeError, NotPSDError
from orlicz_qig.linalg import PAULI_X, PAULI_Z, expm_h, random_density, random_hermitian
from orlicz_qig.states import (
    GibbsModel,
    center_score,
    epsilon_bounded,
    epsilon_sandwich_norm,
    gibbs_model,
    kato_profile,
    load_model,
    make_diagonal_model,
    make_oscillator,
    make_random_model,
    matrix_from_dict,
    matrix_to_dict,
    model_from_dict,
    model_to_dict,
    p_nearby,
    p_nearby_constant,
    perturb,
    save_model,
)

from conftest import DIMS, random_model, random_x

HALF = make_diagonal_model([0.5, 0.5])


def test_oscillator_two_levels_shift():
    m = make_oscillator(2, 1.0)
    expected = math.log(math.exp(-0.5) + math.exp(-1.5))
    assert m.family_params["shift"] == pytest.approx(expected, abs=1e-15)
    assert m.family_params["shift"] == pytest.approx(-0.18673831, abs=1e-8)
    assert isinstance(m.family_params["shift"], float)
    assert abs(np.trace(expm_h(-m.h0)).real - 1.0) <= 1e-12


@pytest.mark.parametrize("n", [2, 3, 8, 32])
@pytest.mark.parametrize("omega", [0.2, 1.0, 3.0])
def test_oscillator_normalized(n, omega):
    m = make_oscillator(n, omega)
    assert abs(m.trace_exp - 1.0) <= 1e-10
    assert np.all(m.rho0_eigenvalues > 0)


def test_equal_energies_give_maximally_mixed():
    m = gibbs_model(np.diag([math.log(2.0)] * 2))
    np.testing.assert_allclose(m.rho0, np.eye(2) / 2, atol=1e-15)
    np.testing.assert_allclose(HALF.rho0, np.eye(2) / 2, atol=1e-15)


def test_random_model_deterministic():
    a, b = make_random_model(4, 7), make_random_model(4, 7)
    assert np.array_equal(a.h0, b.h0)
    assert abs(a.trace_exp - 1.0) <= 1e-10
    w = np.linalg.eigvalsh(a.rho0)
    assert np.all(w > 0) and abs(w.sum() - 1.0) <= 1e-10
    assert not np.array_equal(a.h0, make_random_model(4, 8).h0)


@pytest.mark.parametrize("args", [(1, 1.0), (3, 0.0), (3, -1.0)])
def test_oscillator_rejects(args):
    with pytest.raises(ValueError):
        make_oscillator(*args)


def test_model_constructor_validates():
    with pytest.raises(ValueError):
        GibbsModel(np.zeros((2, 2)))


def test_beta_profile():
    m = make_oscillator(4, 1.0)
    betas = [b for b, _ in m.beta_profile]
    np.testing.assert_allclose(betas, np.arange(1, 11) / 10, atol=1e-15)
    assert m.beta_profile[-1][1] == pytest.approx(1.0, abs=1e-12)
    vals = [v for _, v in m.beta_profile]
    assert all(x > y for x, y in zip(vals, vals[1:]))


def test_perturb_examples():
    s = perturb(HALF, np.zeros((2, 2)))
    assert s.psi_x == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_allclose(s.rho_x, HALF.rho0, atol=1e-15)
    s = perturb(HALF, 0.7 * np.eye(2))
    assert s.psi_x == pytest.approx(-0.7, abs=1e-14)
    np.testing.assert_allclose(s.rho_x, HALF.rho0, atol=1e-14)
    s = perturb(HALF, PAULI_Z)
    e = math.e
    np.testing.assert_allclose(s.rho_x, np.diag([1 / e, e]) / (1 / e + e), atol=1e-14)


@pytest.mark.parametrize("dim", DIMS)
def test_perturb_reconstruction_and_gauge(dim, rng):
    for _ in range(25):
        m = random_model(rng, dim)
        x = random_x(rng, dim, rng.uniform(0.1, 3))
        s = perturb(m, x)
        rebuilt = expm_h(-m.h0 - x - s.psi_x * np.eye(dim))
        assert np.max(np.abs(rebuilt - s.rho_x)) <= 1e-10
        assert abs(np.trace(s.rho_x).real - 1.0) <= 1e-10
        c = rng.uniform(-3, 3)
        np.testing.assert_allclose(perturb(m, x + c * np.eye(dim)).rho_x, s.rho_x, atol=1e-10)


def test_perturb_magnitude_error():
    with pytest.raises(MagnitudeError):
        perturb(HALF, -800.0 * PAULI_Z)


def test_center_score_examples():
    x, c = center_score(HALF, PAULI_X)
    assert c == 0.0 and np.array_equal(x, PAULI_X)
    x, c = center_score(HALF, np.eye(2))
    assert c == pytest.approx(1.0) and np.allclose(x, 0.0)
    m = make_diagonal_model([0.75, 0.25])
    x, c = center_score(m, PAULI_Z)
    assert c == pytest.approx(0.5, abs=1e-14)
    np.testing.assert_allclose(x, PAULI_Z - 0.5 * np.eye(2), atol=1e-14)


def test_kato_profile_examples():
    m = make_oscillator(6, 1.0)
    grid = [0.5, 1.0, 2.0, 4.0]
    assert np.all(kato_profile(m, np.zeros((6, 6)), grid)[:, 1] == 0.0)
    energies = np.linalg.eigvalsh(m.h0)
    prof = kato_profile(m, m.h0, grid)
    np.testing.assert_allclose(prof[:, 1], [np.max(energies / (energies + b)) for b in grid], rtol=1e-12)
    assert np.all(prof[:, 1] < 1) and np.all(np.diff(prof[:, 1]) < 0)
    prof = kato_profile(m, np.eye(6), grid)
    np.testing.assert_allclose(prof[:, 1], [1 / (energies[0] + b) for b in grid], rtol=1e-12)
    with pytest.raises(ValueError):
        kato_profile(m, m.h0, [0.0])


@pytest.mark.parametrize("dim", DIMS)
def test_kato_profile_nonincreasing(dim, rng):
    for _ in range(25):
        m = make_oscillator(dim, rng.uniform(0.3, 2))
        prof = kato_profile(m, random_x(rng, dim, 2.0), np.logspace(-1, 2, 12))
        assert np.all(np.diff(prof[:, 1]) <= 1e-12)


def test_epsilon_bounded_examples():
    m = make_oscillator(5, 1.0)
    assert epsilon_bounded(m, np.zeros((5, 5)), 0.3, 1.0)
    e = np.linalg.eigvalsh(m.h0)
    assert epsilon_sandwich_norm(m, m.h0, 0.5, 1.0) == pytest.approx(np.max(e / (e + 1)), rel=1e-12)
    assert epsilon_bounded(m, m.h0, 0.5, 1.0)
    big = np.zeros((5, 5))
    big[:2, :2] = 1e6 * PAULI_X.real
    assert not epsilon_bounded(m, big, 0.25, 1.0)
    with pytest.raises(ValueError):
        epsilon_bounded(m, m.h0, 0.0, 1.0)
    with pytest.raises(ValueError):
        epsilon_bounded(m, m.h0, 0.25, 0.0)


@pytest.mark.parametrize("dim", DIMS)
def test_epsilon_bounded_set_is_convex(dim, rng):
    m = make_oscillator(dim, 0.7)
    eps, c = 0.2, 2.0
    for _ in range(25):
        xs = []
        for _ in range(2):
            z = random_x(rng, dim)
            xs.append(z * c * rng.uniform(0.2, 1.0) / epsilon_sandwich_norm(m, z, eps, c))
        assert all(epsilon_bounded(m, x, eps, c) for x in xs)
        for lam in np.linspace(0, 1, 5):
            assert epsilon_bounded(m, lam * xs[0] + (1 - lam) * xs[1], eps, c)


def test_trace_class_chain(rng):
    # Tr rho_X e^{psi_X} <= Tr e^{-beta h0} ||e^{-(1-beta) h0 - X}|| for small forms
    for _ in range(20):
        m = make_oscillator(8, rng.uniform(0.5, 1.5))
        x = random_x(rng, 8, 0.3)
        s = perturb(m, x)
        lhs = np.trace(s.rho_x).real * math.exp(s.psi_x)
        for beta in (0.5, 0.9):
            rhs = np.sum(m.rho0_eigenvalues**beta) * np.max(
                np.linalg.eigvalsh(expm_h(-(1 - beta) * m.h0 - x))
            )
            assert lhs <= rhs * (1 + 1e-12)


def test_p_nearby_examples():
    m = make_diagonal_model([0.75, 0.25])
    assert p_nearby(m, m.rho0, 0.3, 1.5)
    assert not p_nearby(m, np.diag([1.0, 0.0]), 0.3, 1.5)
    assert p_nearby_constant(m, np.diag([1.0, 0.0]), 0.3) == math.inf
    sigma = np.diag([0.5, 0.5])
    rho, p, c = np.array([0.75, 0.25]), 0.5, 2.0
    expected = bool(np.all(rho ** (1 + p) / c <= 0.5) and np.all(0.5 <= c * rho ** (1 - p)))
    assert p_nearby(m, sigma, p, c) == expected
    # exponents as parameters (the alternative reading uses 1 - p on both sides)
    alt = bool(np.all(rho ** (1 - p) / c <= 0.5) and np.all(0.5 <= c * rho ** (1 - p)))
    assert p_nearby(m, sigma, p, c, lower_exp=1 - p) == alt


def test_p_nearby_rejects():
    m = make_diagonal_model([0.75, 0.25])
    with pytest.raises(ValueError):
        p_nearby(m, m.rho0, 1.2, 2.0)
    with pytest.raises(ValueError):
        p_nearby(m, m.rho0, 0.5, 1.0)
    with pytest.raises(ValueError):
        p_nearby(m, np.diag([0.7, 0.7]), 0.5, 2.0)
    with pytest.raises(NotPSDError):
        p_nearby(m, np.diag([1.5, -0.5]), 0.5, 2.0)


@pytest.mark.parametrize("dim", DIMS)
def test_p_nearby_constant_is_minimal_and_mixtures_close(dim, rng):
    for _ in range(20):
        m = random_model(rng, dim)
        p = rng.uniform(0.1, 0.9)
        s1, s2 = random_density(rng, dim), random_density(rng, dim)
        c1 = p_nearby_constant(m, s1, p)
        c = max(c1, p_nearby_constant(m, s2, p), 1.0) * (1 + 1e-9) + 1e-9
        assert p_nearby(m, s1, p, c) and p_nearby(m, s2, p, c)
        if c1 > 1.0 + 1e-6:
            assert not p_nearby(m, s1, p, c1 * (1 - 1e-6), tol=0.0)
        lam = rng.uniform()
        assert p_nearby(m, lam * s1 + (1 - lam) * s2, p, c)


@pytest.mark.parametrize("dim", [2, 5])
def test_model_json_round_trip_is_bit_exact(dim, tmp_path):
    m = make_random_model(dim, 11, 0.8)
    path = tmp_path / "m.json"
    save_model(m, path)
    back = load_model(path)
    assert np.array_equal(back.h0, m.h0)
    assert back.family == "random" and back.family_params == m.family_params
    assert back.beta_profile == m.beta_profile
    d = json.loads(path.read_text())
    assert set(d) == {"dim", "family", "family_params", "h0", "beta_profile"}
    assert len(d["h0"]) == dim * dim and all(len(e) == 2 for e in d["h0"])
    assert model_to_dict(model_from_dict(d)) == d


def test_complex_model_round_trip(rng):
    m = random_model(rng, 3)
    back = model_from_dict(json.loads(json.dumps(model_to_dict(m))))
    assert np.array_equal(back.h0, m.h0)


def test_matrix_dict_round_trip(rng):
    x = random_hermitian(rng, 4)
    assert np.array_equal(matrix_from_dict(json.loads(json.dumps(matrix_to_dict(x)))), x)


def test_model_file_rejects_bad_normalization():
    d = model_to_dict(make_oscillator(3, 1.0))
    d["h0"][0][0] += 0.1
    with pytest.raises(ValueError):
        model_from_dict(d)
