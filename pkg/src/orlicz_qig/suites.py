"""
Property suites behind ``orlicz-qig verify``.

Every check produces a *margin* that must satisfy ``margin >= -tol``.
Inequalities report their slack directly; agreement checks report minus the
error, so a passing agreement check has a margin in ``[-tol, 0]``.  Each
check carries the acceptance criterion number it feeds.

Trial ``t`` at dimension ``d`` of a suite draws from
``default_rng((seed + t, d, suite_code))`` and so does not depend on which
other trials run, in what order, or in which worker.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import classical as cl
from .bkm import (
    alpha_entropy,
    bkm_inner,
    bkm_quadrature_oracle,
    entropy_sum_identity_gap,
    generalized_mean,
    generalized_mean_quadrature,
    relative_entropy,
)
from .duality import (
    CotangentVector,
    bogoliubov_peierls_margin,
    conjugate_diag_oracle,
    conjugate_diag_value,
    conjugate_phi,
    double_conjugate_gap,
    dual_luxemburg_norm,
    golden_thompson_margin,
    holder_orlicz_margin,
    youngs_inequality_margin,
)
from .linalg import PAULI_X, PAULI_Z, operator_norm, random_density, random_hermitian, trace_pair
from .quantum_young import luxemburg_norm, phi, phi_gradient
from .recipes import Recipe, sweep
from .report import Check
from .states import (
    GibbsModel,
    epsilon_sandwich_norm,
    gibbs_model,
    make_diagonal_model,
    make_oscillator,
    p_nearby_constant,
    BETA_GRID,
    perturb,
)

SUITES = (
    "young-axioms", "norm-axioms", "equivalence", "duality",
    "inequalities", "classical", "geometry",
)
_SUITE_CODE = {name: k for k, name in enumerate(SUITES + ("sweep",))}

INV_ACOSH2 = 1.0 / math.acosh(2.0)
INV_ACOSH15 = 1.0 / math.acosh(1.5)
GOLDEN_THOMPSON_SPOT = 2.0 * math.cosh(1.0) ** 2 - 2.0 * math.cosh(math.sqrt(2.0))
CONJUGATE_SPOT = conjugate_diag_value([0.5, 0.5], [0.25, -0.25])

DEFAULT_TOLERANCES = {
    "phi-zero": 0.0,
    "phi-even": 0.0,
    "phi-convexity": 1e-9,
    "phi-gradient": 1e-6,
    "norm-homogeneity": 1e-9,
    "norm-triangle": 1e-9,
    "norm-definiteness": 0.0,
    "norm-equivalence-upper": 1e-9,
    "norm-equivalence-lower": 1e-9,
    "norm-identity-a1": 1e-8,
    "norm-identity-a05": 1e-8,
    "bkm-quadrature": 1e-10,
    "bkm-spot": 1e-12,
    "generalized-mean": 1e-10,
    "young-inequality": 1e-7,
    "holder-orlicz": 1e-6,
    "bogoliubov-peierls": 1e-10,
    "golden-thompson": 1e-10,
    "golden-thompson-spot": 1e-6,
    "double-conjugate-matched": 1e-5,
    "double-conjugate-probes": 1e-7,
    "conjugate-diag-oracle": 1e-6,
    "conjugate-spot": 1e-6,
    "conjugate-even": 1e-7,
    "conjugate-convexity": 1e-7,
    "dual-norm-diag-oracle": 1e-6,
    "classical-biduality": 1e-6,
    "classical-delta2": 0.0,
    "classical-equivalence": 0.0,
    "classical-norm-homogeneity": 1e-9,
    "classical-norm-triangle": 1e-9,
    "plus-convexity": 1e-9,
    "minus-convexity": 1e-9,
    "entropy-sum-identity": 1e-9,
    "alpha-rate-window": 0.0,
    "sweep-beta-drift": 0.0,  # margin is 1e-6 minus the last drift
    "sweep-identity-norm": 1e-8,
}

CRITERION = {
    "phi-zero": 1, "phi-even": 1, "phi-convexity": 1, "phi-gradient": 8,
    "norm-homogeneity": 2, "norm-triangle": 2, "norm-definiteness": 2,
    "norm-equivalence-upper": 3, "norm-equivalence-lower": 3,
    "norm-identity-a1": 3, "norm-identity-a05": 3,
    "bkm-quadrature": 4, "bkm-spot": 4, "generalized-mean": 5,
    "young-inequality": 6, "holder-orlicz": 6, "bogoliubov-peierls": 6,
    "golden-thompson": 6, "golden-thompson-spot": 6,
    "double-conjugate-matched": 6, "double-conjugate-probes": 6,
    "conjugate-diag-oracle": 7, "conjugate-spot": 7,
    "classical-biduality": 9, "classical-delta2": 9, "classical-equivalence": 9,
    "classical-norm-homogeneity": 9, "classical-norm-triangle": 9,
    "plus-convexity": 10, "minus-convexity": 10,
    "entropy-sum-identity": 11, "alpha-rate-window": 11,
    "sweep-beta-drift": 12, "sweep-identity-norm": 12,
}

# checks that are not tied to an acceptance criterion
INVARIANT_ONLY = ("conjugate-even", "conjugate-convexity", "dual-norm-diag-oracle")

SWEEP_DIMS = tuple(range(4, 33))
SWEEP_DRIFT_BOUND = 1e-6
COMMUTING_INSTANCES = 50


@dataclass(frozen=True)
class Job:
    suite: str
    dim: int | None
    trial: int
    seed: int


def trial_rng(suite: str, dim: int | None, trial: int, seed: int) -> np.random.Generator:
    return np.random.default_rng((seed + trial, dim or 0, _SUITE_CODE[suite]))


# -- instance generators ------------------------------------------------------


def random_model(rng, dim: int) -> GibbsModel:
    """Random complex Gibbs model with spectral spread between 1 and 6, or an oscillator."""
    if rng.uniform() < 0.25:
        return make_oscillator(dim, rng.uniform(0.3, 1.0))
    z = random_hermitian(rng, dim)
    return gibbs_model(rng.uniform(0.5, 3.0) * z / operator_norm(z))


def random_perturbation(rng, dim: int, lo: float = 0.05, hi: float = 3.0) -> np.ndarray:
    z = random_hermitian(rng, dim)
    return rng.uniform(lo, hi) * z / operator_norm(z)


def _entry(name: str, margin: float) -> tuple[str, float]:
    return name, float(margin) + 0.0  # + 0.0 turns -0.0 into 0.0


# -- suites (one trial each) ----------------------------------------------------


def _young_axioms(rng, dim, trial):
    m = random_model(rng, dim)
    x = random_perturbation(rng, dim)
    y = random_perturbation(rng, dim)
    t = rng.uniform()
    out = [
        _entry("phi-zero", -abs(phi(m, np.zeros((dim, dim))).value)),
        _entry("phi-even", -abs(phi(m, x).value - phi(m, -x).value)),
    ]
    mix = phi(m, t * x + (1 - t) * y).value
    out.append(_entry("phi-convexity", t * phi(m, x).value + (1 - t) * phi(m, y).value - mix))
    b = random_hermitian(rng, dim)
    b /= np.linalg.norm(b)
    exact = trace_pair(phi_gradient(m, x), b)

    def central(h):
        return (phi(m, x + h * b).value - phi(m, x - h * b).value) / (2 * h)

    h = 1e-3
    fd = (4.0 * central(h / 2) - central(h)) / 3.0
    out.append(_entry("phi-gradient", -abs(fd - exact) / max(abs(exact), 1e-300)))
    return out


def _norm_axioms(rng, dim, trial):
    m = random_model(rng, dim)
    x = random_perturbation(rng, dim)
    y = random_perturbation(rng, dim)
    lam = rng.uniform(-3.0, 3.0)
    nx, ny = luxemburg_norm(m, x), luxemburg_norm(m, y)
    scaled = luxemburg_norm(m, lam * x)
    out = [
        _entry("norm-homogeneity", -abs(scaled - abs(lam) * nx) / (abs(lam) * nx)),
        _entry("norm-triangle", nx + ny - luxemburg_norm(m, x + y)),
    ]
    tiny = 10.0 ** rng.uniform(-12.0, -7.0) * x / operator_norm(x)
    # definiteness: ||X||_L <= 1e-8 must force ||X||_op <= 1e-6
    margin = 1e-6 - operator_norm(tiny) if luxemburg_norm(m, tiny) <= 1e-8 else 1e-6
    out.append(_entry("norm-definiteness", margin))
    return out


def _equivalence(rng, dim, trial):
    m = random_model(rng, dim)
    x = random_perturbation(rng, dim)
    out = []
    na = luxemburg_norm(m, x, 1.0)
    upper, lower = math.inf, math.inf
    for b in (0.5, 0.3):
        nb = luxemburg_norm(m, x, b)
        upper = min(upper, (1.0 / b) * na - nb)
        lower = min(lower, nb - na)
    out.append(_entry("norm-equivalence-upper", upper))
    out.append(_entry("norm-equivalence-lower", lower))
    eye = np.eye(dim)
    out.append(_entry("norm-identity-a1", -abs(luxemburg_norm(m, eye, 1.0) - INV_ACOSH2)))
    out.append(_entry("norm-identity-a05", -abs(luxemburg_norm(m, eye, 0.5) - INV_ACOSH15)))
    return out


def _commuting_instance(rng, dim):
    rho = rng.dirichlet(np.full(dim, 2.0)) * 0.9 + 0.1 / dim
    sigma = rng.dirichlet(np.full(dim, 2.0)) * 0.9 + 0.1 / dim
    return rho, sigma


def _duality(rng, dim, trial):
    out = []
    if trial < COMMUTING_INSTANCES:
        rho, sigma = _commuting_instance(rng, dim)
        m = make_diagonal_model(rho)
        v = CotangentVector(np.diag(sigma - rho).astype(complex))
        res = conjugate_phi(m, v)
        out.append(_entry("conjugate-diag-oracle",
                          -abs(res.value - conjugate_diag_oracle(rho, sigma))))
        delta = sigma - rho
        oracle_norm = cl.gauge_infimum(
            lambda r: conjugate_diag_value(rho, delta / r), float(np.max(np.abs(delta))), 1.0,
            rtol=1e-12,
        )
        out.append(_entry("dual-norm-diag-oracle",
                          -abs(dual_luxemburg_norm(m, v) - oracle_norm)))
    if trial == 0:
        m = make_diagonal_model([0.5, 0.5])
        v = CotangentVector.from_state(m, np.diag([0.75, 0.25]))
        out.append(_entry("conjugate-spot", -abs(conjugate_phi(m, v).value - CONJUGATE_SPOT)))
    m = random_model(rng, dim)
    v1 = CotangentVector.from_state(m, random_density(rng, dim))
    v2 = CotangentVector.from_state(m, random_density(rng, dim))
    f1 = conjugate_phi(m, v1).value
    out.append(_entry("conjugate-even", -abs(f1 - conjugate_phi(m, v1.scaled(-1.0)).value)))
    mid = conjugate_phi(m, CotangentVector(0.5 * (v1.v + v2.v))).value
    out.append(_entry("conjugate-convexity", 0.5 * (f1 + conjugate_phi(m, v2).value) - mid))
    return out


def _inequalities(rng, dim, trial):
    m = random_model(rng, dim)
    x = np.zeros((dim, dim), dtype=complex) if trial == 0 else random_perturbation(rng, dim)
    v = CotangentVector.from_state(m, random_density(rng, dim))
    probes = [CotangentVector.from_state(m, random_density(rng, dim)) for _ in range(3)]
    a = random_perturbation(rng, dim)
    return [
        _entry("young-inequality", youngs_inequality_margin(m, x, v)),
        _entry("holder-orlicz", holder_orlicz_margin(m, x, v)),
        _entry("bogoliubov-peierls", bogoliubov_peierls_margin(m, x)),
        _entry("golden-thompson", golden_thompson_margin(a, x)),
        _entry("golden-thompson-spot",
               -abs(golden_thompson_margin(PAULI_Z, PAULI_X) - GOLDEN_THOMPSON_SPOT)),
        _entry("double-conjugate-matched", -abs(double_conjugate_gap(m, x))),
        _entry("double-conjugate-probes", double_conjugate_gap(m, x, probes)),
    ]


_CLASSICAL_GRID = np.linspace(0.05, 3.0, 16)


def _classical_global():
    phi1, phi2, phi3 = cl.builtin("phi1"), cl.builtin("phi2"), cl.builtin("phi3")
    dual3 = cl.legendre_dual_values(phi3, _CLASSICAL_GRID)
    out = [_entry("classical-biduality", -float(np.max(np.abs(dual3 - phi2(_CLASSICAL_GRID)))))]
    expected = {"power": True, "phi3": True, "phi1": False, "phi2": False}
    agree = all(
        cl.is_delta2(cl.builtin(name, 2.0) if name == "power" else cl.builtin(name)).holds == want
        for name, want in expected.items()
    )
    out.append(_entry("classical-delta2", 0.0 if agree else -1.0))
    eq = cl.equivalent(phi1, phi2)
    grid = np.logspace(0.0, 2.0, 41)
    ok = eq.equivalent and cl.equivalence_witness_holds(phi1, phi2, eq.c, eq.C, grid)
    out.append(_entry("classical-equivalence", 0.0 if ok else -1.0))
    return out


def _classical(rng, dim, trial):
    out = _classical_global() if trial == 0 else []
    mu = cl.DiscreteMeasureSpace(rng.dirichlet(np.ones(dim)))
    phi_ = cl.builtin(("phi1", "phi2", "phi3")[trial % 3])
    u, w = rng.standard_normal(dim), rng.standard_normal(dim)
    lam = rng.uniform(-3.0, 3.0)
    nu = cl.luxemburg_norm_discrete(u, mu, phi_)
    out.append(_entry("classical-norm-homogeneity",
                      -abs(cl.luxemburg_norm_discrete(lam * u, mu, phi_) - abs(lam) * nu)
                      / (abs(lam) * nu)))
    out.append(_entry("classical-norm-triangle",
                      nu + cl.luxemburg_norm_discrete(w, mu, phi_)
                      - cl.luxemburg_norm_discrete(u + w, mu, phi_)))
    return out


def _sweep(rng, dim, trial):
    # dimension-free: runs once per verify call, over the oscillator truncations
    worst = math.inf
    for beta in (b for b in BETA_GRID if b >= 0.5):
        rows = sweep("oscillator", SWEEP_DIMS, "beta-profile", Recipe("zero"), beta=beta)
        worst = min(worst, SWEEP_DRIFT_BOUND - rows[-1][2])
    norms = sweep("oscillator", SWEEP_DIMS, "norm", Recipe("identity"))
    spread = max(abs(v - INV_ACOSH2) for _, v, _ in norms)
    return [_entry("sweep-beta-drift", worst), _entry("sweep-identity-norm", -spread)]


def _geometry(rng, dim, trial):
    out = []
    m = random_model(rng, dim)
    x = random_perturbation(rng, dim)
    y = random_perturbation(rng, dim)
    exact = bkm_inner(m.rho0, x, y)
    quad = bkm_quadrature_oracle(m.rho0, x, y)
    scale = max(abs(exact), math.sqrt(bkm_inner(m.rho0, x, x) * bkm_inner(m.rho0, y, y)))
    out.append(_entry("bkm-quadrature", -abs(exact - quad) / scale))
    if trial == 0:
        half = np.eye(2) / 2
        out.append(_entry("bkm-spot", -abs(bkm_inner(half, PAULI_X, PAULI_X) - 0.5)))
    gm = generalized_mean(m.rho0, x)
    gq = generalized_mean_quadrature(m.rho0, x)
    out.append(_entry("generalized-mean", -abs(gm - gq) / max(abs(gm), 1.0)))

    # (+1)-convexity: epsilon-bounded perturbations stay bounded under mixing
    eps, c = 0.25, rng.uniform(0.5, 4.0)
    xs = []
    for _ in range(2):
        z = random_perturbation(rng, dim)
        xs.append(z * c * rng.uniform(0.1, 1.0) / epsilon_sandwich_norm(m, z, eps, c))
    t = rng.uniform()
    mixed = epsilon_sandwich_norm(m, t * xs[0] + (1 - t) * xs[1], eps, c)
    out.append(_entry("plus-convexity", (c - mixed) / c))

    # (-1)-convexity: p-nearby states stay p-nearby under mixtures
    p = rng.uniform(0.1, 0.9)
    s1, s2 = random_density(rng, dim), random_density(rng, dim)
    cc = max(p_nearby_constant(m, s1, p), p_nearby_constant(m, s2, p))
    cmix = p_nearby_constant(m, t * s1 + (1 - t) * s2, p)
    out.append(_entry("minus-convexity", (cc - cmix) / cc))

    state = perturb(m, random_perturbation(rng, dim, 0.05, 1.5))
    out.append(_entry("entropy-sum-identity", -entropy_sum_identity_gap(m, state)))

    rho, sigma = random_density(rng, dim), random_density(rng, dim)
    s = relative_entropy(sigma, rho)
    ratio = (alpha_entropy(sigma, rho, 0.99) - s) / (alpha_entropy(sigma, rho, 0.999) - s)
    out.append(_entry("alpha-rate-window", min(ratio - 8.0, 12.0 - ratio)))
    return out


_RUNNERS = {
    "young-axioms": _young_axioms,
    "norm-axioms": _norm_axioms,
    "equivalence": _equivalence,
    "duality": _duality,
    "inequalities": _inequalities,
    "classical": _classical,
    "geometry": _geometry,
    "sweep": _sweep,
}

SUITE_CRITERIA = {
    "young-axioms": (1, 8),
    "norm-axioms": (2,),
    "equivalence": (3,),
    "duality": (7,),
    "inequalities": (6,),
    "classical": (9,),
    "geometry": (4, 5, 10, 11),
    "sweep": (12,),
}


def run_job(job: Job) -> list[tuple[str, float]]:
    rng = trial_rng(job.suite, job.dim, job.trial, job.seed)
    try:
        return _RUNNERS[job.suite](rng, job.dim, job.trial)
    except Exception as exc:  # a crash is a failed check, not an aborted run
        return [(f"{job.suite}-error:{type(exc).__name__}", -math.inf)]


def worker_count() -> int:
    cap = os.environ.get("ORLICZ_QIG_THREADS")
    if cap is None:
        return 1
    try:
        n = int(cap)
    except ValueError:
        return 1
    return max(1, min(n, os.cpu_count() or 1))


def expand(suite: str) -> tuple[str, ...]:
    if suite == "all":
        return SUITES
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    return (suite,)


def run_suites(suite: str, trials: int, dims, seed: int, tolerances: dict | None = None,
               workers: int | None = None) -> tuple[list[Check], float]:
    """Run suites and return one aggregated check per (check name, dim), plus wall time in ms."""
    if trials < 1:
        raise ValueError("trials must be positive")
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    suites = expand(suite)
    jobs = [Job(s, int(d), t, seed) for s in suites for d in dims for t in range(trials)]
    if "geometry" in suites:
        jobs.append(Job("sweep", None, 0, seed))
    workers = worker_count() if workers is None else workers
    start = time.perf_counter()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_job, jobs, chunksize=4))
    else:
        results = [run_job(j) for j in jobs]
    elapsed = 1e3 * (time.perf_counter() - start)

    worst: dict[tuple[str, int], list] = {}
    for job, entries in zip(jobs, results):
        for name, margin in entries:
            key = (name, job.dim)
            if key not in worst:
                worst[key] = [margin, 0]
            worst[key][0] = min(worst[key][0], margin)
            worst[key][1] += 1
    checks = []
    for (name, dim), (margin, count) in worst.items():
        t = tol.get(name, 0.0)
        checks.append(Check(name, margin, bool(margin >= -t), t, CRITERION.get(name), dim, count))
    return checks, elapsed


def criterion_status(checks: list[Check]) -> dict[int, bool]:
    """Pass/fail per acceptance criterion over the checks that carry one."""
    status: dict[int, bool] = {}
    for c in checks:
        if c.criterion is not None:
            status[c.criterion] = status.get(c.criterion, True) and c.passed
        elif "-error:" in c.name:
            for k in SUITE_CRITERIA[c.name.split("-error:")[0]]:
                status[k] = False
    return status
