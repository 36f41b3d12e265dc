"""
Named perturbation generators and dimension sweeps.

A recipe rebuilds ``X`` at any dimension, which is what lets a sweep follow
one perturbation across truncations.  ``banded-random`` seeds every matrix
entry from ``(seed, i, j)``, so the ``d x d`` matrix is the leading block of
the ``(d+1) x (d+1)`` one.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bkm import bkm_inner
from .linalg import PAULI_X, PAULI_Y, PAULI_Z, hermitian, random_hermitian
from .quantum_young import luxemburg_norm, phi
from .states import GibbsModel, kato_profile, make_oscillator, make_random_model, matrix_from_dict

RECIPES = (
    "zero", "identity", "pauli-x", "pauli-y", "pauli-z",
    "diag", "scaled-h0", "random", "banded-random", "file",
)
SWEEP_QUANTITIES = ("bkm", "norm", "phi", "beta-profile", "kato-profile")
_PAULI = {"pauli-x": PAULI_X, "pauli-y": PAULI_Y, "pauli-z": PAULI_Z}


class RecipeError(ValueError):
    """A perturbation recipe cannot be built as requested."""


@dataclass(frozen=True)
class Recipe:
    name: str
    scale: float = 1.0
    seed: int = 0
    bandwidth: int = 1
    values: tuple = ()
    path: str | None = None
    params: dict = field(default_factory=dict)

    @property
    def extendable(self) -> bool:
        return self.name != "file"

    def build(self, m: GibbsModel) -> np.ndarray:
        return self.scale * _base(self, m)


def _base(r: Recipe, m: GibbsModel) -> np.ndarray:
    d = m.dim
    if r.name == "zero":
        return np.zeros((d, d), dtype=complex)
    if r.name == "identity":
        return np.eye(d, dtype=complex)
    if r.name in _PAULI:
        x = np.zeros((d, d), dtype=complex)
        x[:2, :2] = _PAULI[r.name]
        return x
    if r.name == "diag":
        vals = np.asarray(r.values, dtype=float) if r.values else np.linspace(-1.0, 1.0, d)
        if vals.size != d:
            raise RecipeError(f"diag recipe has {vals.size} values for dimension {d}")
        return np.diag(vals).astype(complex)
    if r.name == "scaled-h0":
        return m.h0.astype(complex)
    if r.name == "random":
        return random_hermitian(np.random.default_rng(r.seed), d)
    if r.name == "banded-random":
        x = np.zeros((d, d), dtype=complex)
        for i in range(d):
            for j in range(i, min(d, i + r.bandwidth + 1)):
                z = np.random.default_rng((r.seed, i, j)).standard_normal(2)
                x[i, j] = z[0] if i == j else complex(z[0], z[1]) / math.sqrt(2.0)
                x[j, i] = np.conj(x[i, j])
        return x
    if r.name == "file":
        if r.path is None:
            raise RecipeError("file recipe needs a path")
        x = matrix_from_dict(json.loads(Path(r.path).read_text()))
        if x.shape != (d, d):
            raise RecipeError(f"matrix file has dimension {x.shape[0]}, model has {d}")
        return x
    raise RecipeError(f"unknown recipe {r.name!r}; choose from {', '.join(RECIPES)}")


def make_family(family: str, dim: int, omega: float = 1.0, seed: int = 0) -> GibbsModel:
    if family == "oscillator":
        return make_oscillator(dim, omega)
    if family == "random":
        return make_random_model(dim, seed)
    raise RecipeError(f"family {family!r} cannot be swept")


def sweep_quantity(m: GibbsModel, quantity: str, recipe: Recipe, a: float = 1.0,
                   beta: float = 0.5, b: float = 1.0) -> float:
    if quantity == "beta-profile":
        return float(np.sum(m.rho0_eigenvalues**beta))
    x = hermitian(recipe.build(m))
    if quantity == "bkm":
        return bkm_inner(m.rho0, x, x)
    if quantity == "norm":
        return luxemburg_norm(m, x, a)
    if quantity == "phi":
        return phi(m, x).value
    if quantity == "kato-profile":
        return float(kato_profile(m, x, [b])[0, 1])
    raise RecipeError(f"unknown sweep quantity {quantity!r}")


def sweep(family: str, dims, quantity: str, recipe: Recipe, omega: float = 1.0,
          seed: int = 0, **kw) -> list[tuple[int, float, float]]:
    """Rows ``(dim, value, drift)`` with ``drift = |value - previous value|`` (``nan`` on the first row)."""
    if not recipe.extendable:
        raise RecipeError("a fixed matrix file cannot be rebuilt at other dimensions")
    rows = []
    prev = math.nan
    for d in dims:
        v = sweep_quantity(make_family(family, int(d), omega, seed), quantity, recipe, **kw)
        rows.append((int(d), v, abs(v - prev)))
        prev = v
    return rows
