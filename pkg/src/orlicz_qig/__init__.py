"""Orlicz-space tools for finite-dimensional quantum information geometry."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConvergenceError,
    DomainError,
    MagnitudeError,
    NotPSDError,
    NumericDegradationError,
    SaturationError,
)
from .states import (  # noqa: E402
    GibbsModel,
    load_model,
    make_diagonal_model,
    make_oscillator,
    make_random_model,
    perturb,
    save_model,
)
from .quantum_young import luxemburg_norm, phi, phi_gradient  # noqa: E402
from .bkm import bkm_inner, relative_entropy  # noqa: E402
from .duality import CotangentVector, conjugate_phi, dual_luxemburg_norm  # noqa: E402

__all__ = [
    "__version__",
    "ConvergenceError",
    "DomainError",
    "MagnitudeError",
    "NotPSDError",
    "NumericDegradationError",
    "SaturationError",
    "GibbsModel",
    "load_model",
    "make_diagonal_model",
    "make_oscillator",
    "make_random_model",
    "perturb",
    "save_model",
    "luxemburg_norm",
    "phi",
    "phi_gradient",
    "bkm_inner",
    "relative_entropy",
    "CotangentVector",
    "conjugate_phi",
    "dual_luxemburg_norm",
]
