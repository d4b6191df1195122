"""Matrix exponential by double-exponential (DE) quadrature.

``e^A`` is computed from an integral of resolvents of ``A^2`` along the
positive real axis, discretized with an oscillation-adapted DE transform
and the trapezoidal rule.  Padé and Talbot-contour routines are included
as references.
"""

__version__ = "0.1.0"

from .autoquad import AutoQuadConfig, AutoQuadReport, Outcome, expm_auto
from .densela import eigenvalues, rightmost_eigenvalue
from .detransform import DEParams, Variant, make_params, phi, phi_deriv
from .errors import (
    DegenerateEstimate,
    ExpmDEError,
    IntervalOverflow,
    InvalidTolerance,
    MatrixMarketError,
    MeshFloor,
    NoConvergence,
    SingularMatrix,
)
from .matgen import convection_diffusion, randsvd, test_matrix
from .quadrature import EvalMode, QuadResult, expm_de, expm_de_core, expm_de_scalar, quad_term
from .reference import expm_pade, expm_taylor
from .talbot import expm_talbot
from .truncation import TruncationInterval, get_interval

__all__ = [
    "AutoQuadConfig",
    "AutoQuadReport",
    "DEParams",
    "DegenerateEstimate",
    "EvalMode",
    "ExpmDEError",
    "IntervalOverflow",
    "InvalidTolerance",
    "MatrixMarketError",
    "MeshFloor",
    "NoConvergence",
    "Outcome",
    "QuadResult",
    "SingularMatrix",
    "TruncationInterval",
    "Variant",
    "convection_diffusion",
    "eigenvalues",
    "expm_auto",
    "expm_de",
    "expm_de_core",
    "expm_de_scalar",
    "expm_pade",
    "expm_talbot",
    "expm_taylor",
    "get_interval",
    "make_params",
    "phi",
    "phi_deriv",
    "quad_term",
    "randsvd",
    "rightmost_eigenvalue",
    "test_matrix",
]
