"""Reference matrix exponentials used to measure errors.

``expm_pade`` is degree-13 diagonal Padé with scaling and squaring, scaled
until the 1-norm is below 5.37.  ``expm_taylor`` is a plain truncated power
series for small-norm matrices and shares no code with the Padé path, so the
two can check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .densela import as_matrix, lu_factor, lu_solve, norm_1

__all__ = ["PADE13_COEFFS", "PadeConfig", "expm_pade", "expm_taylor"]

# b_j = (26 - j)! 13! / (26! (13 - j)! j!) scaled to integers
PADE13_COEFFS = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)


@dataclass(frozen=True)
class PadeConfig:
    scaling_threshold: float = 5.37
    degree: int = 13

    def __post_init__(self):
        if not self.scaling_threshold > 0:
            raise ValueError("scaling_threshold must be positive")
        if self.degree != 13:
            raise ValueError("only the [13/13] approximant is implemented")


def expm_pade(A, cfg: PadeConfig = PadeConfig()) -> np.ndarray:
    """``e^A`` by [13/13] Padé approximation with scaling and squaring."""
    A = as_matrix(A)
    n = A.shape[0]
    nrm = norm_1(A)
    if nrm == 0.0:
        # V - U = b0 I; the LU solve would round b0/b0
        return np.eye(n, dtype=np.complex128)
    s = 0
    if nrm > cfg.scaling_threshold:
        s = max(0, math.ceil(math.log2(nrm / cfg.scaling_threshold)))
    As = A / 2.0**s
    b = PADE13_COEFFS
    I = np.eye(n, dtype=np.complex128)
    A2 = As @ As
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = As @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
              + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I)
    R = lu_solve(lu_factor(V - U), V + U)
    for _ in range(s):
        R = R @ R
    return R


def expm_taylor(A, terms: int = 30) -> np.ndarray:
    """Partial sum ``sum_{j<=terms} A^j / j!``; requires ``||A||_1 <= 1``."""
    A = as_matrix(A)
    if norm_1(A) > 1.0:
        raise ValueError("expm_taylor needs ||A||_1 <= 1; scale the matrix first")
    n = A.shape[0]
    term = np.eye(n, dtype=np.complex128)
    total = term.copy()
    for j in range(1, terms + 1):
        term = term @ A / j
        total = total + term
    return total
