"""Truncation of the infinite trapezoidal sum to a finite node range.

For a matrix whose spectrum (and numerical range) lies left of ``sigma < 0``
the two tails of ``sum_k h F_h(kh)`` are bounded by

    left:   (h / pi) * sum_{k < l} x_h'(kh)
    right:  4 pi (1 + sqrt 2) / |sigma| * sum_{k > r} k u(kh)

``get_interval`` picks the narrowest [l, r] for which both are at most
``eps / 2``.  The infinite sums are cut after ``terms`` summands; they decay
double exponentially so 50 is plenty.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .densela import as_matrix, lu_factor, lu_solve, norm2_estimate
from .detransform import DEParams, _u, phi, phi_deriv
from .errors import IntervalOverflow, InvalidTolerance

__all__ = [
    "DEFAULT_TERMS",
    "MAX_INDEX",
    "TruncationInterval",
    "check_left_condition",
    "get_interval",
    "left_tail",
    "right_tail",
    "verify_prop1_bound",
]

DEFAULT_TERMS = 50
MAX_INDEX = 10**6
_CROUZEIX = 1.0 + math.sqrt(2.0)


@dataclass(frozen=True)
class TruncationInterval:
    l: int
    r: int
    left_bound: float
    right_bound: float
    epsilon: float

    @property
    def nodes(self) -> int:
        return self.r - self.l + 1

    def indices(self) -> np.ndarray:
        return np.arange(self.l, self.r + 1)


def left_tail(p: DEParams, l: int, terms: int = DEFAULT_TERMS) -> float:
    """``(h/pi) * sum_{k=l-terms}^{l-1} x_h'(kh)``."""
    if terms < 1:
        raise ValueError("terms must be >= 1")
    k = np.arange(l - terms, l)
    return p.h / math.pi * float(np.sum(phi_deriv(p, k * p.h)))


def _right_sum(p, r, terms):
    k = np.arange(r + 1, r + 1 + terms)
    return float(np.sum(k * _u(p, k * p.h)))


def right_tail(p: DEParams, r: int, sigma: float, terms: int = DEFAULT_TERMS) -> float:
    """``4 pi (1 + sqrt 2) / |sigma| * sum_{k=r+1}^{r+terms} k u(kh)``."""
    if not sigma < 0.0:
        raise ValueError(f"sigma must be negative, got {sigma}")
    if r < 1:
        raise ValueError("r must be >= 1")
    if terms < 1:
        raise ValueError("terms must be >= 1")
    return 4.0 * math.pi * _CROUZEIX / abs(sigma) * _right_sum(p, r, terms)


def get_interval(
    p: DEParams, sigma: float, eps: float, terms: int = DEFAULT_TERMS
) -> TruncationInterval:
    """Narrowest node range whose truncation error is bounded by ``eps``.

    ``l`` is the largest integer with ``left_tail(l) <= eps/2`` (scanning down
    from 0) and ``r`` the smallest ``r >= 1`` with ``right_tail(r) <= eps/2``.
    ``l`` is clamped to at most -1 so the range always straddles t = 0.
    """
    if not (eps > 0.0) or not math.isfinite(eps):
        raise InvalidTolerance(f"tolerance must be positive, got {eps}")
    if not sigma < 0.0:
        raise ValueError(f"sigma must be negative, got {sigma}")
    half = 0.5 * eps

    l = 0
    lb = left_tail(p, l, terms)
    while lb > half:
        l -= 1
        if -l > MAX_INDEX:
            raise IntervalOverflow(f"left end beyond -{MAX_INDEX} for eps={eps}")
        lb = left_tail(p, l, terms)
    if l > -1:
        l = -1
        lb = left_tail(p, l, terms)

    r = 1
    rb = right_tail(p, r, sigma, terms)
    while rb > half:
        r += 1
        if r > MAX_INDEX:
            raise IntervalOverflow(f"right end beyond {MAX_INDEX} for eps={eps}")
        rb = right_tail(p, r, sigma, terms)
    return TruncationInterval(l=l, r=r, left_bound=lb, right_bound=rb, epsilon=eps)


def _resolvent_norm(A, shift):
    n = A.shape[0]
    f = lu_factor(A + shift * np.eye(n))
    return norm2_estimate(lu_solve(f, np.eye(n)))


def verify_prop1_bound(
    p: DEParams, A, iv: TruncationInterval, terms: int = DEFAULT_TERMS
) -> float:
    """Full tail bound with measured resolvent norms instead of ``1/|sigma|``.

    Returns ``left + right`` where

        left  = (h/pi) sum_{k<l} x_h'(kh)
        right = 2 pi sum_{k>r} k u(kh) (||(A + i x I)^-1|| + ||(A - i x I)^-1||)

    with ``x = x_h(kh)`` and 2-norms from :func:`norm2_estimate`.  Summands
    whose ``k u(kh)`` has underflowed are skipped without a solve.
    """
    A = as_matrix(A)
    left = left_tail(p, iv.l, terms)
    right = 0.0
    for k in range(iv.r + 1, iv.r + 1 + terms):
        w = k * float(_u(p, k * p.h))
        if w == 0.0:
            continue
        x = phi(p, k * p.h)
        right += w * (_resolvent_norm(A, 1j * x) + _resolvent_norm(A, -1j * x))
    return left + 2.0 * math.pi * right


def check_left_condition(p: DEParams, A, l: int) -> bool:
    """Whether ``x_h(lh) <= 1 / sqrt(2 ||A^-2||_2)`` holds.

    This is the hypothesis under which the left tail bound is valid; it is
    not part of the interval selection because that only sees ``sigma``.
    """
    A = as_matrix(A)
    n = A.shape[0]
    f = lu_factor(A)
    inv2 = lu_solve(f, lu_solve(f, np.eye(n)))
    bound = 1.0 / math.sqrt(2.0 * norm2_estimate(inv2))
    ok = phi(p, l * p.h) <= bound
    if not ok:
        warnings.warn(
            f"x_h(lh) = {phi(p, l * p.h):.3e} exceeds 1/sqrt(2||A^-2||) = {bound:.3e}; "
            "the left truncation bound is not guaranteed",
            RuntimeWarning,
            stacklevel=2,
        )
    return ok
