"""Fixed-mesh DE quadrature for the matrix exponential.

For ``A`` with spectrum in the open left half plane,

    e^A = (2/pi) int_0^inf x sin(x) (x^2 I + A^2)^{-1} dx,

and substituting ``x = x_h(t)`` and applying the trapezoidal rule gives

    e^A ~ sum_{k=l}^{r} h x_h'(kh) sin(x_h(kh)) G(x_h(kh)),
    G(x) = (2/pi) x (x^2 I + A^2)^{-1}.

A general ``A`` is first shifted so that its rightmost eigenvalue sits at
``sigma < 0``; the shift is undone by the scalar factor
``exp(lambda_right - sigma)``.
"""

from __future__ import annotations

import enum
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .densela import as_matrix, lu_factor, lu_solve, rightmost_eigenvalue
from .detransform import DEParams, Variant, _u, make_params, phi, phi_deriv
from .errors import SingularMatrix
from .truncation import (
    DEFAULT_TERMS,
    TruncationInterval,
    check_left_condition,
    get_interval,
)

__all__ = [
    "DEFAULT_EPS",
    "DEFAULT_H",
    "DEFAULT_SIGMA",
    "EvalMode",
    "QuadResult",
    "expm_de",
    "expm_de_core",
    "expm_de_scalar",
    "node_weights",
    "quad_term",
    "shifted_matrix",
]

DEFAULT_SIGMA = -2.5
DEFAULT_H = 0.05
DEFAULT_EPS = float(np.finfo(float).eps)
# exp() overflows past this
_MAX_EXP = 709.0


class EvalMode(enum.Enum):
    DIRECT = "direct"
    SPLIT = "split"


@dataclass
class QuadResult:
    """Result of :func:`expm_de`.

    ``X`` is the approximation of ``e^A``.  When ``exp(shift_applied)``
    would overflow, ``X`` is left unscaled, ``scaled`` is False, and
    ``e^A = exp(shift_applied) * X`` is up to the caller.
    """

    X: np.ndarray
    interval: TruncationInterval
    params: DEParams
    mode: EvalMode
    shift_applied: complex
    nodes_evaluated: int
    scaled: bool = True
    lambda_right: complex = 0j
    sigma: float = DEFAULT_SIGMA

    @property
    def scale(self) -> complex:
        return complex(np.exp(self.shift_applied))


def node_weights(p: DEParams, k):
    """Nodes ``x_h(kh)`` and scalar weights ``h x_h'(kh) sin(x_h(kh))``.

    For k >= 1 the sine is evaluated as ``(-1)^k sin(k pi u(kh))``, which
    keeps full relative accuracy where ``x_h(kh)`` is within rounding of a
    multiple of pi.
    """
    k = np.atleast_1d(np.asarray(k))
    t = k * p.h
    x = np.asarray(phi(p, t), dtype=float)
    dx = np.asarray(phi_deriv(p, t), dtype=float)
    s = np.sin(x)
    pos = k >= 1
    if np.any(pos):
        kp = k[pos]
        with np.errstate(under="ignore"):
            s[pos] = np.where(kp % 2 == 0, 1.0, -1.0) * np.sin(
                kp * math.pi * _u(p, kp * p.h)
            )
    return x, p.h * dx * s


def _resolvent_term(A, A2, x, w, mode, k):
    n = A.shape[0]
    eye = np.eye(n)
    try:
        if mode is EvalMode.DIRECT:
            Y = lu_solve(lu_factor(A2 + (x * x) * eye), eye)
            return (w * 2.0 / math.pi * x) * Y
        # (x^2 + A^2)^-1 = i/(2x) [(ixI + A)^-1 - (-ixI + A)^-1]
        Yp = lu_solve(lu_factor(A + (1j * x) * eye), eye)
        Ym = lu_solve(lu_factor(A - (1j * x) * eye), eye)
        return (w * 1j / math.pi) * (Yp - Ym)
    except SingularMatrix as exc:
        raise SingularMatrix(f"resolvent singular at node k={k}: {exc}", node=k) from exc


def quad_term(p: DEParams, k: int, A, mode=EvalMode.DIRECT, A2=None) -> np.ndarray:
    """The summand ``h F_h(kh, A)``."""
    A = as_matrix(A)
    mode = EvalMode(mode)
    if A2 is None and mode is EvalMode.DIRECT:
        A2 = A @ A
    x, w = node_weights(p, k)
    if w[0] == 0.0:
        return np.zeros_like(A)
    return _resolvent_term(A, A2, float(x[0]), float(w[0]), mode, int(k))


class _KahanSum:
    """Compensated elementwise accumulation of equally shaped arrays."""

    def __init__(self, shape):
        self.total = np.zeros(shape, dtype=np.complex128)
        self._c = np.zeros(shape, dtype=np.complex128)

    def add(self, term):
        y = term - self._c
        t = self.total + y
        self._c = (t - self.total) - y
        self.total = t


def expm_de_core(
    A_shifted, p: DEParams, iv: TruncationInterval, mode=EvalMode.DIRECT, threads=1
) -> np.ndarray:
    """``sum_{k=l}^{r} h F_h(kh, A_shifted)`` in ascending k.

    With ``threads > 1`` the resolvents are computed concurrently in chunks
    but still reduced in ascending k, so the result does not depend on the
    thread count.
    """
    A = as_matrix(A_shifted)
    mode = EvalMode(mode)
    A2 = A @ A if mode is EvalMode.DIRECT else None
    ks = iv.indices()
    xs, ws = node_weights(p, ks)
    jobs = [(float(x), float(w), int(k)) for k, x, w in zip(ks, xs, ws) if w != 0.0]
    acc = _KahanSum(A.shape)

    def term(job):
        x, w, k = job
        return _resolvent_term(A, A2, x, w, mode, k)

    if threads <= 1:
        for job in jobs:
            acc.add(term(job))
    else:
        chunk = 4 * threads
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for start in range(0, len(jobs), chunk):
                for T in pool.map(term, jobs[start : start + chunk]):
                    acc.add(T)
    return acc.total


def shifted_matrix(A, lam, sigma, shift="eigenvalue"):
    """Shift ``A`` so its rightmost eigenvalue has real part ``sigma``.

    ``shift="eigenvalue"`` subtracts ``lam - sigma``, moving the rightmost
    eigenvalue itself onto ``sigma``.  ``shift="real"`` subtracts only the
    real part ``Re(lam) - sigma``, which leaves the imaginary parts of the
    spectrum where they are; for real matrices with a complex rightmost pair
    this keeps the spectrum symmetric and avoids doubling its imaginary
    extent.  Returns ``(A_shifted, s)`` with ``e^A = e^s e^{A_shifted}``.
    """
    lam = complex(lam)
    if shift == "eigenvalue":
        s = lam - sigma
    elif shift == "real":
        s = complex(lam.real - sigma)
    else:
        raise ValueError(f"shift must be 'eigenvalue' or 'real', got {shift!r}")
    n = A.shape[0]
    return A - s * np.eye(n), s


def expm_de(
    A,
    h=DEFAULT_H,
    eps=DEFAULT_EPS,
    sigma=DEFAULT_SIGMA,
    mode=EvalMode.DIRECT,
    variant=Variant.OOURA1999,
    terms=DEFAULT_TERMS,
    threads=1,
    check_condition=False,
    lambda_right=None,
    shift="eigenvalue",
) -> QuadResult:
    """Matrix exponential by DE quadrature with a fixed mesh size.

    Parameters
    ----------
    A : array_like, shape (n, n)
    h : float
        Mesh size of the trapezoidal rule.
    eps : float
        Bound on the truncation error (of the shifted exponential).
    sigma : float
        Target position of the rightmost eigenvalue after shifting; must be
        negative.  Values in [-5, 0) work best.
    mode : EvalMode or str
        ``"direct"`` solves with ``x^2 I + A^2`` (one factorization per
        node); ``"split"`` uses two factorizations of ``A +- i x I``, which is
        better conditioned.
    variant : Variant or str
        Which DE transform to use.
    terms : int
        Summands used for the tail sums in :func:`get_interval`.
    threads : int
        Worker threads for node evaluation; does not change the result.
    check_condition : bool
        Verify the left-tail hypothesis on the shifted matrix and warn if it
        fails.
    lambda_right : complex, optional
        Rightmost eigenvalue of ``A`` if already known.
    shift : {"eigenvalue", "real"}
        How the shift is formed, see :func:`shifted_matrix`.

    Returns
    -------
    QuadResult
    """
    A = as_matrix(A)
    if not sigma < 0.0:
        raise ValueError(f"sigma must be negative, got {sigma}")
    if not eps > 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    mode = EvalMode(mode)
    p = make_params(h, variant)
    lam = rightmost_eigenvalue(A) if lambda_right is None else complex(lambda_right)
    At, shift = shifted_matrix(A, lam, sigma, shift)
    iv = get_interval(p, sigma, eps, terms)
    if check_condition:
        check_left_condition(p, At, iv.l)
    Xt = expm_de_core(At, p, iv, mode, threads)
    scaled = shift.real <= _MAX_EXP
    if scaled:
        X = np.exp(shift) * Xt
    else:
        warnings.warn(
            f"exp({shift:.6g}) overflows; returning the unscaled result",
            RuntimeWarning,
            stacklevel=2,
        )
        X = Xt
    return QuadResult(
        X=X,
        interval=iv,
        params=p,
        mode=mode,
        shift_applied=shift,
        nodes_evaluated=iv.nodes,
        scaled=scaled,
        lambda_right=lam,
        sigma=sigma,
    )


def expm_de_scalar(z, p: DEParams, iv: TruncationInterval):
    """DE approximation of ``e^z`` for ``Re z < 0``, without shifting.

    ``z`` may be an array; the result has the same shape.
    """
    z = np.asarray(z, dtype=np.complex128)
    xs, ws = node_weights(p, iv.indices())
    keep = ws != 0.0
    xs, ws = xs[keep], ws[keep]
    zz = z.reshape(-1, 1) ** 2
    terms = ws * (2.0 / math.pi) * xs / (xs * xs + zz)
    out = terms.sum(axis=1)
    return complex(out[0]) if z.ndim == 0 else out.reshape(z.shape)
