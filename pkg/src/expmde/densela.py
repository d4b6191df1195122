"""Dense complex linear algebra kernels.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.  LU
factorization is delegated to LAPACK (``zgetrf``/``zgetrs`` through SciPy);
the eigenvalue solver is a self-contained Householder-Hessenberg reduction
followed by Wilkinson-shifted complex QR iteration.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numba import njit

from .errors import NoConvergence, SingularMatrix

__all__ = [
    "LUFactors",
    "as_matrix",
    "eigenvalues",
    "hessenberg",
    "lu_factor",
    "lu_solve",
    "norm2_estimate",
    "norm_1",
    "norm_fro",
    "norm_inf",
    "rightmost_eigenvalue",
    "sort_spectrum",
]

_EPS = np.finfo(float).eps


def as_matrix(A, square=True) -> np.ndarray:
    """Return ``A`` as a finite 2-D complex128 array.

    Raises ``ValueError`` for wrong dimensionality, non-square input (when
    ``square``) or NaN/Inf entries.
    """
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {M.shape}")
    if square and M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


@dataclass(frozen=True)
class LUFactors:
    """Partial-pivoting LU factors with ``M[perm] = L @ U``.

    ``lu`` holds the unit lower triangle L (diagonal implied) below the
    diagonal and U on and above it.  ``piv`` are the LAPACK row interchanges,
    ``perm`` the equivalent permutation of {0..n-1}.
    """

    lu: np.ndarray
    piv: np.ndarray
    perm: np.ndarray

    @property
    def n(self) -> int:
        return self.lu.shape[0]

    @property
    def L(self) -> np.ndarray:
        return np.tril(self.lu, -1) + np.eye(self.n)

    @property
    def U(self) -> np.ndarray:
        return np.triu(self.lu)


def _swaps_to_perm(piv):
    perm = np.arange(len(piv))
    for i, p in enumerate(piv):
        if p != i:
            perm[i], perm[p] = perm[p], perm[i]
    return perm


def lu_factor(M) -> LUFactors:
    """LU factorization with partial pivoting.

    Raises
    ------
    SingularMatrix
        If some pivot has magnitude below ``n * eps * ||M||_inf``.
    """
    M = as_matrix(M)
    n = M.shape[0]
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularMatrix
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, check_finite=False)
    threshold = n * _EPS * norm_inf(M)
    pivots = np.abs(np.diag(lu))
    if threshold == 0.0 or pivots.min() <= threshold:
        k = int(np.argmin(pivots))
        raise SingularMatrix(
            f"pivot {k} has magnitude {pivots[k]:.3e} <= {threshold:.3e}"
        )
    return LUFactors(lu=lu, piv=piv, perm=_swaps_to_perm(piv))


def lu_solve(f: LUFactors, B) -> np.ndarray:
    """Solve ``M X = B`` given ``f = lu_factor(M)``."""
    B = np.asarray(B, dtype=np.complex128)
    if B.shape[0] != f.n:
        raise ValueError(f"right-hand side has {B.shape[0]} rows, expected {f.n}")
    return scipy.linalg.lu_solve((f.lu, f.piv), B, check_finite=False)


def norm_1(A) -> float:
    return float(np.abs(np.asarray(A)).sum(axis=0).max())


def norm_inf(A) -> float:
    return float(np.abs(np.asarray(A)).sum(axis=1).max())


def norm_fro(A) -> float:
    return float(np.sqrt(np.sum(np.abs(np.asarray(A)) ** 2)))


def norm2_estimate(A, rtol=1e-6, maxiter=500, full_output=False):
    """Estimate ``||A||_2`` by power iteration on ``A^H A``.

    The start vector is all ones, so results are reproducible.  If the
    iteration cap is reached the Frobenius norm (an upper bound) is returned
    instead and a ``RuntimeWarning`` is issued.

    Parameters
    ----------
    A : array_like, shape (m, n)
    rtol : float
        Relative change between successive estimates at which to stop.
    maxiter : int
    full_output : bool
        If True, return ``(estimate, converged)``.
    """
    A = np.asarray(A, dtype=np.complex128)
    x = np.ones(A.shape[1], dtype=np.complex128) / np.sqrt(A.shape[1])
    est = 0.0
    converged = False
    for _ in range(maxiter):
        y = A @ x
        new = float(np.linalg.norm(y))
        if new == 0.0:
            # A = 0, or the start vector lies in the null space
            converged = True
            break
        z = A.conj().T @ y
        nz = float(np.linalg.norm(z))
        x = z / nz
        if abs(new - est) <= rtol * new:
            est = new
            converged = True
            break
        est = new
    if not converged:
        warnings.warn(
            "norm2_estimate hit the iteration cap; returning the Frobenius norm",
            RuntimeWarning,
            stacklevel=2,
        )
        est = norm_fro(A)
    if full_output:
        return est, converged
    return est


def hessenberg(A) -> np.ndarray:
    """Reduce ``A`` to upper Hessenberg form by Householder similarities."""
    H = as_matrix(A).copy()
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1 :, k]
        nx = np.linalg.norm(x)
        if nx == 0.0:
            continue
        x0 = x[0]
        phase = x0 / abs(x0) if x0 != 0 else 1.0
        v = x.copy()
        v[0] += phase * nx
        v /= np.linalg.norm(v)
        H[k + 1 :, k:] -= 2.0 * np.outer(v, v.conj() @ H[k + 1 :, k:])
        H[:, k + 1 :] -= 2.0 * np.outer(H[:, k + 1 :] @ v, v.conj())
        H[k + 2 :, k] = 0.0
    return H


@njit(cache=True)
def _wilkinson_shift(a, b, c, d):
    # eigenvalue of [[a, b], [c, d]] closest to d
    tr = 0.5 * (a + d)
    det = a * d - b * c
    disc = np.sqrt(tr * tr - det)
    l1 = tr + disc
    l2 = tr - disc
    if abs(l1 - d) <= abs(l2 - d):
        return l1
    return l2


@njit(cache=True)
def _qr_sweep(H, lo, hi, mu, cs, sn, ok):
    """Shifted QR step on the active block ``H[lo:hi+1, lo:hi+1]``.

    Computes ``B - mu I = QR`` with Givens rotations and overwrites the block
    with ``RQ + mu I``.  ``cs``, ``sn``, ``ok`` are scratch buffers.
    """
    for i in range(lo, hi + 1):
        H[i, i] -= mu
    for j in range(lo, hi):
        a = H[j, j]
        b = H[j + 1, j]
        r = np.hypot(abs(a), abs(b))
        if r == 0.0:
            ok[j] = False
            continue
        ok[j] = True
        c = a / r
        s = b / r
        cs[j] = c
        sn[j] = s
        for k in range(j, hi + 1):
            x = H[j, k]
            y = H[j + 1, k]
            H[j, k] = c.conjugate() * x + s.conjugate() * y
            H[j + 1, k] = -s * x + c * y
        H[j + 1, j] = 0.0
    for j in range(lo, hi):
        if not ok[j]:
            continue
        c = cs[j]
        s = sn[j]
        top = min(j + 2, hi)
        for i in range(lo, top + 1):
            x = H[i, j]
            y = H[i, j + 1]
            H[i, j] = c * x + s * y
            H[i, j + 1] = -s.conjugate() * x + c.conjugate() * y
    for i in range(lo, hi + 1):
        H[i, i] += mu


@njit(cache=True)
def _hessenberg_qr(H, tol, max_sweeps, scale):
    """Deflating QR iteration on Hessenberg ``H`` (overwritten).

    Returns ``(eigenvalues, ok)``; ``ok`` is False when the sweep cap is hit.
    """
    n = H.shape[0]
    lam = np.empty(n, dtype=np.complex128)
    cs = np.empty(n, dtype=np.complex128)
    sn = np.empty(n, dtype=np.complex128)
    ok = np.empty(n, dtype=np.bool_)
    hi = n - 1
    sweeps = 0
    its = 0
    while hi >= 0:
        if hi == 0:
            lam[0] = H[0, 0]
            break
        lo = hi
        while lo > 0:
            s = abs(H[lo, lo]) + abs(H[lo - 1, lo - 1])
            if s == 0.0:
                s = scale
            if abs(H[lo, lo - 1]) <= tol * s:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            lam[hi] = H[hi, hi]
            hi -= 1
            its = 0
            continue
        if sweeps >= max_sweeps:
            return lam[hi + 1 :], False
        its += 1
        if its % 11 == 10:
            # exceptional shift to break cycles
            mu = H[hi, hi] + abs(H[hi, hi - 1]) * (0.75 + 0.5j)
        else:
            mu = _wilkinson_shift(
                H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi]
            )
        _qr_sweep(H, lo, hi, mu, cs, sn, ok)
        sweeps += 1
    return lam, True


def sort_spectrum(lam, tie_tol=0.0) -> np.ndarray:
    """Sort by descending real part, ties by descending imaginary part.

    Real parts closer than ``tie_tol`` count as tied.
    """
    lam = np.asarray(lam, dtype=np.complex128)
    if lam.size == 0:
        return lam
    order = sorted(range(lam.size), key=lambda i: -lam[i].real)
    groups, cur = [], [order[0]]
    for i in order[1:]:
        if lam[cur[0]].real - lam[i].real <= tie_tol:
            cur.append(i)
        else:
            groups.append(cur)
            cur = [i]
    groups.append(cur)
    out = []
    for g in groups:
        out.extend(sorted(g, key=lambda i: (-lam[i].imag, -lam[i].real)))
    return lam[out]


def eigenvalues(A, tol=None, max_sweeps=None) -> np.ndarray:
    """All eigenvalues of a square matrix.

    Householder reduction to Hessenberg form, then complex QR iteration with
    Wilkinson shifts and deflation on negligible subdiagonals.

    Parameters
    ----------
    A : array_like, shape (n, n)
    tol : float, optional
        Relative deflation threshold for subdiagonal entries; defaults to
        machine epsilon.
    max_sweeps : int, optional
        Total QR sweep cap, default ``30 * n``.

    Returns
    -------
    ndarray of complex, length n, sorted as in :func:`sort_spectrum`.
    """
    H = hessenberg(A)
    n = H.shape[0]
    tol = _EPS if tol is None else tol
    max_sweeps = 30 * n if max_sweeps is None else max_sweeps
    scale = norm_fro(H)
    lam, ok = _hessenberg_qr(H, tol, max_sweeps, scale)
    if not ok:
        raise NoConvergence(
            f"QR iteration did not converge within {max_sweeps} sweeps "
            f"({n - len(lam)} eigenvalues undeflated)"
        )
    return sort_spectrum(lam, tie_tol=1e-10 * max(scale, 1.0) if n > 1 else 0.0)


def rightmost_eigenvalue(A, **kwargs) -> complex:
    """Eigenvalue of maximal real part; ties go to the larger imaginary part.

    Real parts that agree to ``1e-10 * ||A||_F`` are treated as tied so that
    computed conjugate pairs resolve deterministically.
    """
    return complex(eigenvalues(A, **kwargs)[0])
