"""Matrix Market input and output.

Reading goes through :func:`scipy.io.mmread` after a header check that
reports the offending line.  Writing is done here so the byte layout is
fixed: 17 significant digits, LF line endings, no generator comments.
"""

from __future__ import annotations

import io
import os

import numpy as np
import scipy.io
import scipy.sparse

from .errors import MatrixMarketError

__all__ = ["read_matrix", "write_array", "write_coordinate"]

_FORMATS = ("array", "coordinate")
_FIELDS = ("real", "complex", "integer")
_SYMMETRY = ("general", "symmetric", "hermitian", "skew-symmetric")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _check_header(lines, source):
    if not lines:
        raise MatrixMarketError(f"{source}: line 1: empty file")
    head = lines[0].split()
    if (
        len(head) != 5
        or head[0].lower() != "%%matrixmarket"
        or head[1].lower() != "matrix"
        or head[2].lower() not in _FORMATS
        or head[3].lower() not in _FIELDS
        or head[4].lower() not in _SYMMETRY
    ):
        raise MatrixMarketError(
            f"{source}: line 1: bad header {lines[0].strip()!r}; expected "
            "'%%MatrixMarket matrix <array|coordinate> <real|complex|integer> "
            "<general|symmetric|hermitian|skew-symmetric>'"
        )
    fmt = head[2].lower()
    for i, line in enumerate(lines[1:], start=2):
        s = line.strip()
        if not s or s.startswith("%"):
            continue
        want = 2 if fmt == "array" else 3
        parts = s.split()
        if len(parts) != want or not all(p.isdigit() for p in parts):
            raise MatrixMarketError(
                f"{source}: line {i}: bad size line {s!r}; expected {want} integers"
            )
        dims = [int(p) for p in parts]
        if dims[0] != dims[1]:
            raise MatrixMarketError(
                f"{source}: line {i}: matrix is {dims[0]}x{dims[1]}, not square"
            )
        return
    raise MatrixMarketError(f"{source}: line {len(lines)}: missing size line")


def read_matrix(path) -> np.ndarray:
    """Read a square Matrix Market file into a dense complex array.

    Array and coordinate formats with real, integer or complex entries are
    accepted; symmetric, skew-symmetric and Hermitian storage is expanded.
    """
    source = os.fspath(path)
    try:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise MatrixMarketError(f"{source}: cannot read: {exc}") from exc
    _check_header(text.splitlines(), source)
    try:
        M = scipy.io.mmread(io.StringIO(text))
    except Exception as exc:  # scipy raises assorted types on bad bodies
        raise MatrixMarketError(f"{source}: malformed body: {exc}") from exc
    if scipy.sparse.issparse(M):
        M = M.toarray()
    M = np.asarray(M, dtype=np.complex128)
    if not np.all(np.isfinite(M)):
        raise MatrixMarketError(f"{source}: non-finite entries")
    return M


def write_array(path, A, comment: str | None = None) -> None:
    """Write ``A`` as ``array complex general`` in column-major order."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2:
        raise ValueError("A must be two-dimensional")
    m, n = A.shape
    out = ["%%MatrixMarket matrix array complex general"]
    if comment:
        out.extend("% " + c for c in comment.splitlines())
    out.append(f"{m} {n}")
    for z in A.ravel(order="F"):
        out.append(f"{_fmt(z.real)} {_fmt(z.imag)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")


def write_coordinate(path, A, comment: str | None = None) -> None:
    """Write the nonzeros of ``A`` as ``coordinate real|complex general``.

    Entries are listed column by column, rows ascending within a column.
    """
    A = np.asarray(A)
    if A.ndim != 2:
        raise ValueError("A must be two-dimensional")
    real = not np.iscomplexobj(A) or not np.any(A.imag)
    C = scipy.sparse.csc_matrix(A.real if real else A)
    C.eliminate_zeros()
    C.sort_indices()
    m, n = A.shape
    out = [f"%%MatrixMarket matrix coordinate {'real' if real else 'complex'} general"]
    if comment:
        out.extend("% " + c for c in comment.splitlines())
    out.append(f"{m} {n} {C.nnz}")
    for j in range(n):
        for idx in range(C.indptr[j], C.indptr[j + 1]):
            v = C.data[idx]
            i = C.indices[idx]
            if real:
                out.append(f"{i + 1} {j + 1} {_fmt(float(v))}")
            else:
                out.append(f"{i + 1} {j + 1} {_fmt(v.real)} {_fmt(v.imag)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")
