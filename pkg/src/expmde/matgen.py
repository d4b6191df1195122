"""Test matrix generators.

All generators are deterministic functions of their arguments; random draws
come from ``numpy.random.default_rng(seed)`` (PCG64).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "ConvDiffSpec",
    "RandSvdSpec",
    "convection_diffusion",
    "randsvd",
    "test_diagonal",
    "test_matrix",
]


@dataclass(frozen=True)
class RandSvdSpec:
    n: int
    kappa: float = 100.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not self.kappa >= 1.0:
            raise ValueError("kappa must be >= 1")


@dataclass(frozen=True)
class ConvDiffSpec:
    grid_n: int
    d: float
    c: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.grid_n < 3:
            raise ValueError("grid_n must be >= 3")
        if not self.d > 0.0:
            raise ValueError("d must be positive")


def _random_unitary(rng, n):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    # fix column phases so Q is Haar distributed and reproducible
    d = np.diag(R)
    return Q * (d / np.abs(d))


def randsvd(spec: RandSvdSpec, rng=None) -> np.ndarray:
    """``U diag(s) V^H`` with random unitary U, V and geometrically spaced
    singular values from 1 down to ``1/kappa``, so ``cond_2 = kappa``."""
    rng = np.random.default_rng(spec.seed) if rng is None else rng
    n = spec.n
    U = _random_unitary(rng, n)
    V = _random_unitary(rng, n)
    if n == 1:
        s = np.ones(1)
    else:
        s = spec.kappa ** (-np.arange(n) / (n - 1))
    return (U * s) @ V.conj().T


def test_diagonal(k: int, n: int = 50, nu=None) -> np.ndarray:
    """``d_i = 1 - 10^{2k(i-1)/(n-1)} + i nu_i / 20`` for i = 1..n.

    ``nu`` defaults to zeros.
    """
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    i = np.arange(n)
    expo = 2.0 * k * i / (n - 1) if n > 1 else np.zeros(n)
    d = (1.0 - 10.0**expo).astype(np.complex128)
    if nu is not None:
        d = d + 1j * np.asarray(nu, dtype=float) / 20.0
    return d


def test_matrix(
    k: int, n: int = 50, seed: int = 0, kappa: float = 100.0, noise: bool = True
) -> np.ndarray:
    """``A_k = Z D_k Z^{-1}`` with ``Z = randsvd(n, kappa)``.

    ``nu_i`` are standard normal draws taken after Z from the same generator;
    ``noise=False`` sets them to zero.
    """
    rng = np.random.default_rng(seed)
    Z = randsvd(RandSvdSpec(n=n, kappa=kappa, seed=seed), rng=rng)
    nu = rng.standard_normal(n) if noise else np.zeros(n)
    D = test_diagonal(k, n, nu)
    return scipy.linalg.solve(Z.T, (Z * D).T).T


def convection_diffusion(spec: ConvDiffSpec) -> np.ndarray:
    """Centered finite differences for ``d Lap u - c . grad u`` on (0,1)^2.

    Homogeneous Dirichlet boundary, ``grid_n`` interior points per axis,
    unknowns ordered with x fastest.  Returns a dense real matrix.
    """
    m = spec.grid_n
    hx = 1.0 / (m + 1)
    cx, cy = spec.c
    diff = spec.d / hx**2
    # 1-D operators: tridiag(lower, diag, upper)
    Tx = (np.diag(np.full(m - 1, diff + cx / (2 * hx)), -1)
          + np.diag(np.full(m, -2.0 * diff))
          + np.diag(np.full(m - 1, diff - cx / (2 * hx)), 1))
    Ty = (np.diag(np.full(m - 1, diff + cy / (2 * hx)), -1)
          + np.diag(np.full(m, -2.0 * diff))
          + np.diag(np.full(m - 1, diff - cy / (2 * hx)), 1))
    I = np.eye(m)
    return np.kron(I, Tx) + np.kron(Ty, I)


# keep pytest from collecting the generators when they are imported in tests
test_diagonal.__test__ = False
test_matrix.__test__ = False
