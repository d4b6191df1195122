import math

import numpy as np
import pytest

from expmde.matgen import ConvDiffSpec, convection_diffusion
from expmde.reference import expm_pade
from expmde.talbot import TalbotParams, contour, expm_talbot


def _rel(X, E):
    return np.linalg.norm(X - E, 2) / np.linalg.norm(E, 2)


def test_params_validation():
    with pytest.raises(ValueError):
        TalbotParams(m=7)
    with pytest.raises(ValueError):
        TalbotParams(m=0)


def test_contour_symmetry():
    z, dz = contour(TalbotParams(m=16))
    assert np.allclose(z[::-1], z.conj())
    assert np.allclose(dz[::-1], -dz.conj())


def test_contour_derivative():
    p = TalbotParams(m=16)
    th = -math.pi + (np.arange(16) + 0.5) * (2 * math.pi / 16)
    zf = lambda t: 16 * (-p.sigma_t + p.mu_t * t / np.tan(p.alpha_t * t) + 1j * p.nu_t * t)
    fd = (zf(th + 1e-6) - zf(th - 1e-6)) / 2e-6
    assert np.allclose(contour(p)[1], fd, rtol=1e-6)


def test_scalar():
    assert abs(expm_talbot(-np.eye(1), 32)[0, 0] - math.exp(-1)) <= 1e-10


def test_hermitian_diag():
    A = np.diag(-np.arange(1.0, 101.0))
    E = np.diag(np.exp(-np.arange(1.0, 101.0)))
    assert _rel(expm_talbot(A, 64), E) <= 1e-8


def test_geometric_convergence():
    A = np.diag(-np.linspace(0.5, 60, 30))
    E = np.diag(np.exp(-np.linspace(0.5, 60, 30)))
    errs = [_rel(expm_talbot(A, m), E) for m in (8, 16, 24, 32)]
    for a, b in zip(errs, errs[1:]):
        assert b < a / 10 or b < 1e-13


def test_real_input_gives_real_output():
    A = convection_diffusion(ConvDiffSpec(grid_n=5, d=0.01, c=(0.2, 0.2)))
    X = expm_talbot(A, 32)
    assert not np.iscomplexobj(X)
    # full complex sum over all nodes agrees with the half sum

    full = expm_talbot(A.astype(complex) + 1e-30j * np.eye(A.shape[0]), 32)
    assert np.abs(full.imag).max() <= 1e-13 * np.abs(X).max()
    assert np.allclose(full.real, X, rtol=1e-12, atol=1e-14)


def test_stagnates_for_large_imaginary_spectrum():
    # strong convection puts eigenvalues ~60i away from the real axis
    A = convection_diffusion(ConvDiffSpec(grid_n=10, d=0.001, c=(3.0, 3.0)))
    E = expm_pade(A).real
    best = min(_rel(expm_talbot(A, m), E) for m in (16, 32, 64, 128, 256, 512))
    assert best >= 1e-2
