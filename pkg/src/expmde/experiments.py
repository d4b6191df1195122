"""Experiment drivers behind the command-line tool.

Each driver returns plain row dicts so the CLI can write them as CSV and
tests can inspect them directly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .autoquad import AutoQuadConfig, expm_auto
from .densela import as_matrix, rightmost_eigenvalue
from .detransform import make_params
from .errors import SingularMatrix
from .matgen import ConvDiffSpec, convection_diffusion
from .quadrature import (
    DEFAULT_EPS,
    DEFAULT_SIGMA,
    EvalMode,
    expm_de,
    expm_de_core,
    expm_de_scalar,
    shifted_matrix,
)
from .reference import expm_pade
from .talbot import expm_talbot
from .truncation import get_interval

__all__ = [
    "DEFAULT_COMPARE_H",
    "DEFAULT_TALBOT_M",
    "ScalarMapConfig",
    "compare_methods",
    "rel_error",
    "run_autoquad",
    "scalar_error",
    "scalar_map",
    "shift_sweep",
]

DEFAULT_COMPARE_H = (0.2, 0.1, 0.05, 0.025, 0.0125)
DEFAULT_TALBOT_M = (8, 16, 24, 32, 48, 64, 96, 128, 192, 256, 384, 512)
# interval used for sweep points with sigma >= 0, where none can be derived
FALLBACK_SIGMA = DEFAULT_SIGMA


def rel_error(X, E) -> float:
    """``||X - E||_2 / ||E||_2`` with exact (SVD) 2-norms."""
    return float(np.linalg.norm(X - E, 2) / np.linalg.norm(E, 2))


def scalar_error(z, h, eps=DEFAULT_EPS, exact=None):
    """Absolute error of the DE sum for ``e^z``.

    The truncation interval is built with ``sigma = Re(z)``.  ``exact``
    defaults to the double-precision ``e^z``.
    """
    z = complex(z)
    if not z.real < 0:
        raise ValueError("Re(z) must be negative")
    p = make_params(h)
    iv = get_interval(p, z.real, eps)
    approx = expm_de_scalar(z, p, iv)
    ref = cmath.exp(z) if exact is None else complex(exact)
    return abs(approx - ref)


@dataclass(frozen=True)
class ScalarMapConfig:
    hs: tuple = (0.2, 0.1, 0.05)
    re_range: tuple = (-30.0, 10.0)
    im_range: tuple = (-20.0, 20.0)
    grid: int = 41
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        lo, hi = self.re_range
        ilo, ihi = self.im_range
        if not (lo < hi and ilo < ihi):
            raise ValueError("ranges must satisfy lo < hi")
        if self.grid < 1:
            raise ValueError("grid must be positive")
        if not self.hs or any(not h > 0 for h in self.hs):
            raise ValueError("mesh sizes must be positive")


def scalar_map(cfg: ScalarMapConfig):
    """Error of the scalar DE formula on a ``grid x grid`` window.

    Cells with ``Re(z) >= 0`` have ``abs_error`` NaN and ``valid`` False.
    """
    res = np.linspace(*cfg.re_range, cfg.grid) if cfg.grid > 1 else np.array([cfg.re_range[0]])
    ims = np.linspace(*cfg.im_range, cfg.grid) if cfg.grid > 1 else np.array([cfg.im_range[0]])
    rows = []
    for h in cfg.hs:
        p = make_params(h)
        for re in res:
            if re < 0:
                iv = get_interval(p, float(re), cfg.eps)
                z = re + 1j * ims
                err = np.abs(expm_de_scalar(z, p, iv) - np.exp(z))
            for j, im in enumerate(ims):
                valid = bool(re < 0)
                rows.append({
                    "re": float(re),
                    "im": float(im),
                    "h": float(h),
                    "abs_error": float(err[j]) if valid else math.nan,
                    "valid": valid,
                })
    return rows


def shift_sweep(A, sigmas, h=0.05, eps=DEFAULT_EPS, mode=EvalMode.SPLIT,
                reference=None, shift="eigenvalue"):
    """Relative 2-norm error of the fixed-mesh DE result against ``sigma``.

    For ``sigma >= 0`` the integral representation does not hold; such rows
    are still computed, using the truncation interval for ``FALLBACK_SIGMA``,
    and flagged with ``sigma_nonneg``.  A singular resolvent gives an
    infinite error and ``status`` "singular" instead of an exception.
    """
    A = as_matrix(A)
    E = expm_pade(A) if reference is None else reference
    lam = rightmost_eigenvalue(A)
    p = make_params(h)
    rows = []
    for s in sigmas:
        s = float(s)
        nonneg = s >= 0
        iv = get_interval(p, FALLBACK_SIGMA if nonneg else s, eps)
        At, sh = shifted_matrix(A, lam, s, shift)
        status = "ok"
        try:
            X = np.exp(sh) * expm_de_core(At, p, iv, mode)
            err = rel_error(X, E)
        except SingularMatrix:
            err, status = math.inf, "singular"
        if status == "ok" and not math.isfinite(err):
            err, status = math.inf, "nonfinite"
        rows.append({"sigma": s, "rel_error_2norm": err, "sigma_nonneg": nonneg,
                     "status": status})
    return rows


@dataclass
class AutoQuadRun:
    rows: list = field(default_factory=list)
    trace: list = field(default_factory=list)


def run_autoquad(A, eps_list, mode=EvalMode.SPLIT, reference=None,
                 sigma=DEFAULT_SIGMA, eta=10.0, h1=0.4, shift="eigenvalue"):
    """Run the automatic quadrature for each target in ``eps_list``.

    ``rows`` has one summary per target.  ``trace`` lists the error of
    every mesh assembled along the way, keyed by target.
    """
    A = as_matrix(A)
    E = expm_pade(A) if reference is None else reference
    lam = rightmost_eigenvalue(A)
    out = AutoQuadRun()
    for eps in eps_list:
        eps = float(eps)
        seen = []

        def record(h, X, _seen=seen):
            _seen.append((h, rel_error(X, E)))

        cfg = AutoQuadConfig(eps=eps, sigma=sigma, eta=eta, h1=h1)
        res, rep = expm_auto(A, cfg, mode=mode, lambda_right=lam,
                             shift=shift, callback=record)
        last = rep.rounds[-1]
        out.rows.append({
            "eps_target": eps,
            "eps_measured": rel_error(res.X, E),
            "final_h": rep.final_h,
            "rounds": len(rep.rounds),
            "outcome": rep.outcome.value,
            "eps3_pred": last.eps3_pred if last.eps3_pred is not None else math.nan,
            "nodes": res.nodes_evaluated,
        })
        for h, err in seen:
            out.trace.append({"eps_target": eps, "h": h, "inv_h": 1.0 / h, "error": err})
    return out


def compare_methods(d, c=(0.2, 0.2), grid_n=15, methods=("de", "talbot"),
                    hs=DEFAULT_COMPARE_H, ms=DEFAULT_TALBOT_M, sigma=DEFAULT_SIGMA,
                    eps=DEFAULT_EPS, mode=EvalMode.SPLIT, shift="eigenvalue",
                    reference=None):
    """Convergence histories of DE and Talbot on the conv-diff surrogate.

    Rows carry ``method``, ``param`` (h or m), ``nodes`` and ``rel_error``
    against the Padé result for ``e^A`` (t = 1).
    """
    A = convection_diffusion(ConvDiffSpec(grid_n=grid_n, d=d, c=tuple(c)))
    E = expm_pade(A).real if reference is None else reference
    rows = []
    if "de" in methods:
        lam = rightmost_eigenvalue(A)
        for h in hs:
            r = expm_de(A, h=h, eps=eps, sigma=sigma, mode=mode,
                        lambda_right=lam, shift=shift)
            rows.append({"method": "de", "param": float(h),
                         "nodes": r.nodes_evaluated, "rel_error": rel_error(r.X, E)})
    if "talbot" in methods:
        for m in ms:
            X = expm_talbot(A, int(m))
            err = rel_error(X, E)
            rows.append({"method": "talbot", "param": float(m), "nodes": int(m),
                         "rel_error": err if math.isfinite(err) else math.inf})
    return rows
