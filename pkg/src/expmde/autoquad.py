"""Automatic mesh-size selection for the DE matrix exponential.

The error of the DE sum is modelled as ``gamma * exp(-rho / h)``.  Three
trial meshes h1 > h2 = h1/2 > h3 = h1/4 are summed; treating the finest
result X3 as exact, ``eps_i = ||X_i - X3||_2`` (i = 1, 2) fixes rho and
gamma.  If the model predicts ``eps3 < eta * eps`` X3 is returned, otherwise
one more sum at ``h4 = rho / log(gamma / (eta eps))`` is returned.  When the
two trial errors do not decrease convincingly the mesh triple slides down
one step and the estimate is repeated.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .densela import as_matrix, norm2_estimate, rightmost_eigenvalue
from .detransform import Variant, make_params
from .errors import DegenerateEstimate, MeshFloor
from .quadrature import (
    DEFAULT_SIGMA,
    EvalMode,
    QuadResult,
    _MAX_EXP,
    expm_de_core,
    shifted_matrix,
)
from .truncation import DEFAULT_TERMS, TruncationInterval, get_interval

__all__ = [
    "AutoQuadConfig",
    "AutoQuadReport",
    "Outcome",
    "RoundRecord",
    "estimate_rate",
    "expm_auto",
    "next_mesh",
    "predict_error",
]


class Outcome(enum.Enum):
    PREDICTED_CONVERGED = "PredictedConverged"
    REFINED_ONCE = "RefinedOnce"
    EXHAUSTED_ROUNDS = "ExhaustedRounds"
    HIT_MESH_FLOOR = "HitMeshFloor"


@dataclass(frozen=True)
class AutoQuadConfig:
    eps: float
    sigma: float = DEFAULT_SIGMA
    h1: float = 0.4
    eta: float = 10.0
    h_min: float = 1e-3
    max_rounds: int = 8
    stall_factor: float = 2.0

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not self.sigma < 0:
            raise ValueError("sigma must be negative")
        if not self.h1 > self.h_min > 0:
            raise ValueError("need h1 > h_min > 0")
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if not self.stall_factor > 1:
            raise ValueError("stall_factor must exceed 1")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")


@dataclass
class RoundRecord:
    h1: float
    h2: float
    h3: float
    eps1: float
    eps2: float
    rho: float | None = None
    gamma: float | None = None
    eps3_pred: float | None = None
    action: str = ""


@dataclass
class AutoQuadReport:
    rounds: list = field(default_factory=list)
    final_h: float = 0.0
    final_interval: TruncationInterval | None = None
    outcome: Outcome = Outcome.EXHAUSTED_ROUNDS
    h4: float | None = None
    # ||X4 - X3||_2 on the refinement path, for after-the-fact checking
    refine_change: float | None = None
    assemblies: int = 0


def estimate_rate(h1, h2, eps1, eps2):
    """Solve ``eps_i = gamma exp(-rho / h_i)`` for ``(rho, gamma)``."""
    if not h1 > h2 > 0:
        raise ValueError("need h1 > h2 > 0")
    if not eps2 > 0 or not eps1 > eps2:
        raise DegenerateEstimate(
            f"trial errors eps1={eps1:.3e}, eps2={eps2:.3e} give no positive rate"
        )
    rho = h1 * h2 / (h1 - h2) * math.log(eps1 / eps2)
    gamma = eps1 * math.exp(rho / h1)
    return rho, gamma


def predict_error(rho, gamma, h):
    return gamma * math.exp(-rho / h)


def next_mesh(rho, gamma, eta, eps, h_min=0.0):
    """Mesh size at which the model predicts an error of ``eta * eps``."""
    h4 = rho / math.log(gamma / (eta * eps))
    if h4 < h_min:
        raise MeshFloor(f"required mesh {h4:.3e} is below h_min={h_min:.3e}", h=h4)
    return h4


def expm_auto(A, cfg: AutoQuadConfig, mode=EvalMode.DIRECT,
              variant=Variant.OOURA1999, terms=DEFAULT_TERMS, threads=1,
              shift="eigenvalue", lambda_right=None, callback=None):
    """Matrix exponential with automatically chosen mesh size.

    Returns ``(QuadResult, AutoQuadReport)``.  The loop is bounded by
    ``cfg.max_rounds`` mesh slides; the report's ``outcome`` says how it
    ended.  The best available result is always returned.

    ``callback(h, X)``, if given, is called after every assembly with the
    mesh size and the scaled approximation of ``e^A`` at that mesh.
    """
    A = as_matrix(A)
    mode = EvalMode(mode)
    lam = rightmost_eigenvalue(A) if lambda_right is None else complex(lambda_right)
    At, shift_applied = shifted_matrix(A, lam, cfg.sigma, shift)
    report = AutoQuadReport()

    def assemble(h):
        p = make_params(h, variant)
        iv = get_interval(p, cfg.sigma, cfg.eps / 2.0, terms)
        report.assemblies += 1
        X = expm_de_core(At, p, iv, mode, threads)
        if callback is not None:
            callback(h, np.exp(shift_applied) * X)
        return X, p, iv

    hs = [cfg.h1, cfg.h1 / 2.0, cfg.h1 / 4.0]
    runs = [assemble(h) for h in hs]

    def finish(X, p, iv, outcome):
        report.final_h = p.h
        report.final_interval = iv
        report.outcome = outcome
        scaled = shift_applied.real <= _MAX_EXP
        if scaled:
            X = np.exp(shift_applied) * X
        res = QuadResult(X=X, interval=iv, params=p, mode=mode,
                         shift_applied=shift_applied, nodes_evaluated=iv.nodes,
                         scaled=scaled, lambda_right=lam, sigma=cfg.sigma)
        return res, report

    for _ in range(cfg.max_rounds):
        X3 = runs[2][0]
        e1 = norm2_estimate(runs[0][0] - X3)
        e2 = norm2_estimate(runs[1][0] - X3)
        rec = RoundRecord(h1=hs[0], h2=hs[1], h3=hs[2], eps1=e1, eps2=e2)
        report.rounds.append(rec)

        if e2 == 0.0 or e1 == e2:
            # indistinguishable at working precision
            rec.action = "converged-degenerate"
            return finish(*runs[2], Outcome.PREDICTED_CONVERGED)

        slide = e1 <= cfg.stall_factor * e2
        if not slide:
            rho, gamma = estimate_rate(hs[0], hs[1], e1, e2)
            rec.rho, rec.gamma = rho, gamma
            rec.eps3_pred = predict_error(rho, gamma, hs[2])
            if rec.eps3_pred < cfg.eta * cfg.eps:
                rec.action = "accept-h3"
                return finish(*runs[2], Outcome.PREDICTED_CONVERGED)
            try:
                h4 = next_mesh(rho, gamma, cfg.eta, cfg.eps, cfg.h_min)
            except MeshFloor:
                slide = True
            else:
                rec.action = "refine"
                report.h4 = h4
                X4, p4, iv4 = assemble(h4)
                report.refine_change = norm2_estimate(X4 - X3)
                return finish(X4, p4, iv4, Outcome.REFINED_ONCE)

        h_next = hs[2] / 2.0
        if h_next < cfg.h_min:
            rec.action = "mesh-floor"
            return finish(*runs[2], Outcome.HIT_MESH_FLOOR)
        rec.action = "slide"
        hs = [hs[1], hs[2], h_next]
        runs = [runs[1], runs[2], assemble(h_next)]

    return finish(*runs[2], Outcome.EXHAUSTED_ROUNDS)
