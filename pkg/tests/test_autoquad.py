import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from expmde.autoquad import (
    AutoQuadConfig,
    Outcome,
    estimate_rate,
    expm_auto,
    next_mesh,
    predict_error,
)
from expmde.errors import DegenerateEstimate, MeshFloor


def _rel(X, E):
    return np.linalg.norm(X - E, 2) / np.linalg.norm(E, 2)


def test_estimate_rate_exact_inversion():
    rho, gamma = estimate_rate(1.0, 0.5, math.exp(-1), math.exp(-2))
    assert rho == pytest.approx(1.0, rel=1e-15)
    assert gamma == pytest.approx(1.0, rel=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(0.5, 20.0), st.floats(0.05, 1.0))
def test_estimate_rate_recovers_model(gamma0, rho0, h1):
    h2 = h1 / 2
    # keep both model errors in the normal double range
    assume(rho0 / h2 < 600)
    e1, e2 = gamma0 * math.exp(-rho0 / h1), gamma0 * math.exp(-rho0 / h2)
    rho, gamma = estimate_rate(h1, h2, e1, e2)
    assert rho == pytest.approx(rho0, rel=1e-10)
    assert gamma == pytest.approx(gamma0, rel=1e-8)


def test_estimate_rate_synthetic():
    h1, h2 = 0.4, 0.2
    e1, e2 = 3 * math.exp(-5 / h1), 3 * math.exp(-5 / h2)
    rho, gamma = estimate_rate(h1, h2, e1, e2)
    assert rho == pytest.approx(5.0, rel=1e-14)
    assert gamma == pytest.approx(3.0, rel=1e-13)


def test_estimate_rate_degenerate():
    with pytest.raises(DegenerateEstimate):
        estimate_rate(0.4, 0.2, 1e-5, 1e-5)
    with pytest.raises(DegenerateEstimate):
        estimate_rate(0.4, 0.2, 1e-5, 0.0)
    with pytest.raises(DegenerateEstimate):
        estimate_rate(0.4, 0.2, 1e-6, 1e-5)
    with pytest.raises(ValueError):
        estimate_rate(0.2, 0.4, 1e-5, 1e-6)


def test_predict_error():
    assert predict_error(1.0, 1.0, 1.0) == pytest.approx(math.exp(-1))
    assert predict_error(5.0, 3.0, 0.25) == pytest.approx(3 * math.exp(-20), rel=1e-15)
    hs = [0.4, 0.2, 0.1, 0.05]
    vals = [predict_error(2.0, 1.0, h) for h in hs]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_next_mesh():
    assert next_mesh(5.0, 1.0, 10.0, 1e-12) == pytest.approx(5 / math.log(1e11), rel=1e-15)
    for rho, gamma, eps in ((3.0, 2.0, 1e-10), (7.5, 0.3, 1e-6)):
        h4 = next_mesh(rho, gamma, 10.0, eps)
        assert predict_error(rho, gamma, h4) == pytest.approx(10 * eps, rel=1e-12)
    with pytest.raises(MeshFloor):
        next_mesh(0.01, 1.0, 10.0, 1e-14, h_min=1e-3)


def test_config_validation():
    with pytest.raises(ValueError):
        AutoQuadConfig(eps=0.0)
    with pytest.raises(ValueError):
        AutoQuadConfig(eps=1e-8, h1=1e-4)
    with pytest.raises(ValueError):
        AutoQuadConfig(eps=1e-8, sigma=0.5)
    with pytest.raises(ValueError):
        AutoQuadConfig(eps=1e-8, stall_factor=1.0)


def test_minus_identity():
    res, rep = expm_auto(-np.eye(3), AutoQuadConfig(eps=1e-10))
    assert np.abs(res.X - math.exp(-1) * np.eye(3)).max() <= 1e-10
    assert rep.final_interval is res.interval


@pytest.mark.parametrize("eps", [1e-6, 1e-10])
def test_a1_reaches_target(golden, eps):
    res, rep = expm_auto(golden["A1"], AutoQuadConfig(eps=eps), mode="split")
    err = _rel(res.X, golden["E1"])
    assert err <= max(eps, 5e-13)
    if rep.outcome is Outcome.PREDICTED_CONVERGED:
        assert err <= 10 * 10 * eps


def test_zero_trial_errors_short_circuit(monkeypatch):
    # all three meshes agreeing to the last bit looks like eps1 = eps2 = 0
    import expmde.autoquad as aq

    monkeypatch.setattr(aq, "norm2_estimate", lambda M: 0.0)
    res, rep = expm_auto(-np.eye(2), AutoQuadConfig(eps=1e-8))
    assert rep.outcome is Outcome.PREDICTED_CONVERGED
    assert rep.rounds[0].action == "converged-degenerate"
    assert rep.assemblies == 3
    assert rep.final_h == pytest.approx(0.1)
    assert rep.rounds[0].rho is None


def test_report_invariants(golden):
    cfg = AutoQuadConfig(eps=1e-12, h1=0.8)
    res, rep = expm_auto(golden["A2"], cfg, mode="split")
    h3s = [r.h3 for r in rep.rounds]
    assert all(b < a for a, b in zip(h3s, h3s[1:]))
    assert rep.assemblies <= cfg.max_rounds * 4
    for r in rep.rounds:
        if r.rho is not None:
            assert r.eps1 > r.eps2 > 0
    if rep.outcome is Outcome.REFINED_ONCE:
        assert rep.h4 is not None and rep.refine_change is not None


def test_slide_and_floor():
    # a stalled error sequence: every round slides until the floor or cap
    rng = np.random.default_rng(0)
    A = -np.eye(4) + 0.1 * rng.standard_normal((4, 4))
    cfg = AutoQuadConfig(eps=1e-300, h1=0.4, h_min=0.03, max_rounds=8)
    res, rep = expm_auto(A, cfg)
    assert rep.outcome in (Outcome.HIT_MESH_FLOOR, Outcome.EXHAUSTED_ROUNDS,
                           Outcome.PREDICTED_CONVERGED, Outcome.REFINED_ONCE)
    assert rep.assemblies <= cfg.max_rounds * 4
    assert np.isfinite(res.X).all()
