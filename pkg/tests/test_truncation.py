import math

import mpmath as mp
import numpy as np
import pytest

import oracles
from expmde import truncation
from expmde.detransform import make_params, phi
from expmde.errors import IntervalOverflow, InvalidTolerance
from expmde.matgen import test_matrix
from expmde.quadrature import shifted_matrix
from expmde.densela import rightmost_eigenvalue
from expmde.truncation import (
    check_left_condition,
    get_interval,
    left_tail,
    right_tail,
    verify_prop1_bound,
)

GOLDEN_INTERVAL = (-59, 48)  # h = 0.1, sigma = -2.5, eps = 2.2e-16


def test_left_tail_underflow_is_zero():
    assert left_tail(make_params(0.05), -300) == 0.0


def test_left_tail_long_sum_oracle():
    h, l = 0.05, -40
    hh = mp.mpf(h)
    ref = hh / mp.pi * mp.fsum(oracles.phi_deriv(k * hh, h) for k in range(l - 500, l))
    assert left_tail(make_params(h), l, terms=500) == pytest.approx(float(ref), abs=1e-16)


def test_left_tail_fifty_terms_near_interval_end():
    # where the interval ends the tail is tiny and 50 terms capture it
    p = make_params(0.05)
    l = get_interval(p, -2.5, 2.2e-16).l
    hh = mp.mpf(0.05)
    ref = hh / mp.pi * mp.fsum(oracles.phi_deriv(k * hh, 0.05) for k in range(l - 500, l))
    assert left_tail(p, l) == pytest.approx(float(ref), rel=1e-12)


@pytest.mark.parametrize("h", [0.2, 0.1])
def test_left_tail_first_term_dominates(h):
    p = make_params(h)
    assert abs(left_tail(p, -100, terms=1) - left_tail(p, -100, terms=50)) <= 1e-30


def test_left_tail_decay_not_yet_double_exponential_at_small_h():
    # at h = 0.05, t = -5 the terms still shrink only by ~e^-0.4 per step
    p = make_params(0.05)
    one, fifty = left_tail(p, -100, terms=1), left_tail(p, -100, terms=50)
    assert fifty > 2 * one


def test_right_tail_long_sum_oracle():
    h, r, sigma = 0.05, 60, 2.5
    hh = mp.mpf(h)
    s = mp.fsum(k * oracles.u(k * hh, h) for k in range(r + 1, r + 501))
    ref = 4 * mp.pi * (1 + mp.sqrt(2)) / sigma * s
    assert right_tail(make_params(h), r, -sigma) == pytest.approx(float(ref), abs=1e-16)


def test_right_tail_scaling_and_underflow():
    p = make_params(0.1)
    assert right_tail(p, 20, -5.0) == 0.5 * right_tail(p, 20, -2.5)
    assert right_tail(p, 5000, -2.5) == 0.0
    with pytest.raises(ValueError):
        right_tail(p, 20, 0.0)
    with pytest.raises(ValueError):
        right_tail(p, 0, -1.0)


def test_golden_interval():
    iv = get_interval(make_params(0.1), -2.5, 2.2e-16)
    assert (iv.l, iv.r) == GOLDEN_INTERVAL
    assert iv.left_bound <= 1.1e-16 and iv.right_bound <= 1.1e-16
    assert iv.nodes == iv.r - iv.l + 1
    assert list(iv.indices()) == list(range(iv.l, iv.r + 1))


def test_interval_is_minimal():
    p = make_params(0.1)
    iv = get_interval(p, -2.5, 2.2e-16)
    assert left_tail(p, iv.l + 1) > 1.1e-16
    assert right_tail(p, iv.r - 1, -2.5) > 1.1e-16


@pytest.mark.parametrize("h", [0.2, 0.1, 0.05])
def test_interval_monotone_in_eps(h):
    p = make_params(h)
    loose = get_interval(p, -2.5, 1e-8)
    tight = get_interval(p, -2.5, 1e-16)
    assert tight.l <= loose.l and loose.r <= tight.r


def test_huge_eps_is_clamped():
    iv = get_interval(make_params(0.1), -2.5, 1e10)
    assert iv.l <= -1 and iv.r >= 1 and iv.l < iv.r


def test_bad_arguments():
    p = make_params(0.1)
    for eps in (0.0, -1.0, float("nan"), float("inf")):
        with pytest.raises(InvalidTolerance):
            get_interval(p, -2.5, eps)
    with pytest.raises(ValueError):
        get_interval(p, 0.0, 1e-8)


def test_interval_overflow(monkeypatch):
    monkeypatch.setattr(truncation, "MAX_INDEX", 10)
    with pytest.raises(IntervalOverflow):
        get_interval(make_params(0.05), -2.5, 1e-16)


def test_fifty_terms_suffice_on_grid():
    for h in (0.2, 0.1, 0.05):
        p = make_params(h)
        for eps in (1e-8, 1e-12, 2.2e-16):
            for sigma in (-0.5, -2.5, -5.0):
                a = get_interval(p, sigma, eps, terms=50)
                b = get_interval(p, sigma, eps, terms=500)
                assert (a.l, a.r) == (b.l, b.r)


def test_prop1_bound_minus_identity():
    p = make_params(0.1)
    iv = get_interval(p, -1.0, 1e-16)
    assert verify_prop1_bound(p, -np.eye(3), iv) < 1e-15


def test_prop1_bound_scalar_closed_form():
    p = make_params(0.2)
    iv = get_interval(p, -1.0, 1e-6)
    got = verify_prop1_bound(p, np.array([[-1.0]]), iv)
    right = 0.0
    for k in range(iv.r + 1, iv.r + 51):
        x = phi(p, k * 0.2)
        uk = float(truncation._u(p, k * 0.2))
        right += k * uk * 2.0 / abs(-1 + 1j * x)
    expect = left_tail(p, iv.l) + 2 * math.pi * right
    assert got == pytest.approx(expect, rel=1e-14)


@pytest.mark.parametrize("k", [1, 2])
def test_left_condition_on_test_matrices(k):
    A = test_matrix(k)
    At, _ = shifted_matrix(A, rightmost_eigenvalue(A), -2.5)
    for h in (0.2, 0.1, 0.05):
        p = make_params(h)
        assert check_left_condition(p, At, get_interval(p, -2.5, 2.2e-16).l)


def test_left_condition_warns():
    # tiny eigenvalue makes ||A^-2|| huge
    A = np.diag([-1e-9, -1.0])
    with pytest.warns(RuntimeWarning):
        assert not check_left_condition(make_params(0.1), A, -1)
