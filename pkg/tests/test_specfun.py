import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riceie.errors import DomainError
from riceie.specfun import (
    ScaledValue,
    bessel_i_half,
    bessel_i_scaled,
    erf,
    exp_scaled_i0,
    gaussian_q,
    ive,
    ive_half,
    ln_gamma,
    log_bessel_i_orders,
    struve_l_half,
)

from oracles import (
    bessel_i_series,
    erf_series,
    gaussian_q_series,
    ln_gamma_stirling,
    mp,
    rel,
    struve_l_series,
)


# ---------------------------------------------------------------- ScaledValue


@given(st.floats(min_value=-1e300, max_value=1e300, allow_nan=False, allow_subnormal=False))
def test_scaled_value_round_trip(v):
    sv = ScaledValue.from_real(v)
    if v != 0:
        assert 1 / math.e <= abs(sv.mantissa) < math.e
    assert sv.to_real() == pytest.approx(v, rel=1e-15, abs=0)


def test_scaled_value_holds_values_beyond_double_range():
    big = ScaledValue.from_log(1000.0)
    small = ScaledValue.from_log(-1000.0)
    assert big.to_real() == math.inf
    assert (big * small).to_real() == pytest.approx(1.0, rel=1e-14)
    assert big.scale_by_exp(-1000.0).to_real() == pytest.approx(1.0, rel=1e-14)


# ---------------------------------------------------------------- ln_gamma


def test_ln_gamma_trivial():
    assert ln_gamma(1.0) == 0.0
    assert ln_gamma(2.0) == 0.0


def test_ln_gamma_matches_stirling_oracle():
    # frozen from the Stirling/recurrence oracle at 40 digits
    assert ln_gamma(7.5) == pytest.approx(7.534364236758732955, rel=1e-14)
    for x in [0.5, 0.75, 1.5, 3.3, 7.5, 25.0, 99.9, 200.0]:
        ref = ln_gamma_stirling(x)
        assert abs(ln_gamma(x) - float(ref)) <= 1e-13 * max(abs(float(ref)), 1.0)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
def test_ln_gamma_domain(x):
    with pytest.raises(DomainError):
        ln_gamma(x)


# ---------------------------------------------------------------- erf / Q


def test_erf_values():
    assert erf(0.0) == 0.0
    assert erf(1.0) == pytest.approx(0.8427007929497148693, rel=1e-15)
    for x in [0.01, 0.3, 1.0, 2.5, 4.0, 6.0]:
        assert rel(erf(x), erf_series(x)) <= 1e-13


@given(st.floats(min_value=-50, max_value=50, allow_nan=False))
def test_erf_odd(x):
    assert erf(-x) == -erf(x)


def test_erf_and_q_monotone_on_grid():
    xs = np.linspace(-8, 8, 1000)
    e = np.array([erf(x) for x in xs])
    q = np.array([gaussian_q(x) for x in xs])
    core = np.abs(xs[:-1]) < 5
    assert np.all(np.diff(e) >= 0)
    assert np.all(np.diff(e)[core] > 0)
    assert np.all(np.diff(q) <= 0)
    assert np.all(np.diff(q)[core] < 0)


def test_gaussian_q_values():
    assert gaussian_q(0.0) == 0.5
    assert gaussian_q(1.0) == pytest.approx(0.15865525393145705141, rel=1e-14)
    for x in [-8.0, -3.0, -0.5, 0.7, 2.0, 5.0, 8.0]:
        assert rel(gaussian_q(x), gaussian_q_series(x)) <= 1e-12


@given(st.floats(min_value=-30, max_value=30, allow_nan=False))
def test_gaussian_q_symmetry(x):
    assert gaussian_q(x) + gaussian_q(-x) == pytest.approx(1.0, abs=2e-16)


# ---------------------------------------------------------------- Bessel I_n


def test_bessel_i_scaled_edges():
    assert bessel_i_scaled(0, 0.0).to_real() == 1.0
    assert bessel_i_scaled(1, 0.0).to_real() == 0.0
    assert bessel_i_scaled(0, 2.0).log_scale == 0.0
    # frozen from the ascending-series oracle
    assert bessel_i_scaled(0, 2.0).to_real() == pytest.approx(0.30850832255367103953, rel=1e-15)


def test_bessel_i_scaled_domain():
    with pytest.raises(DomainError):
        bessel_i_scaled(0, -1.0)
    with pytest.raises(DomainError):
        ive(-1, 1.0)


@pytest.mark.parametrize("n", [0, 1, 2, 3, 5, 10])
def test_ive_against_series_oracle(n):
    xs = list(np.linspace(0.05, 30, 13)) + list(np.geomspace(31, 500, 12))
    for x in xs:
        ref = mp.exp(-x) * bessel_i_series(n, x)
        assert rel(ive(n, x), ref) <= 1e-12, (n, x)


def test_scaled_unscaled_consistency():
    for n in range(0, 11):
        for x in np.linspace(0.1, 20, 15):
            assert rel(ive(n, x) * math.exp(x), bessel_i_series(n, x)) <= 1e-12


def test_ive_vectorised_matches_scalar():
    xs = np.array([0.0, 0.5, 29.9, 30.1, 120.0])
    vec = ive(1, xs)
    assert np.array_equal(vec, np.array([ive(1, float(x)) for x in xs]))


def test_log_bessel_orders_high_order():
    logs = log_bessel_i_orders(150, 40.0)
    for n in [0, 1, 20, 80, 150]:
        ref = mp.log(bessel_i_series(n, 40))
        assert abs(logs[n] - float(ref)) <= 1e-13 * abs(float(ref)) + 1e-13


def test_exp_scaled_i0_no_overflow():
    v = exp_scaled_i0(0.5, 800.0)
    assert math.isfinite(v) and v >= 0
    assert exp_scaled_i0(1.0, 800.0) == pytest.approx(float(ive(0, 800.0)))


# ---------------------------------------------------------------- half orders


def test_bessel_i_half_closed_form_n0():
    v = bessel_i_half(0, 1.0).to_real()
    assert v == pytest.approx((math.e - 1 / math.e) / math.sqrt(2 * math.pi), rel=1e-15)


def test_bessel_i_half_n1_x2():
    # frozen from the half-order series oracle
    assert bessel_i_half(1, 2.0).to_real() == pytest.approx(1.0994731886331096755, rel=1e-14)


@pytest.mark.parametrize("n", [0, 1, 2, 4, 10])
def test_bessel_i_half_against_series(n):
    for x in np.geomspace(1e-3, 300, 40):
        ref = bessel_i_series(n + 0.5, x)
        got = bessel_i_half(n, float(x))
        assert abs(float(got.log_abs() - mp.log(ref))) <= 1e-12, (n, x)


def test_bessel_i_half_large_argument_stays_scaled():
    v = bessel_i_half(0, 900.0)
    assert math.isfinite(v.mantissa)
    assert v.log_abs() == pytest.approx(900.0 - 0.5 * math.log(2 * math.pi * 900.0), rel=1e-15)


def test_bessel_i_half_domain():
    with pytest.raises(DomainError):
        bessel_i_half(0, 0.0)
    with pytest.raises(DomainError):
        ive_half(0.5, -1.0)
    with pytest.raises(DomainError):
        ive_half(1.0, 1.0)


def test_ive_half_minus_half():
    for x in [1e-6, 0.3, 3.0, 70.0]:
        ref = mp.exp(-x) * bessel_i_series(-0.5, x)
        assert rel(ive_half(-0.5, x), ref) <= 1e-13


# ---------------------------------------------------------------- Struve


def test_struve_closed_forms():
    for x in [1e-9, 1e-3, 0.5, 3.0, 40.0]:
        pref = math.sqrt(2 / (math.pi * x))
        assert struve_l_half(-0.5, x).to_real() == pytest.approx(pref * math.sinh(x), rel=1e-14)
        assert rel(struve_l_half(-0.5, x).to_real(), struve_l_series(-0.5, x)) <= 1e-13
        assert rel(struve_l_half(0.5, x).to_real(), struve_l_series(0.5, x)) <= 1e-13


def test_struve_half_vanishes_at_origin():
    assert struve_l_half(0.5, 1e-12).to_real() < 1e-17


@pytest.mark.parametrize("nu", [1.5, 2.5, 5.5, 10.5])
def test_struve_against_series(nu):
    for x in np.geomspace(1e-2, 100, 25):
        assert rel(struve_l_half(nu, float(x)).to_real(), struve_l_series(nu, x)) <= 1e-10


def test_struve_high_order_in_log_space():
    v = struve_l_half(120.5, 80.0)
    assert abs(float(v.log_abs() - mp.log(struve_l_series(120.5, 80)))) < 1e-10


@pytest.mark.parametrize("bad", [(0.0, 1.0), (-1.5, 1.0), (0.5, 0.0), (0.5, -2.0)])
def test_struve_domain(bad):
    with pytest.raises(DomainError):
        struve_l_half(*bad)


# ---------------------------------------------------------------- properties


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=1e-3, max_value=200.0))
def test_order_monotonicity_random(x):
    vals = [ive(0, x), ive_half(0.5, x), ive(1, x), ive_half(1.5, x), ive(2, x)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
