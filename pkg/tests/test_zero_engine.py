import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ahpairs import zero_engine as ze
from ahpairs.errors import DomainTooSmall, UnresolvedBlock

import oracles


# -- theta ---------------------------------------------------------------------

@pytest.mark.parametrize("t", [10.0, 14.1, 17.8456, 50.0, 100.0, 1234.5, 1e5, 1e7])
def test_theta_matches_mpmath(t):
    ref = oracles.theta_mp(t)
    # 1e-10 absolute, or a few ulps once theta itself is too large for that
    assert ze.riemann_siegel_theta(t) == pytest.approx(ref, abs=max(1e-10, 4 * np.spacing(ref)))


def test_theta_at_100():
    # the multiprecision value is 87.97216..., not 87.9606
    assert ze.riemann_siegel_theta(100.0) == pytest.approx(87.972165, abs=1e-6)


def test_theta_vanishes_at_first_gram_point():
    assert ze.riemann_siegel_theta(oracles.gram_mp(0)) == pytest.approx(0.0, abs=1e-10)


def test_theta_domain():
    with pytest.raises(DomainTooSmall):
        ze.riemann_siegel_theta(9.99)
    with pytest.raises(DomainTooSmall):
        ze.hardy_z(5.0)


@given(st.floats(10, 1e6), st.floats(1e-6, 1e3))
def test_theta_increasing(t, dt):
    assert ze.riemann_siegel_theta(t + dt) > ze.riemann_siegel_theta(t)


def test_smooth_count_below_ten_uses_loggamma():
    assert ze.smooth_count(5.0) == pytest.approx(oracles.theta_mp(5.0) / math.pi + 1, abs=1e-12)


# -- Hardy Z -------------------------------------------------------------------

@pytest.mark.parametrize(
    "t", [10.0, 14.134725, 20.0, 99.9, 150.0, 199.99, 200.01, 250.0, 1000.0, 5000.5, 17777.7]
)
def test_hardy_z_matches_mpmath(t):
    assert ze.hardy_z(t) == pytest.approx(oracles.z_mp(t), abs=1e-8)


def test_hardy_z_large_height():
    t = 1e6 + 0.123
    assert ze.hardy_z(t) == pytest.approx(oracles.z_mp(t), abs=1e-8)


def test_first_zero_and_bracket():
    assert abs(ze.hardy_z(14.134725)) < 1e-5
    assert np.sign(ze.hardy_z(14.0)) != np.sign(ze.hardy_z(15.0))


def test_hardy_z_vectorised_is_real():
    t = np.linspace(10, 400, 57)
    z = ze.hardy_z(t)
    assert z.dtype == np.float64 and z.shape == t.shape
    assert np.allclose(z, [ze.hardy_z(float(x)) for x in t], atol=1e-12)


# -- Gram points ----------------------------------------------------------------

@pytest.mark.parametrize("n, expected", [(0, 17.8456), (1, 23.1703)])
def test_gram_point_examples(n, expected):
    assert ze.gram_point(n).t == pytest.approx(expected, abs=1e-4)


@pytest.mark.parametrize("n", [-1, 0, 1, 10, 126, 5000])
def test_gram_point_matches_mpmath(n):
    g = ze.gram_point(n)
    assert g.index == n
    assert g.t == pytest.approx(oracles.gram_mp(n), abs=1e-9)


def test_gram_points_increasing_and_accurate():
    g = ze.gram_points(np.arange(-1, 3000))
    assert np.all(np.diff(g) > 0)
    th = ze.smooth_count(g) - 1.0
    assert np.max(np.abs(th * math.pi - np.arange(-1, 3000) * math.pi)) < 1e-9


def test_gram_point_rejects_small_index():
    with pytest.raises(ValueError):
        ze.gram_point(-2)


# -- zeros -----------------------------------------------------------------------

def test_find_zeros_first_three():
    z = ze.find_zeros(10, 30, 1e-6)
    assert [o.gamma for o in z] == pytest.approx([14.134725, 21.022040, 25.010858], abs=1e-6)
    assert all(o.precision <= 1e-6 for o in z)


def test_find_zeros_empty_below_first():
    assert ze.find_zeros(10, 14, 1e-6) == []


def test_find_zeros_count_to_1000():
    assert len(ze.find_zeros(10, 1000, 1e-6)) == 649


def test_zeros_match_mpmath_table():
    ref = oracles.mpmath_zeros(1000)
    got = ze.zero_ordinates(10, ref[-1] + 0.1)
    assert got.size == 1000
    assert np.max(np.abs(got - ref)) < 1e-8


@pytest.mark.parametrize("T, n", [(0, 0), (10, 0), (14.0, 0), (14.2, 1), (100, 29), (1000, 649)])
def test_count_zeros(T, n):
    assert ze.count_zeros(T) == n


@pytest.mark.parametrize("lo, hi", [(10, 250), (100, 900), (997.3, 2011.7), (5000, 5300)])
def test_count_certification(lo, hi):
    found = ze.zero_ordinates(lo, hi)
    assert found.size == ze.count_zeros(hi) - ze.count_zeros(lo)


def test_count_at_exact_ordinate_is_right_limit():
    g = ze.zero_ordinates(10, 30)
    assert ze.count_zeros(float(g[1])) in (1, 2)  # g[1] is within 1e-9 of the zero
    assert ze.count_zeros(float(g[1]) + 1e-7) == 2
    assert ze.count_zeros(float(g[1]) - 1e-7) == 1


def test_refinement_brackets_sign_change():
    # Z carries ~1e-13 rounding noise from the phase (theta ~ 1e3), so an
    # endpoint landing on the zero itself is widened by 1e-12 relative
    for o in ze.find_zeros(1000, 1100, 1e-9):
        assert o.precision <= 1e-9
        eta = 1e-12 * o.gamma
        lo, hi = o.gamma - o.precision - eta, o.gamma + o.precision + eta
        assert np.sign(ze.hardy_z(lo)) != np.sign(ze.hardy_z(hi))
        assert lo <= oracles.mpmath_zero_near(o.gamma) <= hi


def test_deterministic():
    a = ze.zero_ordinates(500, 800)
    b = ze.zero_ordinates(500, 800)
    assert a.tobytes() == b.tobytes()


def test_lehmer_style_close_pair_resolved():
    # a well-known close pair near t = 7005.06 (Gram law failures nearby)
    z = ze.zero_ordinates(7004.5, 7006)
    assert z.size == ze.count_zeros(7006) - ze.count_zeros(7004.5)
    assert np.min(np.diff(z)) < 0.05


def test_validate_range():
    with pytest.raises(DomainTooSmall):
        ze.find_zeros(5, 30)
    with pytest.raises(ValueError):
        ze.find_zeros(30, 20)
    with pytest.raises(ValueError):
        ze.find_zeros(10, 30, tol=1e-12)


def test_unresolved_block_is_reported(monkeypatch):
    # a Z that never changes sign inside blocks cannot satisfy the Gram count
    monkeypatch.setattr(ze, "MAX_DEPTH", 2)
    real = ze._hardy_z_unchecked

    def fake(t):
        out = real(t)
        bad = (t > 1000) & (t < 1010)
        out[bad] = np.abs(out[bad]) + 1.0
        return out

    monkeypatch.setattr(ze, "_hardy_z_unchecked", fake)
    with pytest.raises(UnresolvedBlock) as info:
        ze.zero_ordinates(990, 1020)
    assert info.value.expected != info.value.found


# -- S(t) ----------------------------------------------------------------------------

def test_s_at_100():
    # 29 - theta(100)/pi - 1 with the multiprecision theta
    expected = 29 - oracles.theta_mp(100.0) / math.pi - 1
    assert ze.s_function(100.0) == pytest.approx(expected, abs=1e-9)
    assert expected == pytest.approx(-0.00241, abs=1e-4)


def test_s_jumps_by_one_at_first_zero():
    g1 = 14.134725141734695
    jump = ze.s_function(g1 + 1e-6) - ze.s_function(g1 - 1e-6)
    assert jump == pytest.approx(1.0, abs=1e-5)


def test_s_mean_near_zero():
    # exact integral of N over [100, 1000] minus a quadrature of theta
    from scipy.integrate import quad

    g = ze.zero_ordinates(10, 1000)
    lo, hi = 100.0, 1000.0
    int_n = ze.count_zeros(lo) * (hi - lo) + np.sum(hi - g[g > lo])
    int_theta = quad(lambda t: oracles.theta_mp(t) / math.pi + 1, lo, hi, limit=200)[0]
    assert abs((int_n - int_theta) / (hi - lo)) < 0.05


def test_s_bounded_sample():
    for t in (150.0, 1234.5, 9999.0, 17000.25):
        assert abs(ze.s_function(t)) < 4


# -- Gram's law -----------------------------------------------------------------------

def test_gram_law_fraction_low_range():
    g = ze.zero_ordinates(10, 1000)
    assert ze.gram_law_fraction(g, 10, 1000) > 0.9


def test_gram_law_fraction_regression(zeros20k):
    # measured value on [10, 18000]; below the 0.9 hoped for, see notes
    frac = ze.gram_law_fraction(zeros20k.ordinates, 10, 18000)
    assert frac == pytest.approx(0.824, abs=0.01)
