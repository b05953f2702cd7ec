"""Tests for volume curves and their moment statistics.

Frozen values used below, each computed by hand from the closed forms:

  * linear curve, any n, V, threshold tau:   s_p = tau^p / (p + 1)
  * projective-space curve, dimension n, polarization scale n + 1:
        vol(x) = ((n + 1 - x) / (n + 1))^n * V,  tau = n + 1,
        s_p = (n + 1)^p * p! n! / (p + n)!
  * quadratic curve (1 - x)^2 with n = 2:    s_{3/2} = 8/35
"""

import math
from fractions import Fraction
from random import Random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deltap.errors import DomainError, InvariantViolation
from deltap.numeric import SqrtSum
from deltap.piecewise import PiecewisePolynomial, Polynomial
from deltap.volume_curve import (
    RadialProfile,
    VolumeCurve,
    curve_from_profile,
    random_admissible_curve,
)

F = Fraction


def linear_curve(n=1, V=F(1), tau=F(1)):
    return VolumeCurve(n, V, PiecewisePolynomial(
        (F(0), tau), (Polynomial((V, -V / tau)),)))


def projective_curve(n):
    """vol(x) = V * (1 - x/(n+1))^n with V = (n+1)^n; the curve of the
    anticanonical polarization of projective n-space along a coordinate
    hyperplane."""
    tau = F(n + 1)
    poly = Polynomial((F(1),))
    for _ in range(n):
        poly = poly * Polynomial((F(1), -F(1, n + 1)))
    V = F(n + 1) ** n
    return VolumeCurve(n, V, PiecewisePolynomial((F(0), tau),
                                                 (poly.scale(V),)))


def quadratic_curve():
    return VolumeCurve(2, F(1), PiecewisePolynomial(
        (F(0), F(1)), (Polynomial((F(1), F(-2), F(1))),)))


def corpus(seed=0, per_dim=8):
    out = []
    for n in (1, 2, 3):
        rng = Random(f"tests:{seed}:{n}")
        out.extend(random_admissible_curve(rng, n) for _ in range(per_dim))
    return out


# ---------------------------------------------------------------------------
# validation


def test_rejects_wrong_endpoints():
    with pytest.raises(InvariantViolation):
        VolumeCurve(1, F(2), PiecewisePolynomial(
            (F(0), F(1)), (Polynomial((F(1), F(-1))),)))
    with pytest.raises(InvariantViolation):
        VolumeCurve(1, F(1), PiecewisePolynomial(
            (F(0), F(1)), (Polynomial((F(1), F(-1, 2))),)))


def test_rejects_increasing_segment_with_witness():
    up = Polynomial((F(1), F(1)))           # rises 1 -> 5/4 on [0, 1/4]
    dn = Polynomial((F(5, 3), F(-5, 3)))    # falls 5/4 -> 0 on [1/4, 1]
    curve = PiecewisePolynomial((F(0), F(1, 4), F(1)), (up, dn),
                                continuous=True)
    with pytest.raises(InvariantViolation) as info:
        VolumeCurve(1, F(1), curve)
    assert "increases" in str(info.value)
    assert info.value.witness is not None


def test_rejects_root_concavity_failure():
    # convex decreasing (1 - x)^(1/2)-like data: vol = (1 - x)^4 with
    # n = 2 means vol^(1/2) = (1 - x)^2, strictly convex.
    poly = Polynomial((F(1),))
    for _ in range(4):
        poly = poly * Polynomial((F(1), F(-1)))
    with pytest.raises(InvariantViolation):
        VolumeCurve(2, F(1), PiecewisePolynomial((F(0), F(1)), (poly,)))


def test_degenerate_curve_basics():
    d = VolumeCurve.degenerate(2, F(5))
    assert d.is_degenerate
    assert d.s_p(3) == 0
    with pytest.raises(DomainError):
        d.h_stat(2)


# ---------------------------------------------------------------------------
# frozen moments


def test_linear_curve_moments():
    c = linear_curve(tau=F(2))
    for p in range(1, 7):
        assert c.s_p(p) == F(2) ** p / (p + 1)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_projective_curve_closed_form(n, p):
    c = projective_curve(n)
    expected = (F(n + 1) ** p * F(math.factorial(p) * math.factorial(n),
                                  math.factorial(p + n)))
    assert c.s_p(p) == expected


def test_density_route_equals_direct_route():
    for c in corpus(per_dim=5):
        for p in (1, 2, 3):
            assert c.s_p(p) == c.s_p_from_density(p)


def test_half_integer_moment_quadratic():
    # (3/2) * integral x^(1/2) (1-x)^2 dx over [0,1] = 8/35
    c = quadratic_curve()
    got = c.s_p_half(F(3, 2))
    assert (got - SqrtSum.from_rational(F(8, 35))).is_zero()


def test_half_integer_moment_linear_tau_two():
    # linear curve with tau = 2: s_p = 2^p/(p+1), so s_{3/2} = 2^(5/2)/5
    c = linear_curve(tau=F(2))
    got = c.s_p_half(F(3, 2))
    expected = SqrtSum.rational_power(F(2), F(5, 2)).scale(F(1, 5))
    assert (got - expected).is_zero()


def test_half_integer_moment_matches_float_route():
    for c in corpus(per_dim=3):
        for p in (F(3, 2), F(5, 2)):
            exact = float(c.s_p_half(p))
            approx = c.s_p_real(float(p), tol=1e-12)
            assert approx == pytest.approx(exact, rel=1e-9, abs=1e-12)


def test_s_p_real_agrees_with_exact_at_integers():
    c = projective_curve(2)
    for p in (1, 2, 5):
        assert c.s_p_real(float(p)) == pytest.approx(float(c.s_p(p)),
                                                     rel=1e-10)


def test_moment_rejects_bad_orders():
    c = linear_curve()
    with pytest.raises(DomainError):
        c.s_p(0)
    with pytest.raises(DomainError):
        c.s_p_half(F(1, 3))
    with pytest.raises(DomainError):
        c.s_p_real(0.5)


# ---------------------------------------------------------------------------
# bounds and monotone statistics


def test_barycenter_bounds_hold_exactly_on_corpus():
    for c in corpus(per_dim=8):
        for p in range(1, 6):
            lower, upper = c.barycenter_bounds(p)
            s = c.s_p(p)
            assert lower <= s <= upper


def test_barycenter_bounds_tight_cases():
    # the projective curve meets neither bound; the linear curve at n = 1
    # meets both (they coincide there).
    c = linear_curve(tau=F(3))
    for p in range(1, 5):
        lower, upper = c.barycenter_bounds(p)
        assert lower == upper == c.s_p(p)


def test_barycenter_bounds_real_orders():
    # flat n = 2 curve sits strictly between the bounds at every order;
    # the projective curve would attain the lower bound exactly and turn
    # this into a float-noise coin flip.
    c = VolumeCurve(2, F(1), PiecewisePolynomial(
        (F(0), F(1)), (Polynomial((F(1), F(-1))),)))
    lower, upper = c.barycenter_bounds(2.5)
    s = c.s_p_real(2.5)
    assert lower < s < upper


def test_barycenter_lower_bound_attained_by_projective_curve():
    c = projective_curve(2)
    for p in (1, 2, 3, 4):
        lower, _ = c.barycenter_bounds(p)
        assert c.s_p(p) == lower


def test_power_mean_monotone_in_p():
    # (s_p)^(1/p) is nondecreasing; cross powers keep it exact.
    for c in corpus(per_dim=6):
        for p1 in range(1, 8):
            p2 = p1 + 1
            assert c.s_p(p1) ** p2 <= c.s_p(p2) ** p1


def test_h_stat_monotone_exact_cross_powers():
    for c in corpus(per_dim=6):
        for p1 in range(1, 8):
            p2 = p1 + 1
            lhs = c.h_stat_power(p1) ** p2
            rhs = c.h_stat_power(p2) ** p1
            assert lhs <= rhs


def test_h_stat_limit_on_flat_profile_curve():
    # n = 2 with a linear volume curve: h_stat(p) = tau ((p+2)/(2p+2))^(1/p)
    # approaches tau; at p = 200 it is within 0.35 percent.
    c = VolumeCurve(2, F(1), PiecewisePolynomial(
        (F(0), F(1)), (Polynomial((F(1), F(-1))),)))
    h = c.h_stat(200)
    assert h == pytest.approx(((202.0 / 402.0)) ** (1.0 / 200.0), rel=1e-12)
    assert abs(h - 1.0) < 0.02 * 1.0


def test_h_stat_fractional_orders_monotone_float():
    c = projective_curve(2)
    grid = [1.0 + 0.5 * j for j in range(19)]
    values = [c.h_stat(p) for p in grid]
    for a, b in zip(values, values[1:]):
        assert b >= a - 1e-9


# ---------------------------------------------------------------------------
# the K family


def test_k_stat_equals_n_at_n():
    for n in (2, 3):
        c = projective_curve(n)
        assert c.k_stat(n) == pytest.approx(float(n), rel=1e-12)


def test_k_stat_matches_h_stat_on_flag_type_curves():
    # (K(n+p)/K(n))^(1/p) = h_stat(p) for curves with a radial profile
    c = projective_curve(2)
    for p in (1, 2, 3):
        lhs = (c.k_stat(2 + p) / c.k_stat(2)) ** (1.0 / p)
        assert lhs == pytest.approx(c.h_stat(p), rel=1e-9)


def test_k_stat_dimension_one_is_threshold_power():
    c = linear_curve(tau=F(3, 2))
    for s in (1.0, 2.5, 4.0):
        assert c.k_stat(s) == pytest.approx(1.5 ** s, rel=1e-12)


def test_k_stat_log_convex_on_corpus():
    for c in corpus(per_dim=5):
        n = c.n
        grid = [n + 0.5 * j for j in range(13)]
        logs = [math.log(c.k_stat(s)) for s in grid]
        for i in range(1, len(logs) - 1):
            assert logs[i - 1] - 2 * logs[i] + logs[i + 1] >= -1e-9


def test_k_stat_domain_boundary():
    c = projective_curve(3)
    with pytest.raises(DomainError):
        c.k_stat(2.0)  # s must exceed n - 1 = 2
    assert c.k_stat(2.0 + 1e-6) > 0


# ---------------------------------------------------------------------------
# exponential moment and the entropy-style candidate


def test_exp_moment_matches_series():
    for c in corpus(per_dim=4):
        series = float(c.exp_moment_series(40))
        assert c.exp_moment() == pytest.approx(series, abs=1e-10)


def test_exp_moment_linear_curve_is_inverse_e():
    c = linear_curve()
    assert c.exp_moment() == pytest.approx(math.exp(-1.0), abs=1e-14)


def test_h_na_candidate_value():
    c = linear_curve()
    expected = 1.0 + math.log(1.0 - math.exp(-1.0))
    assert c.h_na_candidate(1.0) == pytest.approx(expected, abs=1e-12)
    with pytest.raises(DomainError):
        c.h_na_candidate(-0.5)


# ---------------------------------------------------------------------------
# profiles


def test_radial_profile_roundtrip():
    c = projective_curve(2)
    prof = c.radial_profile()
    assert prof.n == 2
    lo, hi = prof.fpow.domain
    assert prof.fpow.integrate(lo, hi) == 1


def test_radial_profile_rejects_non_flag_curve():
    # Volume curve of G = min(2x, x + 1/4) on the unit square: concave,
    # decreasing, and its square root is concave, yet the density jumps
    # upward at the kink, so no concave radial profile exists.
    first = Polynomial((F(1), F(-1, 2)))   # 1 - x/2 on [0, 1/2]
    second = Polynomial((F(5, 4), F(-1)))  # 5/4 - x on [1/2, 5/4]
    curve = PiecewisePolynomial((F(0), F(1, 2), F(5, 4)), (first, second))
    vc = VolumeCurve(2, F(1), curve)  # accepted: root-concavity holds
    with pytest.raises(InvariantViolation):
        vc.radial_profile()


def test_curve_from_profile_linear_profile_is_projective_curve():
    # profile f(x) = 1 - x/(n+1) times a constant reproduces the
    # projective curve after normalization
    n = 2
    made = curve_from_profile(n, [F(0), F(3)], [F(3), F(0)])
    ref = projective_curve(n)
    for p in (1, 2, 3):
        assert made.s_p(p) == ref.s_p(p)


def test_curve_from_profile_rejects_bad_profiles():
    with pytest.raises(InvariantViolation):
        curve_from_profile(2, [F(0), F(1), F(2)], [F(0), F(1), F(3)])
    with pytest.raises(InvariantViolation):
        curve_from_profile(2, [F(0), F(1)], [F(0), F(0)])
    with pytest.raises(DomainError):
        curve_from_profile(2, [F(1), F(2)], [F(1), F(0)])


# ---------------------------------------------------------------------------
# corpus generator, rescaling, serialization


@pytest.mark.parametrize("n", [1, 2, 3])
def test_random_admissible_curve_is_valid(n):
    rng = Random(f"validity:{n}")
    for _ in range(25):
        c = random_admissible_curve(rng, n)
        assert c.n == n
        assert c.curve(F(0)) == c.V
        assert c.curve(c.tau) == 0


def test_random_admissible_curve_deterministic():
    a = random_admissible_curve(Random("fixed"), 2)
    b = random_admissible_curve(Random("fixed"), 2)
    assert a == b


def test_rescale_valuation_scales_moments():
    c = projective_curve(2)
    scaled = c.rescale_valuation(F(3))
    assert scaled.tau == c.tau / 3
    for p in (1, 2, 3):
        assert scaled.s_p(p) == c.s_p(p) / F(3) ** p


def test_json_roundtrip():
    c = projective_curve(3)
    back = VolumeCurve.from_json_dict(c.to_json_dict())
    assert back == c
    d = VolumeCurve.degenerate(2, F(7))
    assert VolumeCurve.from_json_dict(d.to_json_dict()).is_degenerate


def test_tau_of_corner_cases():
    assert linear_curve(tau=F(5, 3)).tau == F(5, 3)
    assert VolumeCurve.degenerate(1, F(1)).tau == 0


# ---------------------------------------------------------------------------
# property tests


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000),
       n=st.integers(min_value=1, max_value=3))
def test_property_barycenter_and_duality(seed, n):
    c = random_admissible_curve(Random(seed), n)
    for p in (1, 2, 3):
        lower, upper = c.barycenter_bounds(p)
        s = c.s_p(p)
        assert lower <= s <= upper
        assert s == c.s_p_from_density(p)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000),
       n=st.integers(min_value=1, max_value=3),
       c_num=st.integers(min_value=1, max_value=5),
       c_den=st.integers(min_value=1, max_value=5))
def test_property_rescaling_homogeneity(seed, n, c_num, c_den):
    curve = random_admissible_curve(Random(seed), n)
    factor = F(c_num, c_den)
    scaled = curve.rescale_valuation(factor)
    assert scaled.s_p(2) * factor ** 2 == curve.s_p(2)
