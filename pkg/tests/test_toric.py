"""Tests for polarized toric models, torus-invariant valuations, their
volume curves, log discrepancies, and the restricted threshold searches.

Frozen values, worked out from the polytopes directly:

  * projective plane, anticanonical polarization (triangle 3*simplex),
    valuation e_1: V = 9, tau = 3, s_1 = 1, s_2 = 3/2, A = 1
  * projective plane, hyperplane class: A(e_1) = 1, A((1,1)) = 2,
    anticanonical scale 1/3; delta-type bound at p = 1 equals 3 * (1/3)
  * product of two lines, bidegree (1,1): delta bound 2 at p = 1 with
    argmin (-3,-2), A = 5, s_1 = 5/2, at bound 3; alpha bound 1
  * anticanonical scales: simplex 1/3, 3*simplex 1, unit square 1/2,
    twisted surface none
"""

from fractions import Fraction

import pytest

from deltap.errors import (
    DomainError,
    InvariantViolation,
    StructureError,
    UnsupportedModelError,
)
from deltap.geometry import RationalPolytope
from deltap.toric import (
    DeltaSearchResult,
    ToricModel,
    ToricValuation,
    alpha_candidate,
    builtin_model,
    concave_transform_of,
    delta_bar_p_search,
    delta_p_search,
    log_discrepancy,
    primitive_candidates,
    section_filtration,
    volume_curve_of,
)

F = Fraction

NON_QG_PYRAMID = RationalPolytope(
    [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 2, 0), (0, 0, 1)])


# ---------------------------------------------------------------------------
# models and valuations


def test_builtin_models_exist():
    assert builtin_model("p2").n == 2
    assert builtin_model("p2-anticanonical").P.volume() == F(9, 2)
    assert builtin_model("p1xp1").P.volume() == 1
    assert builtin_model("hirzebruch-2").n == 2
    assert builtin_model("pn:3").n == 3


def test_builtin_model_rejects_unknown():
    with pytest.raises(UnsupportedModelError):
        builtin_model("p3")
    with pytest.raises(UnsupportedModelError):
        builtin_model("hirzebruch-0")
    with pytest.raises(UnsupportedModelError):
        builtin_model("pn:9")


def test_model_requires_lattice_vertices():
    with pytest.raises(StructureError):
        ToricModel(RationalPolytope([(F(0), F(0)), (F(1, 2), F(0)),
                                     (F(0), F(1))]))


def test_valuation_normalization():
    model = builtin_model("p2")
    val = ToricValuation(model, (-1, 0))
    assert val.offset == 1  # min of -x over the simplex is -1
    assert val.g((F(0), F(0))) == 1
    assert val.g((F(1), F(0))) == 0


def test_valuation_rejects_imprimitive():
    model = builtin_model("p2")
    with pytest.raises(DomainError):
        ToricValuation(model, (2, 4))
    with pytest.raises(DomainError):
        ToricValuation(model, (0, 0))


def test_q_gorenstein_flags():
    assert builtin_model("p2").is_q_gorenstein
    assert builtin_model("hirzebruch-3").is_q_gorenstein
    assert not ToricModel(NON_QG_PYRAMID).is_q_gorenstein


# ---------------------------------------------------------------------------
# volume curves from models


def test_projective_plane_anticanonical_curve():
    model = builtin_model("p2-anticanonical")
    val = ToricValuation(model, (1, 0))
    curve = volume_curve_of(model, val)
    assert curve.n == 2
    assert curve.V == 9
    assert curve.tau == 3
    assert curve.s_p(1) == 1
    assert curve.s_p(2) == F(3, 2)
    assert curve.s_p(3) == F(27, 10)


def test_curve_independent_of_translation():
    model = builtin_model("p2")
    shifted = ToricModel(RationalPolytope([(5, 7), (6, 7), (5, 8)]))
    for v in ((1, 0), (1, 1), (-1, 2)):
        a = volume_curve_of(model, ToricValuation(model, v))
        b = volume_curve_of(shifted, ToricValuation(shifted, v))
        assert a == b


def test_transform_route_matches_curve_route():
    for name, v in (("p2", (1, 0)), ("p1xp1", (0, 1)),
                    ("hirzebruch-1", (1, 0))):
        model = builtin_model(name)
        val = ToricValuation(model, v)
        curve = volume_curve_of(model, val)
        G = concave_transform_of(model, val)
        for p in (1, 2):
            assert G.moment_p(p) == curve.s_p(p)
            assert G.moment_from_slices(p) == curve.s_p(p)


def test_section_filtration_matches_monomial_weights():
    model = builtin_model("p2")
    val = ToricValuation(model, (1, 0))
    filt = section_filtration(model, val, 2)
    # lattice points of 2*simplex: six points with x-weights 0,0,0,1,1,2
    assert filt.jumps == (F(0), F(0), F(0), F(1), F(1), F(2))
    assert filt.s_m_p(1) == F(4, 12)


# ---------------------------------------------------------------------------
# log discrepancies


def test_log_discrepancies_on_simplex():
    model = builtin_model("p2")
    assert log_discrepancy(model, ToricValuation(model, (1, 0))) == 1
    assert log_discrepancy(model, ToricValuation(model, (1, 1))) == 2
    # (-1, 0) lies in the cone at the vertex (1, 0), support (-2, 1)
    assert log_discrepancy(model, ToricValuation(model, (-1, 0))) == 2
    assert log_discrepancy(model, ToricValuation(model, (-1, -1))) == 1


def test_log_discrepancy_on_product():
    model = builtin_model("p1xp1")
    assert log_discrepancy(model, ToricValuation(model, (2, 1))) == 3


def test_log_discrepancy_needs_q_gorenstein():
    model = ToricModel(NON_QG_PYRAMID)
    val = ToricValuation(model, (0, 0, 1))
    with pytest.raises(UnsupportedModelError):
        log_discrepancy(model, val)


# ---------------------------------------------------------------------------
# anticanonical structure


def test_anticanonical_scales():
    assert builtin_model("p2").anticanonical_scale()[1] == F(1, 3)
    assert builtin_model("p2-anticanonical").anticanonical_scale()[1] == 1
    square = ToricModel(RationalPolytope([(0, 0), (1, 0), (0, 1), (1, 1)]))
    assert square.anticanonical_scale()[1] == F(1, 2)
    assert builtin_model("hirzebruch-1").anticanonical_scale() is None


def test_anticanonical_polytope_of_simplex():
    Q = builtin_model("p2").anticanonical_polytope()
    assert sorted(Q.vertices) == sorted([(F(-1), F(-1)), (F(2), F(-1)),
                                         (F(-1), F(2))])


def test_anticanonical_polytope_coarsens_fan_for_high_twist():
    # for twist 2 the facet x >= -1 degenerates to a vertex: the
    # anticanonical polytope is a triangle, its normal fan strictly
    # coarser than the surface's fan
    Q = builtin_model("hirzebruch-2").anticanonical_polytope()
    assert len(Q.vertices) == 3


# ---------------------------------------------------------------------------
# searches


def test_primitive_candidates_sorted_and_primitive():
    cands = primitive_candidates(2, 1)
    assert cands == sorted(cands)
    assert (0, 0) not in cands
    assert (1, 1) in cands
    assert len(cands) == 8


def test_delta_search_p2_anticanonical():
    model = builtin_model("p2-anticanonical")
    res = delta_p_search(model, 1, bound=2)
    assert res.ratio_power() == 1
    # (-2, -1), (-1, -1), (1, 0), ... all tie at ratio 1; the search
    # keeps the lexicographically first candidate
    assert res.argmin == (-2, -1)
    assert res.a ** 1 == res.moment


def test_delta_search_p2_anticanonical_second_order():
    model = builtin_model("p2-anticanonical")
    res = delta_p_search(model, 2, bound=2)
    # value (1/3) sqrt(6): ratio_power = 1/(3/2) = 2/3
    assert res.ratio_power() == F(2, 3)
    assert res.value == pytest.approx((6.0 ** 0.5) / 3.0, rel=1e-12)


def test_delta_search_product_of_lines():
    model = builtin_model("p1xp1")
    res = delta_p_search(model, 1, bound=3)
    assert res.ratio_power() == 2  # at p = 1 the ratio power is the bound
    assert res.value == pytest.approx(2.0, rel=1e-12)
    assert res.argmin == (-3, -2)


def test_delta_bar_search_scales_with_volume():
    model = builtin_model("p2-anticanonical")
    res = delta_bar_p_search(model, 1, bound=1)
    norm = delta_p_search(model, 1, bound=1)
    assert res.moment == norm.moment * 9


def test_delta_search_table_is_complete():
    model = builtin_model("p2")
    res = delta_p_search(model, 1, bound=1)
    assert len(res.table) == len(primitive_candidates(2, 1))
    doc = res.to_json_dict()
    assert doc["upper_bound_only"] is True
    assert doc["argmin"] == list(res.argmin)


def test_delta_search_rejects_non_q_gorenstein():
    model = ToricModel(NON_QG_PYRAMID)
    with pytest.raises(UnsupportedModelError):
        delta_p_search(model, 1, bound=1)


def test_alpha_candidates():
    assert alpha_candidate(builtin_model("p1xp1"), bound=2)[0] == 1
    alpha, arg = alpha_candidate(builtin_model("p2-anticanonical"), bound=2)
    assert alpha == F(1, 3)


def test_alpha_scales_with_polarization():
    # alpha of the hyperplane class is 3 times alpha of the anticanonical
    a1, _ = alpha_candidate(builtin_model("p2"), bound=2)
    a3, _ = alpha_candidate(builtin_model("p2-anticanonical"), bound=2)
    assert a1 == 3 * a3


def test_delta_search_translation_invariant():
    base = builtin_model("p1xp1")
    shifted = ToricModel(RationalPolytope([(4, -2), (5, -2), (4, -1),
                                           (5, -1)]))
    for p in (1, 2):
        r1 = delta_p_search(base, p, bound=2)
        r2 = delta_p_search(shifted, p, bound=2)
        assert r1.argmin == r2.argmin
        assert r1.ratio_power() == r2.ratio_power()


def test_delta_bar_antitone_under_dilation():
    # enlarging the body can only shrink the unnormalized bound
    small = builtin_model("p2")
    big = ToricModel(RationalPolytope([(0, 0), (2, 0), (0, 2)]))
    for p in (1, 2):
        rs = delta_bar_p_search(small, p, bound=2)
        rb = delta_bar_p_search(big, p, bound=2)
        assert rb.ratio_power() <= rs.ratio_power()
