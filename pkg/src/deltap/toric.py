"""Toric polarized models from lattice polytopes.

A full-dimensional lattice polytope P encodes a polarized toric variety
of dimension n = dim P.  Torus-invariant valuations correspond to
nonzero primitive integer vectors v; the induced data is completely
convex-geometric: the volume curve is n! times the slice volumes of the
linear functional <., v> on P, section filtrations are weight data on
lattice points of dilations, and log discrepancies come from the
per-vertex supports of the normal fan.

The candidate searches enumerate primitive vectors in a box, so their
minima are upper bounds for the corresponding infima; results say so
explicitly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (DomainError, InvariantViolation, StructureError,
                     UnsupportedModelError)
from .filtration import FlagFiltration, MonomialGradedFiltration
from .geometry import Halfspace, RationalPolytope, dot, survival_curve
from .linalg import solve_linear_system
from .okounkov import AffineForm, ConcaveTransform
from .volume_curve import VolumeCurve

DEFAULT_SEARCH_BOUND = 5


class ToricModel:
    """A polarized toric model: lattice polytope plus derived fan data."""

    __slots__ = ("P", "n", "_vertex_supports")

    def __init__(self, P: RationalPolytope):
        if not P.is_full_dimensional:
            raise StructureError("the model polytope must be full-dimensional")
        if any(x.denominator != 1 for v in P.vertices for x in v):
            raise StructureError("the model polytope must have lattice vertices")
        self.P = P
        self.n = P.dim
        self._vertex_supports = None

    def vertex_rays(self, w) -> tuple[tuple[int, ...], ...]:
        """Primitive ray generators of the normal-fan cone at vertex w."""
        return tuple(hs.normal for hs in self.P.halfspaces()
                     if dot(hs.normal, w) == hs.offset)

    def _supports(self):
        """Per-vertex support vector m_w with <m_w, ray> = 1 for every ray
        of the cone at w, when one exists (the Q-Gorenstein condition)."""
        if self._vertex_supports is None:
            sols = {}
            for w in self.P.vertices:
                rays = self.vertex_rays(w)
                sols[w] = solve_linear_system(
                    [list(r) for r in rays], [Fraction(1)] * len(rays))
            self._vertex_supports = sols
        return self._vertex_supports

    @property
    def is_q_gorenstein(self) -> bool:
        return all(sol is not None for sol in self._supports().values())

    def min_vertex(self, v: Sequence) -> tuple:
        """First vertex (in sorted order) minimizing <., v>; the vector v
        lies in the normal-fan cone based there."""
        return min(self.P.vertices, key=lambda w: (dot(w, v), w))

    def anticanonical_scale(self):
        """(translation t, scale c) with facet offsets b_F = <n_F, t> - c,
        or None.  c = 1 means the polarization is the anticanonical one
        up to translation."""
        hss = self.P.halfspaces()
        rows = [list(hs.normal) + [Fraction(-1)] for hs in hss]
        rhs = [hs.offset for hs in hss]
        sol = solve_linear_system(rows, rhs)
        if sol is None or sol[-1] <= 0:
            return None
        return sol[:-1], sol[-1]

    def anticanonical_polytope(self) -> RationalPolytope:
        """The polytope {u : <n_F, u> >= -1} over this model's facet
        normals.  When the underlying anticanonical class is ample this
        is the polytope of the anticanonically polarized model; otherwise
        its normal fan is a coarsening of this one."""
        hss = [Halfspace(hs.normal, Fraction(-1))
               for hs in self.P.halfspaces()]
        Q = RationalPolytope.from_halfspaces(hss, self.n)
        if not Q.is_full_dimensional:
            raise UnsupportedModelError(
                "the anticanonical polytope is not full-dimensional")
        return Q

    def to_json_dict(self) -> dict:
        return self.P.to_json_dict()

    def __repr__(self):
        return f"ToricModel(n={self.n}, {len(self.P.vertices)} vertices)"


class ToricValuation:
    """A torus-invariant valuation: a nonzero primitive integer vector,
    with the offset that normalizes its minimum over the polytope to 0."""

    __slots__ = ("v", "offset")

    def __init__(self, model: ToricModel, v: Sequence):
        vec = tuple(int(x) for x in v)
        if len(vec) != model.n:
            raise StructureError("valuation arity differs from the dimension")
        if all(x == 0 for x in vec):
            raise DomainError("the valuation vector must be nonzero")
        if math.gcd(*(abs(x) for x in vec)) != 1:
            raise DomainError("the valuation vector must be primitive")
        self.v = vec
        self.offset = -min(dot(w, vec) for w in model.P.vertices)

    def g(self, u) -> Fraction:
        """The normalized weight <u, v> + offset, nonnegative on P."""
        return dot(u, self.v) + self.offset

    def __repr__(self):
        return f"ToricValuation(v={self.v})"


def volume_curve_of(model: ToricModel, val: ToricValuation) -> VolumeCurve:
    """Exact volume curve x -> n! * vol{u in P : g_v(u) >= x}."""
    data = []
    for simplex in model.P.triangulation():
        data.append((simplex, tuple(val.g(u) for u in simplex)))
    curve = survival_curve(data, model.n).scale(math.factorial(model.n))
    V = Fraction(math.factorial(model.n)) * model.P.volume()
    return VolumeCurve(model.n, V, curve)


def log_discrepancy(model: ToricModel, val: ToricValuation) -> Fraction:
    """A(v) = <m_w, v> on the normal-fan cone containing v."""
    if not model.is_q_gorenstein:
        raise UnsupportedModelError(
            "log discrepancies need a Q-Gorenstein model")
    w = model.min_vertex(val.v)
    a = dot(model._supports()[w], val.v)
    if a <= 0:
        raise InvariantViolation(f"nonpositive log discrepancy at {val.v}")
    return a


def section_filtration(model: ToricModel, val: ToricValuation, m: int,
                       with_flag: bool = False) -> FlagFiltration:
    """Level-m filtration of the lattice-point section space of mP."""
    graded = MonomialGradedFiltration(model.P, val.v)
    return graded.flag_filtration(m, with_flag=with_flag)


def concave_transform_of(model: ToricModel, val: ToricValuation) -> ConcaveTransform:
    """The valuation's weight function as a transform on the body P;
    its moments match the volume-curve moments exactly (dual route)."""
    form = AffineForm.make(val.v, val.offset)
    return ConcaveTransform(model.P, [form], nonneg=True)


def primitive_candidates(n: int, bound: int) -> list[tuple[int, ...]]:
    """All primitive integer vectors with sup-norm at most ``bound``,
    lexicographically sorted."""
    if bound < 1:
        raise DomainError("the search bound must be at least 1")
    out = []
    for vec in itertools.product(range(-bound, bound + 1), repeat=n):
        if any(vec) and math.gcd(*(abs(x) for x in vec)) == 1:
            out.append(vec)
    return out


@dataclass(frozen=True)
class DeltaSearchResult:
    """Outcome of a restricted-candidate threshold search.

    ``value`` = min over the candidate box of A(v) / moment(v)**(1/p),
    an upper bound for the infimum over all valuations.  ``a`` and
    ``moment`` certify the minimizer exactly: value**p = a**p / moment.
    ``normalized`` tells whether the moment is s_p (mean) or V * s_p
    (integral form).
    """

    p: int
    bound: int
    normalized: bool
    argmin: tuple[int, ...]
    a: Fraction
    moment: Fraction
    table: tuple[tuple[tuple[int, ...], Fraction, Fraction], ...]

    @property
    def value(self) -> float:
        return float(self.a) / float(self.moment) ** (1.0 / self.p)

    def ratio_power(self) -> Fraction:
        """Exact value**p = a**p / moment, for rounding-free comparisons."""
        return self.a ** self.p / self.moment

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "bound": self.bound,
            "normalized": self.normalized,
            "upper_bound_only": True,
            "value": self.value,
            "argmin": list(self.argmin),
            "a": str(self.a),
            "moment": str(self.moment),
            "table": [{"v": list(v), "a": str(a), "moment": str(s),
                       "ratio": float(a) / float(s) ** (1.0 / self.p)}
                      for v, a, s in self.table],
        }


def _search(model: ToricModel, p: int, bound: int,
            normalized: bool) -> DeltaSearchResult:
    if not isinstance(p, int) or isinstance(p, bool) or p < 1:
        raise DomainError("the search order p must be a positive integer")
    if not model.is_q_gorenstein:
        raise UnsupportedModelError("threshold search needs Q-Gorenstein input")
    rows = []
    best = None  # (a, moment, v)
    for v in primitive_candidates(model.n, bound):
        val = ToricValuation(model, v)
        a = log_discrepancy(model, val)
        curve = volume_curve_of(model, val)
        moment = curve.s_p(p)
        if not normalized:
            moment = moment * curve.V
        if moment <= 0:
            raise InvariantViolation(f"vanishing moment at {v}")
        rows.append((v, a, moment))
        # minimize a / moment^(1/p): compare a^p * moment' cross-wise
        if best is None or a ** p * best[1] < best[0] ** p * moment:
            best = (a, moment, v)
    a, moment, v = best
    return DeltaSearchResult(p=p, bound=bound, normalized=normalized,
                             argmin=v, a=a, moment=moment, table=tuple(rows))


def delta_p_search(model: ToricModel, p: int,
                   bound: int = DEFAULT_SEARCH_BOUND) -> DeltaSearchResult:
    """Restricted-candidate minimum of A(v)/s_p(v)**(1/p).

    The candidate set is the primitive box of radius ``bound``, so the
    result is an upper bound for the infimum over all valuations; ties
    resolve to the lexicographically smallest vector.
    """
    return _search(model, p, bound, normalized=True)


def delta_bar_p_search(model: ToricModel, p: int,
                       bound: int = DEFAULT_SEARCH_BOUND) -> DeltaSearchResult:
    """Unnormalized variant: A(v)/(V * s_p(v))**(1/p).

    Monotone under polytope inclusion with a fixed fan (bigger body,
    smaller value), which is what the dilation property checks exercise.
    """
    return _search(model, p, bound, normalized=False)


def alpha_candidate(model: ToricModel,
                    bound: int = DEFAULT_SEARCH_BOUND) -> tuple[Fraction, tuple[int, ...]]:
    """Restricted-candidate minimum of A(v)/tau(v), an upper bound for
    the global threshold; exact rational, lexicographic tie-break."""
    if not model.is_q_gorenstein:
        raise UnsupportedModelError("threshold search needs Q-Gorenstein input")
    best = None
    for v in primitive_candidates(model.n, bound):
        val = ToricValuation(model, v)
        a = log_discrepancy(model, val)
        tau = max(val.g(w) for w in model.P.vertices)
        if tau <= 0:
            raise InvariantViolation(f"constant weight for {v}")
        ratio = a / tau
        if best is None or ratio < best[0]:
            best = (ratio, v)
    return best


def builtin_model(name: str) -> ToricModel:
    """Named desk-scale models.

    p2 (projective plane, hyperplane class), p2-anticanonical,
    p1xp1 (bidegree (1,1)), hirzebruch-<a>, and pn:<n> (projective
    n-space, hyperplane class).
    """
    name = name.strip().lower()
    if name == "p2":
        return ToricModel(RationalPolytope([(0, 0), (1, 0), (0, 1)]))
    if name == "p2-anticanonical":
        return ToricModel(RationalPolytope([(0, 0), (3, 0), (0, 3)]))
    if name == "p1xp1":
        return ToricModel(RationalPolytope([(0, 0), (1, 0), (0, 1), (1, 1)]))
    if name.startswith("hirzebruch-"):
        try:
            a = int(name.split("-", 1)[1])
        except ValueError:
            raise UnsupportedModelError(f"bad twist in {name!r}") from None
        if a < 1 or a > 12:
            raise UnsupportedModelError("hirzebruch twist must be in 1..12")
        return ToricModel(RationalPolytope([(0, 0), (1, 0), (0, 1),
                                            (1, 1 + a)]))
    if name.startswith("pn:"):
        try:
            n = int(name.split(":", 1)[1])
        except ValueError:
            raise UnsupportedModelError(f"bad dimension in {name!r}") from None
        if n < 1 or n > 6:
            raise UnsupportedModelError("pn dimension must be in 1..6")
        verts = [(0,) * n] + [tuple(1 if j == i else 0 for j in range(n))
                              for i in range(n)]
        return ToricModel(RationalPolytope(verts))
    raise UnsupportedModelError(f"unknown builtin model {name!r}")
