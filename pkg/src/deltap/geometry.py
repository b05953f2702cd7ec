"""Exact rational polytope kernel.

Convex hull facets, vertex enumeration, deterministic triangulation,
volumes, halfspace slicing, lattice points, and exact integration of
powers of affine functionals over simplices, all over Fraction
coordinates.  Floats never enter.

The algorithms are deliberately brute force (subset enumeration) because
the library targets desk-scale inputs: ambient dimension up to about
four and a few dozen vertices.  At that scale exhaustive enumeration is
fast and has no degenerate-position failure modes.

All objects are immutable after construction; sharing them across
threads is safe.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import ceil, factorial, floor
from typing import Iterable, NamedTuple, Sequence

from .errors import InvariantViolation, StructureError
from .linalg import nullspace, primitive_integer_vector, rank, solve_square
from .numeric import as_fraction
from .piecewise import (PiecewisePolynomial, Polynomial, lagrange_interpolate)

Point = tuple[Fraction, ...]


class Halfspace(NamedTuple):
    """The set {x : <normal, x> >= offset}; ``normal`` is primitive integer."""

    normal: tuple[int, ...]
    offset: Fraction


def make_point(coords: Iterable) -> Point:
    return tuple(as_fraction(c) for c in coords)


def dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((Fraction(x) * Fraction(y) for x, y in zip(a, b)), Fraction(0))


def affine_dimension(points: Sequence[Point]) -> int:
    if not points:
        return -1
    base = points[0]
    diffs = [[p[i] - base[i] for i in range(len(base))] for p in points[1:]]
    return rank(diffs) if diffs else 0


def facet_enumeration(points: Sequence[Point], dim: int) -> tuple[Halfspace, ...]:
    """Facet halfspaces of the full-dimensional hull of ``points``.

    Brute force: every ``dim``-subset spanning a hyperplane with all
    points on one (weak) side contributes a supporting halfspace; only
    those whose contact set is (dim-1)-dimensional are kept.
    """
    seen: set[Halfspace] = set()
    for subset in itertools.combinations(range(len(points)), dim):
        base = points[subset[0]]
        diffs = [[points[i][k] - base[k] for k in range(dim)]
                 for i in subset[1:]]
        kernel = nullspace(diffs, width=dim)
        if len(kernel) != 1:
            continue
        normal = primitive_integer_vector(kernel[0])
        c = dot(normal, base)
        vals = [dot(normal, p) for p in points]
        if all(v >= c for v in vals):
            hs = Halfspace(normal, c)
        elif all(v <= c for v in vals):
            hs = Halfspace(tuple(-x for x in normal), -c)
        else:
            continue
        if hs in seen:
            continue
        on = [p for p, v in zip(points, vals) if v == c]
        if affine_dimension(on) == dim - 1:
            seen.add(hs)
    return tuple(sorted(seen))


def vertex_enumeration(halfspaces: Sequence[Halfspace], dim: int) -> tuple[Point, ...]:
    """Vertices of a bounded intersection of halfspaces (basic feasible
    solutions of every ``dim``-subset)."""
    verts: set[Point] = set()
    for subset in itertools.combinations(halfspaces, dim):
        sol = solve_square([hs.normal for hs in subset],
                           [hs.offset for hs in subset])
        if sol is None:
            continue
        if all(dot(hs.normal, sol) >= hs.offset for hs in halfspaces):
            verts.add(sol)
    return tuple(sorted(verts))


def simplex_volume(pts: Sequence[Point]) -> Fraction:
    """Euclidean volume of the simplex with the given dim+1 vertices."""
    d = len(pts) - 1
    base = pts[0]
    rows = [[pts[i][k] - base[k] for k in range(d)] for i in range(1, d + 1)]
    det = Fraction(1)
    for col in range(d):
        pivot = None
        for r in range(col, d):
            if rows[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det *= rows[col][col]
        inv = rows[col][col]
        for r in range(col + 1, d):
            if rows[r][col] != 0:
                f = rows[r][col] / inv
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
    return abs(det) / factorial(d)


def triangulate_vertices(points: Sequence[Point]) -> tuple[tuple[Point, ...], ...]:
    """Deterministic triangulation of a full-dimensional polytope.

    Fan from the lexicographically smallest vertex over recursively
    triangulated facets; facet recursion drops the first coordinate on
    which the facet normal is nonzero (a bijection on the facet).
    """
    pts = sorted(set(points))
    dim = len(pts[0])
    if dim == 1:
        return ((pts[0], pts[-1]),)
    apex = pts[0]
    simplices: list[tuple[Point, ...]] = []
    for hs in facet_enumeration(pts, dim):
        if dot(hs.normal, apex) == hs.offset:
            continue
        on_facet = [p for p in pts if dot(hs.normal, p) == hs.offset]
        drop = next(i for i, x in enumerate(hs.normal) if x != 0)
        projected = [p[:drop] + p[drop + 1:] for p in on_facet]
        lift = dict(zip(projected, on_facet))
        for sub in triangulate_vertices(projected):
            simplex = (apex,) + tuple(lift[q] for q in sub)
            if simplex_volume(simplex) != 0:
                simplices.append(simplex)
    return tuple(simplices)


def volume_of_point_set(points: Sequence[Point], dim: int) -> Fraction:
    """Volume of the convex hull; zero when the hull is lower-dimensional."""
    pts = sorted(set(points))
    if len(pts) <= dim or affine_dimension(pts) < dim:
        return Fraction(0)
    return sum((simplex_volume(s) for s in triangulate_vertices(pts)),
               Fraction(0))


def cut_simplex_at_least(pts: Sequence[Point], values: Sequence[Fraction],
                         threshold: Fraction) -> list[Point]:
    """Vertex set of {x in simplex : g(x) >= threshold} for affine g with
    the given vertex values.  Every pair of simplex vertices is an edge,
    so crossings are exactly the straddling pairs."""
    kept = [p for p, v in zip(pts, values) if v >= threshold]
    for (pi, vi), (pj, vj) in itertools.combinations(zip(pts, values), 2):
        if (vi > threshold > vj) or (vj > threshold > vi):
            lam = (threshold - vi) / (vj - vi)
            kept.append(tuple(a + lam * (b - a) for a, b in zip(pi, pj)))
    return kept


def survival_curve(simplices: Sequence[tuple[Sequence[Point], Sequence[Fraction]]],
                   dim: int) -> PiecewisePolynomial:
    """Exact piecewise polynomial x -> vol{g >= x} summed over simplices.

    ``simplices`` holds (vertex tuple, vertex values of the affine
    functional) pairs; values must be nonnegative and not all zero.  On
    each interval between consecutive distinct vertex values the function
    is a polynomial of degree at most ``dim``, recovered by exact
    interpolation of slice volumes at interior rational nodes.
    """
    values_all = sorted({v for _, vals in simplices for v in vals})
    if not values_all or values_all[0] < 0:
        raise InvariantViolation("survival_curve needs nonnegative values")
    top = values_all[-1]
    if top == 0:
        raise InvariantViolation("survival_curve needs a positive maximum")
    breaks = sorted({Fraction(0), *values_all})
    pieces: list[Polynomial] = []
    for lo, hi in zip(breaks, breaks[1:]):
        nodes = [lo + (hi - lo) * Fraction(i + 1, dim + 2)
                 for i in range(dim + 1)]
        samples = []
        for x in nodes:
            total = Fraction(0)
            for pts, vals in simplices:
                region = cut_simplex_at_least(pts, vals, x)
                total += volume_of_point_set(region, dim)
            samples.append(total)
        pieces.append(lagrange_interpolate(nodes, samples))
    return PiecewisePolynomial(breaks, pieces, continuous=True)


def complete_homogeneous(values: Sequence[Fraction], p: int) -> Fraction:
    """Complete homogeneous symmetric polynomial h_p of the values."""
    h = [Fraction(0)] * (p + 1)
    h[0] = Fraction(1)
    for a in values:
        for k in range(1, p + 1):
            h[k] += a * h[k - 1]
    return h[p]


def integrate_affine_power_over_simplex(volume: Fraction,
                                        values: Sequence[Fraction],
                                        p: int) -> Fraction:
    """Exact ``integral_S g**p`` for affine g over a simplex S.

    With vertex values a_0..a_n the closed form is
    ``vol(S) * n! p! / (n+p)! * h_p(a_0, ..., a_n)``,
    which is well defined for repeated vertex values (unlike the
    divided-difference form of the same identity).
    """
    n = len(values) - 1
    coef = Fraction(factorial(n) * factorial(p), factorial(n + p))
    return volume * coef * complete_homogeneous(values, p)


def lattice_points_in(halfspaces: Sequence[Halfspace],
                      vertices: Sequence[Point]) -> tuple[tuple[int, ...], ...]:
    """Integer points of a bounded polytope given by facets + vertices."""
    if not vertices:
        return ()
    dim = len(vertices[0])
    lows = [min(v[i] for v in vertices) for i in range(dim)]
    highs = [max(v[i] for v in vertices) for i in range(dim)]
    ranges = [range(ceil(lo), floor(hi) + 1) for lo, hi in zip(lows, highs)]
    out = []
    for pt in itertools.product(*ranges):
        if all(dot(hs.normal, pt) >= hs.offset for hs in halfspaces):
            out.append(pt)
    return tuple(sorted(out))


class RationalPolytope:
    """A convex polytope with rational vertices.

    Full-dimensional unless constructed with ``allow_lower_dimensional``;
    lower-dimensional (or empty) instances exist only to report volume
    zero.  When both a vertex description and halfspaces are supplied the
    two are checked to describe the same polytope.
    """

    __slots__ = ("dim", "vertices", "_facets", "_triangulation", "_volume",
                 "lower_dimensional")

    def __init__(self, vertices: Sequence[Sequence],
                 halfspaces: Sequence[Halfspace] | None = None,
                 allow_lower_dimensional: bool = False):
        pts = sorted({make_point(v) for v in vertices})
        if not pts:
            if not allow_lower_dimensional:
                raise InvariantViolation("polytope has no vertices")
            self.dim = 0
            self.vertices = ()
            self.lower_dimensional = True
            self._facets = None
            self._triangulation = None
            self._volume = Fraction(0)
            return
        dim = len(pts[0])
        if any(len(p) != dim for p in pts):
            raise StructureError("vertices have mixed dimensions")
        adim = affine_dimension(pts)
        self.dim = dim
        self.lower_dimensional = adim < dim
        if self.lower_dimensional:
            if not allow_lower_dimensional:
                raise InvariantViolation(
                    f"polytope is {adim}-dimensional in ambient dimension "
                    f"{dim}; flag it lower-dimensional if that is intended")
            self.vertices = tuple(pts)
            self._facets = None
            self._triangulation = None
            self._volume = Fraction(0)
            return
        facets = facet_enumeration(pts, dim)
        extreme = []
        for p in pts:
            active = [hs.normal for hs in facets if dot(hs.normal, p) == hs.offset]
            if len(active) >= dim and rank(active) == dim:
                extreme.append(p)
        self.vertices = tuple(extreme)
        self._facets = facets
        self._triangulation = None
        self._volume = None
        if halfspaces is not None:
            given = tuple(Halfspace(tuple(int(x) for x in hs[0]),
                                    as_fraction(hs[1])) for hs in halfspaces)
            if vertex_enumeration(given, dim) != self.vertices:
                raise StructureError(
                    "vertex and halfspace descriptions disagree")

    @classmethod
    def from_halfspaces(cls, halfspaces: Sequence[Halfspace], dim: int,
                        allow_lower_dimensional: bool = True) -> "RationalPolytope":
        hss = tuple(Halfspace(tuple(int(x) for x in hs[0]), as_fraction(hs[1]))
                    for hs in halfspaces)
        verts = vertex_enumeration(hss, dim)
        return cls(verts, allow_lower_dimensional=allow_lower_dimensional)

    @property
    def is_full_dimensional(self) -> bool:
        return not self.lower_dimensional

    def halfspaces(self) -> tuple[Halfspace, ...]:
        if self._facets is None:
            raise StructureError(
                "no facet description for a lower-dimensional polytope")
        return self._facets

    def triangulation(self) -> tuple[tuple[Point, ...], ...]:
        if self.lower_dimensional:
            return ()
        if self._triangulation is None:
            self._triangulation = triangulate_vertices(self.vertices)
        return self._triangulation

    def volume(self) -> Fraction:
        if self._volume is None:
            self._volume = sum((simplex_volume(s) for s in self.triangulation()),
                               Fraction(0))
        return self._volume

    def contains(self, point: Sequence) -> bool:
        p = make_point(point)
        if self.lower_dimensional:
            raise StructureError("membership needs a full-dimensional polytope")
        return all(dot(hs.normal, p) >= hs.offset for hs in self.halfspaces())

    def intersect(self, extra: Sequence[Halfspace]) -> "RationalPolytope":
        """Intersection with further halfspaces; may be lower-dimensional."""
        hss = self.halfspaces() + tuple(extra)
        return RationalPolytope.from_halfspaces(hss, self.dim)

    def dilate(self, c) -> "RationalPolytope":
        c = as_fraction(c)
        if c <= 0:
            raise InvariantViolation("dilation factor must be positive")
        return RationalPolytope([tuple(c * x for x in v) for v in self.vertices])

    def translate(self, t: Sequence) -> "RationalPolytope":
        tv = make_point(t)
        return RationalPolytope([tuple(x + d for x, d in zip(v, tv))
                                 for v in self.vertices])

    def lattice_points(self) -> tuple[tuple[int, ...], ...]:
        return lattice_points_in(self.halfspaces(), self.vertices)

    def to_json_dict(self) -> dict:
        return {"dim": self.dim,
                "vertices": [[str(x) for x in v] for v in self.vertices]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "RationalPolytope":
        try:
            dim = int(data["dim"])
            verts = data["vertices"]
        except (KeyError, TypeError) as exc:
            raise StructureError(f"malformed polytope JSON: {exc}") from None
        pts = [make_point(v) for v in verts]
        if any(len(p) != dim for p in pts):
            raise StructureError("vertex arity disagrees with dim")
        return cls(pts)

    def __eq__(self, other):
        return (isinstance(other, RationalPolytope)
                and self.vertices == other.vertices)

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        return (f"RationalPolytope(dim={self.dim}, "
                f"{len(self.vertices)} vertices)")
