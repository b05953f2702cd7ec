"""Filtrations of finite-dimensional section spaces.

A :class:`FlagFiltration` stores the jumping numbers of a decreasing
filtration of a d-dimensional rational coordinate space at one level m,
optionally together with the actual subspace flag.  On top of that this
module provides the level-m moments, integer rounding with its exact
sandwich bounds, compatible bases (every flag member spanned by a
suffix), a brute-force supremum oracle over random bases, and the
finitely generated approximations of a monomial graded filtration.
"""

from __future__ import annotations

import math
from fractions import Fraction
from random import Random
from typing import Sequence

from .errors import (DomainError, InvariantViolation, StructureError,
                     UnsupportedModelError)
from .geometry import RationalPolytope, dot, make_point
from .linalg import (Vector, in_rowspace, nullspace, primitive_integer_vector,
                     rank, rref)
from .numeric import SqrtSum, as_fraction

GENERATED_MAX_LEVEL = 20
GENERATED_MAX_DIM = 2


def _as_vector(row: Sequence, width: int) -> Vector:
    vec = make_point(row)
    if len(vec) != width:
        raise StructureError(f"row {row!r} does not have width {width}")
    return vec


class FlagFiltration:
    """Jumping numbers (and optionally the flag) of a filtration at level m.

    ``jumps`` is the nondecreasing tuple (a_1, ..., a_d) of jumping
    numbers; the filtered subspace at height t has codimension >= j
    exactly when t > a_j.  ``flag`` (optional) lists one row basis per
    distinct jump value, ascending, giving the subspace at that height;
    bases must be independent rows, nested decreasing, with dimensions
    matching the jump multiplicities.
    """

    __slots__ = ("m", "jumps", "d", "flag", "_membership")

    def __init__(self, m: int, jumps: Sequence, flag=None):
        if not isinstance(m, int) or isinstance(m, bool) or m < 1:
            raise DomainError("the level m must be a positive integer")
        self.m = m
        self.jumps = tuple(as_fraction(a) for a in jumps)
        if not self.jumps:
            raise StructureError("a filtration needs at least one jump")
        if any(a > b for a, b in zip(self.jumps, self.jumps[1:])):
            raise InvariantViolation("jumps must be nondecreasing")
        if self.jumps[0] < 0:
            raise InvariantViolation("jumps must be nonnegative")
        self.d = len(self.jumps)
        self.flag = self._validate_flag(flag) if flag is not None else None
        self._membership = None

    def _validate_flag(self, flag):
        values = sorted(set(self.jumps))
        pairs = [(as_fraction(v), tuple(_as_vector(r, self.d) for r in rows))
                 for v, rows in flag]
        pairs.sort(key=lambda vr: vr[0])
        if [v for v, _ in pairs] != values:
            raise StructureError(
                "flag entries must cover exactly the distinct jump values")
        outer_rref = None
        for v, rows in pairs:
            expected = sum(1 for a in self.jumps if a >= v)
            if len(rows) != expected or rank(rows) != expected:
                raise StructureError(
                    f"flag at height {v} must be {expected} independent rows")
        for (_, outer), (_, inner) in zip(pairs, pairs[1:]):
            rows_r, pivots = rref(outer)
            for r in inner:
                if not in_rowspace(rows_r, pivots, r):
                    raise StructureError("flag subspaces are not nested")
        return tuple(pairs)

    def _membership_tests(self):
        """Per flag entry, an integer matrix whose kernel is the subspace;
        membership of s is then a handful of exact dot products."""
        if self._membership is None:
            tests = []
            for v, rows in self.flag:
                comp = nullspace(rows, width=self.d)
                tests.append((v, tuple(primitive_integer_vector(c)
                                       for c in comp)))
            self._membership = tuple(tests)
        return self._membership

    def ord_of(self, s: Sequence) -> Fraction:
        """Largest height whose subspace contains s (s nonzero)."""
        if self.flag is None:
            raise StructureError("ord_of needs the flag, not just jumps")
        vec = _as_vector(s, self.d)
        if all(x == 0 for x in vec):
            raise DomainError("the zero vector has no order")
        for v, comp in reversed(self._membership_tests()):
            if all(dot(row, vec) == 0 for row in comp):
                return v
        raise StructureError("flag lacks a full-space entry")  # unreachable

    # -- moments ---------------------------------------------------------

    def s_m_p(self, p: int) -> Fraction:
        """Exact level-m moment (1/d) sum (a_j/m)**p."""
        if not isinstance(p, int) or isinstance(p, bool) or p < 1:
            raise DomainError("moment order p must be a positive integer")
        return sum(((a / self.m) ** p for a in self.jumps),
                   Fraction(0)) / self.d

    def s_m_p_half(self, p) -> SqrtSum:
        """The same moment at half-integer p >= 1/2, exactly."""
        p = as_fraction(p)
        if p.denominator != 2 or p <= 0:
            raise DomainError("s_m_p_half needs a positive half-integer p")
        total = SqrtSum.from_rational(0)
        for a in self.jumps:
            total = total + SqrtSum.rational_power(a / self.m, p)
        return total.scale(Fraction(1, self.d))

    def s_m_p_from_flag(self, p: int) -> Fraction:
        """Moment recomputed from flag dimension drops (telescoping);
        equals s_m_p exactly and cross-checks the flag bookkeeping."""
        if self.flag is None:
            raise StructureError("needs the flag")
        if not isinstance(p, int) or isinstance(p, bool) or p < 1:
            raise DomainError("moment order p must be a positive integer")
        total = Fraction(0)
        for t, (v, rows) in enumerate(self.flag):
            nxt = len(self.flag[t + 1][1]) if t + 1 < len(self.flag) else 0
            total += (v / self.m) ** p * (len(rows) - nxt)
        return total / self.d

    def t_m(self) -> Fraction:
        """Largest jump, normalized by the level."""
        return self.jumps[-1] / self.m


def round_to_integer_filtration(F: FlagFiltration) -> FlagFiltration:
    """Floor every jumping number (the integer-height refiltration).

    The subspaces do not move: the subspace at integer height v is the
    original subspace at the smallest jump value >= v.
    """
    floored = tuple(Fraction(math.floor(a)) for a in F.jumps)
    flag = None
    if F.flag is not None:
        new_values = sorted({Fraction(math.floor(a)) for a in F.jumps})
        pairs = []
        for v in new_values:
            rows = next(rows for value, rows in F.flag if value >= v)
            pairs.append((v, rows))
        flag = pairs
    return FlagFiltration(F.m, floored, flag)


def rounding_sandwich(F: FlagFiltration, p):
    """Exact two-sided control of the moment loss under integer rounding.

    Returns (upper, rounded, lower) with upper = s_m_p(F), rounded =
    s_m_p of the floored filtration, and lower the provable bound:
      p = 1:       upper - 1/m
      1 < p < 2:   upper - p/m**(p-1) * s_m_1(F)
      p >= 2:      upper - p/m * s_m_(p-1)(F)
    Values are Fractions for integer p and exact square-root sums for
    half-integer p, so callers can compare without rounding.
    """
    FN = round_to_integer_filtration(F)
    m = F.m
    if isinstance(p, int) and not isinstance(p, bool):
        if p < 1:
            raise DomainError("moment order p must be at least 1")
        upper = F.s_m_p(p)
        mid = FN.s_m_p(p)
        if p == 1:
            lower = upper - Fraction(1, m)
        else:
            lower = upper - Fraction(p, m) * F.s_m_p(p - 1)
        return upper, mid, lower
    p = as_fraction(p)
    if p.denominator != 2 or p <= 1:
        raise DomainError("non-integer orders must be half-integers > 1")
    upper = F.s_m_p_half(p)
    mid = FN.s_m_p_half(p)
    if p < 2:
        slack = SqrtSum.rational_power(Fraction(m), 1 - p).scale(p * F.s_m_p(1))
    else:
        slack = F.s_m_p_half(p - 1).scale(Fraction(p, m))
    lower = upper - slack
    return upper, mid, lower


def compatible_basis(chain: Sequence[Sequence[Sequence]], d: int):
    """Ordered basis of Q^d whose suffixes span the given chain.

    ``chain`` lists subspace row bases, nested strictly decreasing, the
    full space excluded.  The output basis b_1, ..., b_d satisfies: each
    chain member of dimension k is the span of the last k vectors.
    Deterministic: subspaces contribute their reduced-echelon rows, the
    remainder is filled with standard basis vectors in order.
    """
    if not isinstance(d, int) or d < 1:
        raise DomainError("the ambient dimension must be a positive integer")
    subspaces = [tuple(_as_vector(r, d) for r in rows) for rows in chain]
    dims = [rank(rows) for rows in subspaces]
    if any(a <= b for a, b in zip(dims, dims[1:])) or (dims and dims[0] >= d):
        raise StructureError("chain must be strictly decreasing below Q^d")
    for outer, inner in zip(subspaces, subspaces[1:]):
        rows_r, pivots = rref(outer)
        if not all(in_rowspace(rows_r, pivots, r) for r in inner):
            raise StructureError("chain subspaces are not nested")

    basis: list[Vector] = []
    for rows in reversed(subspaces):
        canon, _ = rref(rows)
        for candidate in canon:
            if rank(basis + [candidate]) > len(basis):
                basis.append(candidate)
    for i in range(d):
        if len(basis) == d:
            break
        e = tuple(Fraction(1 if j == i else 0) for j in range(d))
        if rank(basis + [e]) > len(basis):
            basis.append(e)
    basis.reverse()
    return tuple(basis)


def basis_moment(F: FlagFiltration, basis: Sequence[Sequence], p: int) -> Fraction:
    """(1/d) sum (ord(b_i)/m)**p for a basis; never exceeds s_m_p."""
    rows = [_as_vector(r, F.d) for r in basis]
    if len(rows) != F.d or rank(rows) != F.d:
        raise StructureError("basis_moment needs a full basis")
    return sum(((F.ord_of(r) / F.m) ** p for r in rows),
               Fraction(0)) / F.d


def sup_over_bases_oracle(F: FlagFiltration, p: int, samples: int,
                          rng: Random | None = None) -> Fraction:
    """Best basis moment over random small-integer bases.

    Brute-force evidence for the extremal property of compatible bases:
    the result never exceeds s_m_p(F, p).  Deterministic for a given
    Random instance (default seed 0); singular samples are rejected.
    """
    if F.flag is None:
        raise StructureError("the oracle needs the flag")
    if not isinstance(samples, int) or samples < 1:
        raise DomainError("samples must be a positive integer")
    rng = rng if rng is not None else Random(0)
    best = None
    drawn = 0
    while drawn < samples:
        rows = [tuple(Fraction(rng.randint(-3, 3)) for _ in range(F.d))
                for _ in range(F.d)]
        if rank(rows) != F.d:
            continue
        drawn += 1
        value = basis_moment(F, rows, p)
        if best is None or value > best:
            best = value
    return best


def random_flag_filtration(rng: Random, d: int, m: int) -> FlagFiltration:
    """Random filtration with an explicit flag, for property tests.

    Jumps are random nonnegative rationals; the flag is built from a
    random unimodular-ish basis so suffix spans realize the required
    dimensions exactly.
    """
    if d < 1:
        raise DomainError("dimension must be positive")
    while True:
        rows = [tuple(Fraction(rng.randint(-3, 3)) for _ in range(d))
                for _ in range(d)]
        if rank(rows) == d:
            break
    jumps = sorted(Fraction(rng.randint(0, 4 * m), rng.randint(1, 3))
                   for _ in range(d))
    pairs = []
    for v in sorted(set(jumps)):
        keep = [rows[j] for j, a in enumerate(jumps) if a >= v]
        pairs.append((v, keep))
    return FlagFiltration(m, jumps, pairs)


class MonomialGradedFiltration:
    """Weights <u, v> - m * min_P <., v> on the lattice points of mP.

    The graded pieces are indexed by lattice points of dilations of a
    full-dimensional polytope P; the weight function is affine in u, so
    the filtration is multiplicative with equality.  ``rounded`` floors
    every weight, which is the form the finitely generated
    approximations require.
    """

    __slots__ = ("P", "v", "offset", "rounded")

    def __init__(self, P: RationalPolytope, v: Sequence, rounded: bool = False):
        if not P.is_full_dimensional:
            raise StructureError("the polytope must be full-dimensional")
        self.P = P
        self.v = make_point(v)
        if len(self.v) != P.dim:
            raise StructureError("valuation vector arity differs from dim")
        if all(x == 0 for x in self.v):
            raise DomainError("the valuation vector must be nonzero")
        self.offset = -min(dot(self.v, u) for u in P.vertices)
        self.rounded = bool(rounded)

    def weight(self, u: Sequence, m: int) -> Fraction:
        w = dot(self.v, u) + m * self.offset
        if w < 0:
            raise InvariantViolation(f"negative weight at {u}")
        return Fraction(math.floor(w)) if self.rounded else w

    def level_points(self, m: int) -> tuple[tuple[int, ...], ...]:
        if not isinstance(m, int) or m < 1:
            raise DomainError("the level m must be a positive integer")
        return self.P.dilate(m).lattice_points()

    def weights(self, m: int) -> dict[tuple[int, ...], Fraction]:
        return {u: self.weight(u, m) for u in self.level_points(m)}

    def flag_filtration(self, m: int, with_flag: bool = False) -> FlagFiltration:
        """Level-m filtration data; with_flag builds the coordinate flag
        on the section space indexed by lattice points."""
        wts = self.weights(m)
        order = sorted(wts, key=lambda u: (wts[u], u))
        jumps = [wts[u] for u in order]
        flag = None
        if with_flag:
            d = len(order)
            flag = []
            for v in sorted(set(jumps)):
                rows = [tuple(Fraction(1 if j == i else 0) for j in range(d))
                        for i, u in enumerate(order) if wts[u] >= v]
                flag.append((v, rows))
        return FlagFiltration(m, jumps, flag)


def generated_filtration(base: MonomialGradedFiltration, m: int,
                         k: int) -> dict[tuple[int, ...], Fraction]:
    """Weights at level k of the filtration generated by level m.

    Every section at level k is built from products of level-m sections
    (r of them) padded by an unfiltered factor at level k - r*m; the
    weight of a lattice point u is the best achievable sum
      max { w_m(u_1) + ... + w_m(u_r) : u = u_1 + ... + u_r + u_0 },
    computed by dynamic programming on (point, r).  The result never
    exceeds the true level-k weight and agrees with it when m divides k
    and the weights are affine.
    """
    if not isinstance(m, int) or m < 1 or not isinstance(k, int) or k < 1:
        raise DomainError("levels must be positive integers")
    if k > GENERATED_MAX_LEVEL:
        raise UnsupportedModelError(
            f"generated filtrations are capped at level {GENERATED_MAX_LEVEL}")
    if base.P.dim > GENERATED_MAX_DIM:
        raise UnsupportedModelError(
            f"generated filtrations are capped at dimension {GENERATED_MAX_DIM}")
    targets = base.level_points(k)
    result = {u: Fraction(0) for u in targets}
    if k < m:
        return result

    level_w = base.weights(m)
    if any(w.denominator != 1 for w in level_w.values()):
        raise DomainError("level-m weights must be integers; round first")

    reachable = {(0,) * base.P.dim: Fraction(0)}
    for r in range(0, k // m + 1):
        if r > 0:
            nxt: dict[tuple[int, ...], Fraction] = {}
            for s, ws in reachable.items():
                for u_i, wi in level_w.items():
                    t = tuple(a + b for a, b in zip(s, u_i))
                    w = ws + wi
                    if nxt.get(t, Fraction(-1)) < w:
                        nxt[t] = w
            reachable = nxt
        pad = base.P.dilate(k - r * m).lattice_points() if k > r * m \
            else ((0,) * base.P.dim,)
        for s, ws in reachable.items():
            for u0 in pad:
                t = tuple(a + b for a, b in zip(s, u0))
                if t in result and result[t] < ws:
                    result[t] = ws
    return result


def generated_flag_filtration(base: MonomialGradedFiltration, m: int,
                              k: int) -> FlagFiltration:
    """Jump data of the generated filtration, for moment comparisons."""
    weights = generated_filtration(base, m, k)
    return FlagFiltration(k, sorted(weights.values()))
