"""Dense univariate polynomials and piecewise polynomials over Fraction.

Coefficients are exact rationals in ascending order.  Evaluation keeps
the type of the argument: a Fraction in gives a Fraction out, a float in
gives a float out.  Instances are immutable and safe to share.
"""

from __future__ import annotations

import bisect
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError, InvariantViolation, RangeError, StructureError
from .numeric import adaptive_quadrature, as_fraction

# High-order exact moments shift a curve up by p - 1, so the guard has to
# admit orders in the hundreds; it only exists to catch runaway degree
# growth from a looping multiplication.
MAX_DEGREE = 512


class Polynomial:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        if len(cs) - 1 > MAX_DEGREE:
            raise StructureError(
                f"polynomial degree {len(cs) - 1} exceeds the supported "
                f"maximum {MAX_DEGREE}")
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else -1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        acc = 0 if not isinstance(x, float) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + (float(c) if isinstance(x, float) else c)
        return acc

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Polynomial(out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + other.scale(-1)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if self.is_zero() or other.is_zero():
            return Polynomial(())
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    def scale(self, c) -> "Polynomial":
        c = as_fraction(c)
        return Polynomial(v * c for v in self.coeffs)

    def shift_up(self, k: int) -> "Polynomial":
        """Multiply by x**k."""
        if self.is_zero():
            return self
        return Polynomial((Fraction(0),) * k + self.coeffs)

    def derivative(self) -> "Polynomial":
        return Polynomial(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def antiderivative(self) -> "Polynomial":
        return Polynomial([Fraction(0)]
                          + [c / (i + 1) for i, c in enumerate(self.coeffs)])

    def integrate(self, a, b) -> Fraction:
        F = self.antiderivative()
        return F(as_fraction(b)) - F(as_fraction(a))

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)!r})"


def lagrange_interpolate(xs: Sequence, ys: Sequence) -> Polynomial:
    """Exact interpolating polynomial through (xs[i], ys[i])."""
    xs = [as_fraction(x) for x in xs]
    ys = [as_fraction(y) for y in ys]
    if len(xs) != len(ys) or not xs:
        raise StructureError("interpolation needs matching nonempty nodes")
    if len(set(xs)) != len(xs):
        raise StructureError("interpolation nodes must be distinct")
    total = Polynomial(())
    for j, yj in enumerate(ys):
        if yj == 0:
            continue
        basis = Polynomial((1,))
        denom = Fraction(1)
        for i, xi in enumerate(xs):
            if i == j:
                continue
            basis = basis * Polynomial((-xi, 1))
            denom *= xs[j] - xi
        total = total + basis.scale(yj / denom)
    return total


class PiecewisePolynomial:
    """A piecewise polynomial on [breakpoints[0], breakpoints[-1]].

    ``pieces[i]`` is the polynomial on [breakpoints[i], breakpoints[i+1]].
    Evaluation is right-continuous at interior breakpoints (the last
    breakpoint uses the final piece).  With ``continuous=True`` the
    constructor verifies exact agreement of adjacent pieces at every
    interior breakpoint.
    """

    __slots__ = ("breakpoints", "pieces", "continuous")

    def __init__(self, breakpoints: Sequence, pieces: Sequence[Polynomial],
                 continuous: bool = True):
        bps = tuple(as_fraction(b) for b in breakpoints)
        if len(bps) < 2:
            raise StructureError("need at least two breakpoints")
        if any(bps[i] >= bps[i + 1] for i in range(len(bps) - 1)):
            raise InvariantViolation("breakpoints must be strictly increasing")
        if len(pieces) != len(bps) - 1:
            raise StructureError("need exactly one piece per interval")
        self.breakpoints = bps
        self.pieces = tuple(pieces)
        self.continuous = continuous
        if continuous:
            for i in range(1, len(bps) - 1):
                x = bps[i]
                left = self.pieces[i - 1](x)
                right = self.pieces[i](x)
                if left != right:
                    raise InvariantViolation(
                        f"discontinuity at breakpoint {x}: {left} != {right}",
                        witness=x)

    @property
    def domain(self) -> tuple[Fraction, Fraction]:
        return self.breakpoints[0], self.breakpoints[-1]

    def piece_index(self, x) -> int:
        lo, hi = self.domain
        if x < lo or x > hi:
            raise RangeError(f"{x} outside domain [{lo}, {hi}]")
        if x == hi:
            return len(self.pieces) - 1
        return bisect.bisect_right(self.breakpoints, x) - 1

    def __call__(self, x):
        if isinstance(x, float):
            xf = as_fraction_from_float(x, self)
            return float(self.pieces[self.piece_index(xf)](x))
        x = as_fraction(x)
        return self.pieces[self.piece_index(x)](x)

    def derivative(self) -> "PiecewisePolynomial":
        return PiecewisePolynomial(
            self.breakpoints, [p.derivative() for p in self.pieces],
            continuous=False)

    def scale(self, c) -> "PiecewisePolynomial":
        return PiecewisePolynomial(
            self.breakpoints, [p.scale(c) for p in self.pieces],
            continuous=self.continuous)

    def integrate(self, a, b) -> Fraction:
        a = as_fraction(a)
        b = as_fraction(b)
        lo, hi = self.domain
        if a > b:
            raise RangeError("integration bounds are reversed")
        if a < lo or b > hi:
            raise RangeError(f"[{a}, {b}] not inside [{lo}, {hi}]")
        total = Fraction(0)
        for i, piece in enumerate(self.pieces):
            u = max(a, self.breakpoints[i])
            w = min(b, self.breakpoints[i + 1])
            if u < w:
                total += piece.integrate(u, w)
        return total

    def __eq__(self, other):
        return (isinstance(other, PiecewisePolynomial)
                and self.breakpoints == other.breakpoints
                and self.pieces == other.pieces)

    def __hash__(self):
        return hash((self.breakpoints, self.pieces))

    def __repr__(self):
        return (f"PiecewisePolynomial({[str(b) for b in self.breakpoints]}, "
                f"{len(self.pieces)} pieces)")


def as_fraction_from_float(x: float, f: PiecewisePolynomial) -> Fraction:
    """Clamp a float evaluation point into the exact domain.

    Floats that round barely outside the domain (from upstream float
    arithmetic) are snapped to the nearest endpoint; anything further out
    is a genuine range error.
    """
    q = Fraction(x)
    lo, hi = f.domain
    if q < lo:
        if float(lo) - x > 1e-9 * max(1.0, abs(float(lo))):
            raise RangeError(f"{x} outside domain [{lo}, {hi}]")
        return lo
    if q > hi:
        if x - float(hi) > 1e-9 * max(1.0, abs(float(hi))):
            raise RangeError(f"{x} outside domain [{lo}, {hi}]")
        return hi
    return q


def integrate_monomial_weighted(f: PiecewisePolynomial, p: int, a, b) -> Fraction:
    """Exact ``integral_a^b x**(p-1) * f(x) dx`` for integer p >= 1."""
    if not isinstance(p, int) or isinstance(p, bool):
        raise DomainError("integrate_monomial_weighted needs an integer p")
    if p < 1:
        raise DomainError("the exponent p must be at least 1")
    a = as_fraction(a)
    b = as_fraction(b)
    lo, hi = f.domain
    if a > b:
        raise RangeError("integration bounds are reversed")
    if a < lo or b > hi:
        raise RangeError(f"[{a}, {b}] not inside [{lo}, {hi}]")
    total = Fraction(0)
    for i, piece in enumerate(f.pieces):
        u = max(a, f.breakpoints[i])
        w = min(b, f.breakpoints[i + 1])
        if u < w:
            total += piece.shift_up(p - 1).integrate(u, w)
    return total


def integrate_real_power(f: PiecewisePolynomial, p: float, a, b,
                         tol: float = 1e-10) -> float:
    """``integral_a^b x**(p-1) * f(x) dx`` for real p >= 1, to +-tol.

    Adaptive Gauss-Kronrod per piece.  The domain must sit in x >= 0 so
    that the real power is defined.
    """
    p = float(p)
    if p < 1.0:
        raise DomainError("the exponent p must be at least 1")
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    a = as_fraction(a)
    b = as_fraction(b)
    lo, hi = f.domain
    if a > b:
        raise RangeError("integration bounds are reversed")
    if a < lo or b > hi:
        raise RangeError(f"[{a}, {b}] not inside [{lo}, {hi}]")
    if a < 0:
        raise DomainError("real-power integration needs a nonnegative domain")
    if a == b:
        return 0.0
    spans = []
    for i, piece in enumerate(f.pieces):
        u = max(a, f.breakpoints[i])
        w = min(b, f.breakpoints[i + 1])
        if u < w:
            spans.append((float(u), float(w), piece))
    total_len = sum(w - u for u, w, _ in spans)
    result = 0.0
    for u, w, piece in spans:
        coeffs = tuple(float(c) for c in piece.coeffs)

        def integrand(x, cs=coeffs, q=p - 1.0):
            acc = 0.0
            for c in reversed(cs):
                acc = acc * x + c
            return x ** q * acc

        local_tol = tol * (w - u) / total_len
        result += adaptive_quadrature(integrand, u, w, local_tol)
    return result
