"""Volume curves and their moment statistics.

A :class:`VolumeCurve` records x -> vol(L - xF) for a polarized pair
together with the ambient dimension and the total volume V = vol(L).
From it the library derives the support threshold tau, the moments
s_p (the p-th moment of the vanishing-order distribution d(-vol)/V),
the normalized statistic h_stat, the auxiliary family k_stat, the
radial profile of the curve, and an entropy-style candidate functional.

Rational quantities are exact.  Real exponents go through termwise
closed forms or tolerance-controlled quadrature; nothing exact is ever
recomputed from floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from random import Random

from .errors import DomainError, InvariantViolation
from .numeric import SqrtSum, as_fraction, log_gamma
from .piecewise import (PiecewisePolynomial, Polynomial,
                        integrate_monomial_weighted, integrate_real_power)

CONCAVITY_TOL = 1e-12
MONOTONE_SAMPLES_PER_PIECE = 8
CONCAVITY_GRID = 64


def _check_positive_int(p, what: str) -> int:
    if not isinstance(p, int) or isinstance(p, bool) or p < 1:
        raise DomainError(f"{what} must be a positive integer, got {p!r}")
    return p


def _chord_concave(xs: list[float], ys: list[float], tol: float) -> bool:
    """Every interior sample lies above the chord of its neighbors."""
    for (xa, ya), (xb, yb), (xc, yc) in zip(zip(xs, ys), zip(xs[1:], ys[1:]),
                                            zip(xs[2:], ys[2:])):
        chord = ((xc - xb) * ya + (xb - xa) * yc) / (xc - xa)
        if yb < chord - tol:
            return False
    return True


class VolumeCurve:
    """Exact model of x -> vol(L - xF) on [0, tau].

    ``n`` is the dimension, ``V`` the total volume (= curve(0)), and
    ``curve`` a nonincreasing piecewise polynomial vanishing at tau whose
    n-th root is concave.  The degenerate tau = 0 case (a valuation the
    polarization never sees) carries no curve; its moments are zero and
    its normalized statistics are undefined.
    """

    __slots__ = ("n", "V", "curve", "tau")

    def __init__(self, n: int, V, curve: PiecewisePolynomial):
        self.n = _check_positive_int(n, "dimension")
        self.V = as_fraction(V)
        if self.V <= 0:
            raise InvariantViolation("total volume must be positive")
        self.curve = curve
        lo, hi = curve.domain
        if lo != 0:
            raise InvariantViolation("a volume curve starts at 0")
        if hi <= 0:
            raise InvariantViolation(
                "tau must be positive; use VolumeCurve.degenerate for tau=0")
        self.tau = hi
        self._validate()

    @classmethod
    def degenerate(cls, n: int, V) -> "VolumeCurve":
        self = object.__new__(cls)
        self.n = _check_positive_int(n, "dimension")
        self.V = as_fraction(V)
        if self.V <= 0:
            raise InvariantViolation("total volume must be positive")
        self.curve = None
        self.tau = Fraction(0)
        return self

    @property
    def is_degenerate(self) -> bool:
        return self.curve is None

    # -- validation ----------------------------------------------------

    def _validate(self) -> None:
        c = self.curve
        if c(Fraction(0)) != self.V:
            raise InvariantViolation(
                f"curve(0) = {c(Fraction(0))} does not equal V = {self.V}")
        if c(self.tau) != 0:
            raise InvariantViolation(f"curve(tau) = {c(self.tau)} is nonzero")
        deriv = c.derivative()
        prev = self.V
        for i, piece in enumerate(c.pieces):
            lo, hi = c.breakpoints[i], c.breakpoints[i + 1]
            step = (hi - lo) / (MONOTONE_SAMPLES_PER_PIECE + 1)
            for j in range(MONOTONE_SAMPLES_PER_PIECE + 2):
                x = lo + j * step
                if deriv.pieces[i](x) > 0:
                    raise InvariantViolation(
                        f"volume curve increases near x = {x}",
                        witness={"x": str(x)})
                val = piece(x)
                if val > prev:
                    raise InvariantViolation(
                        f"volume curve increases at x = {x}",
                        witness={"x": str(x)})
                if val < 0:
                    raise InvariantViolation(
                        f"volume curve is negative at x = {x}",
                        witness={"x": str(x)})
                if x < self.tau and val == 0:
                    raise InvariantViolation(
                        f"volume curve vanishes at x = {x} before tau",
                        witness={"x": str(x)})
                prev = val
        self._check_root_concavity()

    def _check_root_concavity(self) -> None:
        c = self.curve
        grid = sorted({*c.breakpoints,
                       *(self.tau * Fraction(i, CONCAVITY_GRID)
                         for i in range(CONCAVITY_GRID + 1))})
        xs = [float(x) for x in grid]
        root = 1.0 / self.n
        ys = [float(c(x)) ** root for x in grid]
        tol = CONCAVITY_TOL * max(1.0, float(self.V) ** root)
        if not _chord_concave(xs, ys, tol):
            raise InvariantViolation(
                "curve(x)^(1/n) fails the concavity spot check")

    # -- exact moments -------------------------------------------------

    def s_p(self, p: int) -> Fraction:
        """Exact p-th moment (p/V) * integral of x**(p-1) * curve(x)."""
        _check_positive_int(p, "moment order p")
        if self.is_degenerate:
            return Fraction(0)
        return (Fraction(p) / self.V
                * integrate_monomial_weighted(self.curve, p, 0, self.tau))

    def s_p_from_density(self, p: int) -> Fraction:
        """Same moment through the density -curve'; an independent route
        (integration by parts) used for cross-checks."""
        _check_positive_int(p, "moment order p")
        if self.is_degenerate:
            return Fraction(0)
        density = self.curve.derivative().scale(-1)
        return (integrate_monomial_weighted(density, p + 1, 0, self.tau)
                / self.V)

    def s_p_half(self, p) -> SqrtSum:
        """Exact moment for half-integer p >= 1 as a sum of square roots."""
        p = as_fraction(p)
        if p.denominator != 2 or p < 1:
            raise DomainError("s_p_half needs a half-integer p >= 1")
        if self.is_degenerate:
            return SqrtSum.from_rational(0)
        total = SqrtSum.from_rational(0)
        c = self.curve
        for i, piece in enumerate(c.pieces):
            lo, hi = c.breakpoints[i], c.breakpoints[i + 1]
            for k, coef in enumerate(piece.coeffs):
                if coef == 0:
                    continue
                e = p + k
                term = (SqrtSum.rational_power(hi, e)
                        - SqrtSum.rational_power(lo, e))
                total = total + term.scale(coef / e)
        return total.scale(p / self.V)

    def s_p_real(self, p: float, tol: float = 1e-10) -> float:
        """Moment for real p >= 1 to a relative tolerance of about tol."""
        p = float(p)
        if p < 1.0:
            raise DomainError("moment order p must be at least 1")
        if self.is_degenerate:
            return 0.0
        log_size = (math.log(float(self.V)) - math.log(p)
                    + p * math.log(max(float(self.tau), 1e-300)))
        if log_size > 700.0:
            raise DomainError(
                "x**p overflows doubles for this tau and p; rescale first")
        scale = max(1.0, math.exp(min(log_size, 700.0)))
        raw = integrate_real_power(self.curve, p, 0, self.tau,
                                   tol=tol * scale)
        return p * raw / float(self.V)

    # -- derived statistics ---------------------------------------------

    def barycenter_bounds(self, p):
        """Two-sided bounds for s_p from tau alone.

        Integer p gives exact rationals (p! n!/(p+n)! tau^p below,
        n/(n+p) tau^p above); real p gives floats through log-gamma.
        """
        n = self.n
        if isinstance(p, int) and not isinstance(p, bool):
            _check_positive_int(p, "moment order p")
            tp = self.tau ** p
            lower = Fraction(math.factorial(p) * math.factorial(n),
                             math.factorial(p + n)) * tp
            upper = Fraction(n, n + p) * tp
            return lower, upper
        p = float(p)
        if p < 1.0:
            raise DomainError("moment order p must be at least 1")
        if self.tau == 0:
            return 0.0, 0.0
        log_tp = p * math.log(float(self.tau))
        lower = math.exp(log_gamma(p + 1.0) + log_gamma(n + 1.0)
                         - log_gamma(p + n + 1.0) + log_tp)
        upper = n / (n + p) * math.exp(log_tp)
        return lower, upper

    def h_stat_power(self, p: int) -> Fraction:
        """Exact h_stat(p)**p = (n+p)/n * s_p; use cross powers to compare
        h_stat values at integer orders without roots."""
        _check_positive_int(p, "moment order p")
        if self.is_degenerate:
            raise DomainError("h_stat is undefined for a degenerate curve")
        return Fraction(self.n + p, self.n) * self.s_p(p)

    def h_stat(self, p: float, tol: float = 1e-10) -> float:
        """Normalized moment statistic ((n+p)/n * s_p)**(1/p)."""
        if self.is_degenerate:
            raise DomainError("h_stat is undefined for a degenerate curve")
        pf = float(p)
        if pf < 1.0:
            raise DomainError("moment order p must be at least 1")
        if pf.is_integer():
            s = float(self.s_p(int(pf)))
        else:
            s = self.s_p_real(pf, tol)
        return ((self.n + pf) / self.n * s) ** (1.0 / pf)

    def k_stat(self, s: float) -> float:
        """The moment family K(s) = s * integral of x**(s-1) g(x)**(n-1),
        with g the ratio of the radial profile to x.

        Equivalently (s/V) * integral of x**(s-n) d(-vol) when n >= 2;
        termwise closed form per polynomial piece of the density, with
        exponents positive exactly when s > n - 1, the domain boundary.
        K(n) = n identically for n >= 2 and (K(n+p)/K(n))**(1/p) equals
        h_stat(p) on curves carrying a radial profile.  For n = 1 the
        g-power is the constant 1, so K(s) = tau**s regardless of the
        curve (log-linear; the identity with h_stat then holds exactly
        on the linear curves, the only ones of flag type in dimension
        one).
        """
        if self.is_degenerate:
            raise DomainError("k_stat is undefined for a degenerate curve")
        s = float(s)
        if s <= self.n - 1:
            raise DomainError(f"k_stat needs s > n - 1 = {self.n - 1}")
        if self.n == 1:
            return float(self.tau) ** s
        density = self.curve.derivative().scale(-1)
        total = 0.0
        for i, piece in enumerate(density.pieces):
            a = float(density.breakpoints[i])
            b = float(density.breakpoints[i + 1])
            for k, coef in enumerate(piece.coeffs):
                if coef == 0:
                    continue
                e = s - self.n + k + 1
                total += float(coef) * (b ** e - a ** e) / e
        return s * total / float(self.V)

    def r_stat(self, p: float, tol: float = 1e-10) -> float:
        """Scaled moment ((n+p)!/(n! p!) s_p)**(1/p), reported by scans.

        Monotonicity of this statistic is an open question; nothing in
        the library asserts it.
        """
        pf = float(p)
        if pf < 1.0:
            raise DomainError("moment order p must be at least 1")
        if self.is_degenerate:
            raise DomainError("r_stat is undefined for a degenerate curve")
        n = self.n
        if pf.is_integer():
            pint = int(pf)
            coef = Fraction(math.factorial(n + pint),
                            math.factorial(n) * math.factorial(pint))
            return float(coef * self.s_p(pint)) ** (1.0 / pf)
        logc = log_gamma(n + pf + 1.0) - log_gamma(n + 1.0) - log_gamma(pf + 1.0)
        return math.exp((logc + math.log(self.s_p_real(pf, tol))) / pf)

    # -- entropy-style candidate -----------------------------------------

    def exp_moment(self) -> float:
        """(1/V) * integral of exp(-x) * curve(x) over [0, tau].

        Exact antiderivative per piece: with Q = q + q' + q'' + ... the
        primitive of exp(-x) q(x) is -exp(-x) Q(x); only the final
        exponentials are floating point.
        """
        if self.is_degenerate:
            return 0.0
        total = 0.0
        c = self.curve
        for i, piece in enumerate(c.pieces):
            q = piece
            repeated = piece
            while True:
                q = q.derivative()
                if q.is_zero():
                    break
                repeated = repeated + q
            a, b = c.breakpoints[i], c.breakpoints[i + 1]
            total += (math.exp(-float(a)) * float(repeated(a))
                      - math.exp(-float(b)) * float(repeated(b)))
        return total / float(self.V)

    def exp_moment_series(self, terms: int) -> Fraction:
        """Partial sum sum_{k=1..terms} (-1)**(k+1) s_p(k)/k!; converges
        to exp_moment and cross-checks it."""
        _check_positive_int(terms, "series length")
        total = Fraction(0)
        for k in range(1, terms + 1):
            term = self.s_p(k) / math.factorial(k)
            total += term if k % 2 == 1 else -term
        return total

    def h_na_candidate(self, a_f: float) -> float:
        """Entropy-style candidate a_f + log(1 - exp_moment()).

        The argument of the log lies in (0, 1] for every valid curve; a
        nonpositive argument means the curve data is malformed.
        """
        if float(a_f) < 0:
            raise DomainError("the log discrepancy input must be >= 0")
        arg = 1.0 - self.exp_moment()
        if arg <= 0.0:
            raise InvariantViolation(
                "exp moment at least 1; the curve cannot be a volume curve")
        return float(a_f) + math.log(arg)

    # -- profile and transforms ------------------------------------------

    def radial_profile(self) -> "RadialProfile":
        if self.is_degenerate:
            raise DomainError("a degenerate curve has no radial profile")
        density = self.curve.derivative().scale(-1)
        fpow = density.scale(Fraction(1) / self.V)
        return RadialProfile(self.n, fpow)

    def rescale_valuation(self, c) -> "VolumeCurve":
        """Curve of (L, cF): x -> vol(L - (cx)F), so tau scales by 1/c and
        s_p by c**(-p)."""
        c = as_fraction(c)
        if c <= 0:
            raise DomainError("rescaling factor must be positive")
        if self.is_degenerate:
            return VolumeCurve.degenerate(self.n, self.V)
        breaks = [x / c for x in self.curve.breakpoints]
        pieces = [Polynomial(tuple(coef * c ** k
                                   for k, coef in enumerate(piece.coeffs)))
                  for piece in self.curve.pieces]
        return VolumeCurve(self.n, self.V,
                           PiecewisePolynomial(breaks, pieces, continuous=True))

    # -- serialization and identity ---------------------------------------

    def to_json_dict(self) -> dict:
        if self.is_degenerate:
            return {"n": self.n, "V": str(self.V), "tau": "0"}
        return {"n": self.n, "V": str(self.V), "tau": str(self.tau),
                "breakpoints": [str(x) for x in self.curve.breakpoints],
                "pieces": [[str(c) for c in piece.coeffs]
                           for piece in self.curve.pieces]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "VolumeCurve":
        n = int(data["n"])
        V = as_fraction(data["V"])
        if as_fraction(data["tau"]) == 0:
            return cls.degenerate(n, V)
        breaks = [as_fraction(x) for x in data["breakpoints"]]
        pieces = [Polynomial([as_fraction(c) for c in coeffs])
                  for coeffs in data["pieces"]]
        return cls(n, V, PiecewisePolynomial(breaks, pieces, continuous=True))

    def __eq__(self, other):
        return (isinstance(other, VolumeCurve) and self.n == other.n
                and self.V == other.V and self.tau == other.tau
                and self.curve == other.curve)

    def __hash__(self):
        return hash((self.n, self.V, self.tau, self.curve))

    def __repr__(self):
        return f"VolumeCurve(n={self.n}, V={self.V}, tau={self.tau})"


@dataclass(frozen=True)
class RadialProfile:
    """The density of a volume curve in radial normal form.

    ``fpow`` represents f(x)**(n-1) = -curve'(x)/V.  It integrates to one
    exactly; for n >= 2 the root f must pass a concavity spot check, which
    is what distinguishes curves of flag type from arbitrary monotone
    data.
    """

    n: int
    fpow: PiecewisePolynomial

    def __post_init__(self):
        lo, hi = self.fpow.domain
        total = self.fpow.integrate(lo, hi)
        if total != 1:
            raise InvariantViolation(
                f"radial density integrates to {total}, not 1")
        for i, piece in enumerate(self.fpow.pieces):
            a, b = self.fpow.breakpoints[i], self.fpow.breakpoints[i + 1]
            step = (b - a) / (MONOTONE_SAMPLES_PER_PIECE + 1)
            for j in range(MONOTONE_SAMPLES_PER_PIECE + 2):
                x = a + j * step
                if piece(x) < 0:
                    raise InvariantViolation(
                        f"radial density negative at x = {x}: "
                        "the curve has an increasing segment")
        if self.n >= 2:
            self._check_root_concavity()

    def _check_root_concavity(self):
        lo, hi = self.fpow.domain
        xs: list[float] = []
        ys: list[float] = []
        root = 1.0 / (self.n - 1)
        for i, piece in enumerate(self.fpow.pieces):
            a, b = self.fpow.breakpoints[i], self.fpow.breakpoints[i + 1]
            for j in range(CONCAVITY_GRID + 1):
                x = a + (b - a) * Fraction(j, CONCAVITY_GRID)
                v = piece(x)
                xs.append(float(x))
                ys.append(float(v) ** root if v > 0 else 0.0)
        peak = max(ys) if ys else 1.0
        if not _chord_concave(xs, ys, CONCAVITY_TOL * max(1.0, peak)):
            raise InvariantViolation(
                "the radial profile fails its concavity spot check; the "
                "curve is monotone but not of flag type")

    def f_value(self, x) -> float:
        v = self.fpow(x)
        if self.n == 1:
            return float(v)
        return float(v) ** (1.0 / (self.n - 1)) if v > 0 else 0.0


def curve_from_profile(n: int, breakpoints, values) -> VolumeCurve:
    """Volume curve with radial profile the piecewise-linear interpolant
    of ``values`` at ``breakpoints``.

    The profile must be concave (nonincreasing slopes), nonnegative, and
    positive somewhere; the curve is then x -> integral_x^tau f**(n-1),
    with total volume integral_0^tau f**(n-1).  Concavity of f forces
    the n-th-root concavity of the curve, so the result is always a
    valid VolumeCurve.
    """
    _check_positive_int(n, "dimension")
    breaks = [as_fraction(b) for b in breakpoints]
    vals = [as_fraction(v) for v in values]
    if len(breaks) != len(vals) or len(breaks) < 2:
        raise DomainError("need matching breakpoints and values, at least 2")
    if breaks[0] != 0:
        raise DomainError("the profile domain must start at 0")
    if any(a >= b for a, b in zip(breaks, breaks[1:])):
        raise DomainError("breakpoints must increase strictly")
    if any(v < 0 for v in vals):
        raise InvariantViolation("profile values must be nonnegative")
    if all(v == 0 for v in vals):
        raise InvariantViolation("profile must be positive somewhere")
    slopes = [(v1 - v0) / (b1 - b0) for (b0, b1, v0, v1)
              in zip(breaks, breaks[1:], vals, vals[1:])]
    if any(s0 < s1 for s0, s1 in zip(slopes, slopes[1:])):
        raise InvariantViolation("profile slopes must be nonincreasing")

    lines = [Polynomial((v0 - s * b0, s))
             for b0, v0, s in zip(breaks, vals, slopes)]
    powers = []
    for line in lines:
        acc = Polynomial((Fraction(1),))
        for _ in range(n - 1):
            acc = acc * line
        powers.append(acc)

    tail = Fraction(0)
    pieces_rev = []
    for i in range(len(powers) - 1, -1, -1):
        g = powers[i]
        anti = g.antiderivative()
        const = tail + anti(breaks[i + 1])
        piece = Polynomial((const,)) - anti
        pieces_rev.append(piece)
        tail = piece(breaks[i])
    pieces = list(reversed(pieces_rev))
    curve = PiecewisePolynomial(breaks, pieces, continuous=True)
    return VolumeCurve(n, curve(Fraction(0)), curve)


def random_admissible_curve(rng: Random, n: int) -> VolumeCurve:
    """Random valid VolumeCurve, built from a random concave radial
    profile (n >= 2) or as a random linear curve (n = 1, the only
    admissible shape there).

    Deterministic given the Random instance; used by the self-check
    command and the property-test corpus.
    """
    _check_positive_int(n, "dimension")
    k = rng.randint(1, 4)
    tau_den = rng.randint(1, 3)
    tau = Fraction(rng.randint(1, 4), tau_den)
    cuts = sorted(rng.sample(range(1, 12), k - 1)) if k > 1 else []
    breaks = [Fraction(0)] + [tau * Fraction(c, 12) for c in cuts] + [tau]

    den = rng.randint(1, 6)
    raw = sorted({rng.randint(-6, 6) for _ in range(k)}, reverse=True)
    while len(raw) < k:
        raw.append(raw[-1] - rng.randint(1, 3))
    slopes = [Fraction(s, den) for s in raw]

    if n == 1:
        # The admissible curves in dimension one are exactly the linear
        # ones (the profile power is the constant 1), so only the scale
        # and the threshold vary.
        scale = Fraction(rng.randint(1, 6), rng.randint(1, 3))
        curve = PiecewisePolynomial(
            (Fraction(0), tau),
            (Polynomial((scale * tau, -scale)),))
        return VolumeCurve(1, scale * tau, curve)

    start = Fraction(rng.randint(0, 4), rng.randint(1, 3))
    vals = [start]
    for s, (b0, b1) in zip(slopes, zip(breaks, breaks[1:])):
        vals.append(vals[-1] + s * (b1 - b0))
    low = min(vals[0], vals[-1])
    shift = -low if rng.random() < 0.5 else -low + Fraction(1, rng.randint(1, 4))
    vals = [v + shift for v in vals]
    if all(v == 0 for v in vals):
        vals = [v + 1 for v in vals]
    return curve_from_profile(n, breaks, vals)
