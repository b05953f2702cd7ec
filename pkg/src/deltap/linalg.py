"""Small exact linear algebra over Fraction row vectors.

Row operations only, deterministic pivoting (first nonzero column, rows
in given order), suitable for the desk-scale systems this package meets.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

from .errors import StructureError

Vector = tuple[Fraction, ...]


def _rows(mat) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in mat]


def rref(mat: Sequence[Sequence]) -> tuple[tuple[Vector, ...], tuple[int, ...]]:
    """Reduced row echelon form.  Returns (nonzero rows, pivot columns)."""
    rows = _rows(mat)
    if not rows:
        return (), ()
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise StructureError("ragged matrix")
    pivots: list[int] = []
    r = 0
    for col in range(width):
        pivot_row = None
        for i in range(r, len(rows)):
            if rows[i][col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pv = rows[r][col]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return tuple(tuple(row) for row in rows[:r]), tuple(pivots)


def rank(mat: Sequence[Sequence]) -> int:
    return len(rref(mat)[0])


def in_rowspace(rref_rows: Sequence[Vector], pivots: Sequence[int],
                vec: Sequence) -> bool:
    """Membership of ``vec`` in the row space given by a precomputed rref."""
    v = [Fraction(x) for x in vec]
    for row, col in zip(rref_rows, pivots):
        c = v[col]
        if c != 0:
            v = [a - c * b for a, b in zip(v, row)]
    return all(x == 0 for x in v)


def solve_square(mat: Sequence[Sequence], rhs: Sequence) -> Vector | None:
    """Solve A x = b for square A; None when A is singular."""
    n = len(mat)
    rows = _rows(mat)
    if any(len(r) != n for r in rows):
        raise StructureError("matrix is not square")
    b = [Fraction(x) for x in rhs]
    if len(b) != n:
        raise StructureError("right-hand side has wrong length")
    aug = [rows[i] + [b[i]] for i in range(n)]
    reduced, pivots = rref(aug)
    if len(reduced) == n and pivots == tuple(range(n)):
        return tuple(row[n] for row in reduced)
    # Singular; the system may still be inconsistent or underdetermined,
    # callers only care that there is no unique solution.
    return None


def solve_linear_system(mat: Sequence[Sequence], rhs: Sequence) -> Vector | None:
    """Any exact solution of A x = b (possibly underdetermined); None if
    the system is inconsistent.  Free variables are set to zero."""
    rows = _rows(mat)
    if not rows:
        return ()
    width = len(rows[0])
    b = [Fraction(x) for x in rhs]
    aug = [rows[i] + [b[i]] for i in range(len(rows))]
    reduced, pivots = rref(aug)
    for row, col in zip(reduced, pivots):
        if col == width:
            return None
    x = [Fraction(0)] * width
    for row, col in zip(reduced, pivots):
        x[col] = row[width]
    return tuple(x)


def nullspace(mat: Sequence[Sequence], width: int | None = None) -> tuple[Vector, ...]:
    """Basis of {x : A x = 0}, canonical from the rref (free columns)."""
    rows = _rows(mat)
    if width is None:
        if not rows:
            raise StructureError("cannot infer width of an empty matrix")
        width = len(rows[0])
    reduced, pivots = rref(rows) if rows else ((), ())
    free_cols = [c for c in range(width) if c not in pivots]
    basis = []
    for fc in free_cols:
        v = [Fraction(0)] * width
        v[fc] = Fraction(1)
        for row, pc in zip(reduced, pivots):
            v[pc] = -row[fc]
        basis.append(tuple(v))
    return tuple(basis)


def primitive_integer_vector(vec: Sequence) -> tuple[int, ...]:
    """Scale a nonzero rational vector to coprime integers (orientation kept)."""
    v = [Fraction(x) for x in vec]
    if all(x == 0 for x in v):
        raise StructureError("zero vector has no primitive representative")
    denom_lcm = 1
    for x in v:
        denom_lcm = denom_lcm * x.denominator // gcd(denom_lcm, x.denominator)
    ints = [int(x * denom_lcm) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints)
