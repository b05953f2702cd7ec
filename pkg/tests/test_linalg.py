"""Tests for the small exact linear-algebra kit."""

from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from deltap.linalg import (
    in_rowspace,
    nullspace,
    primitive_integer_vector,
    rank,
    rref,
    solve_linear_system,
    solve_square,
)

F = Fraction


def test_rank_of_obvious_matrices():
    assert rank([[1, 0], [0, 1]]) == 2
    assert rank([[1, 2], [2, 4]]) == 1
    assert rank([[0, 0], [0, 0]]) == 0


def test_solve_square_regular_and_singular():
    sol = solve_square([[2, 1], [1, 3]], [5, 10])
    assert sol == (F(1), F(3))
    assert solve_square([[1, 2], [2, 4]], [1, 1]) is None


def test_solve_linear_system_overdetermined():
    # consistent 3x2 system
    sol = solve_linear_system([[1, 0], [0, 1], [1, 1]], [2, 3, 5])
    assert sol == (F(2), F(3))
    # inconsistent variant
    assert solve_linear_system([[1, 0], [0, 1], [1, 1]], [2, 3, 6]) is None


def test_nullspace_spans_kernel():
    basis = nullspace([[1, 1, 1]])
    assert len(basis) == 2
    for vec in basis:
        assert sum(vec) == 0


def test_in_rowspace():
    rows, pivots = rref([[1, 0, 1], [0, 1, 1]])
    assert in_rowspace(rows, pivots, [1, 1, 2])
    assert not in_rowspace(rows, pivots, [0, 0, 1])


def test_primitive_integer_vector():
    assert primitive_integer_vector([F(2, 3), F(4, 3)]) == (1, 2)
    assert primitive_integer_vector([-4, -6]) == (-2, -3)
    assert primitive_integer_vector([0, 5]) == (0, 1)


@given(st.lists(st.integers(min_value=-5, max_value=5), min_size=2,
                max_size=4))
def test_rref_idempotent(row):
    mat = [row, [2 * c for c in row]]
    rows, pivots = rref(mat)
    again, pivots2 = rref([list(r) for r in rows])
    assert rows == again
    assert pivots == pivots2
