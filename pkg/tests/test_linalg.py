import pytest

from slfr.field import GF
from slfr.linalg import (
    FqMatrix,
    IndexOutOfRange,
    NotSquare,
    Singular,
    cramer_component,
    det,
    matmul,
    rank,
    solve,
    solve_general,
)

from conftest import random_invertible, random_matrix
from oracles import det_laplace, det_permutation_sum


def test_submatrix_definition():
    m = FqMatrix(GF(7), [[1, 2, 3], [4, 5, 6], [0, 1, 2]])
    s = m.submatrix([0, 2], [1])
    assert s.to_lists() == [[2], [1]]
    empty = m.submatrix([], [])
    assert (empty.rows, empty.cols) == (0, 0)
    assert m.submatrix(range(3), range(3)) == m
    with pytest.raises(IndexOutOfRange):
        m.submatrix([0, 3], [0])
    with pytest.raises(ValueError):
        m.submatrix([2, 0], [0])  # not increasing


def test_det_examples():
    f7 = GF(7)
    assert det(FqMatrix(f7, [], cols=0)) == 1
    assert det(FqMatrix.identity(f7, 4)) == 1
    m = FqMatrix(f7, [[1, 2], [3, 4]])
    assert det(m) == 5  # 4 - 6 mod 7
    assert det(m) == det_permutation_sum(m.to_lists(), f7)
    with pytest.raises(NotSquare):
        det(FqMatrix(f7, [[1, 2, 3]]))


def test_det_agrees_with_permutation_oracle(rng):
    for q in (2, 3, 5, 7):
        spec = GF(q)
        for n in range(5):
            m = random_matrix(spec, n, n, rng)
            assert det(m) == det_permutation_sum(m.to_lists(), spec)


def test_det_agrees_with_laplace_oracle(rng):
    for q in (2, 3, 5, 7):
        spec = GF(q)
        for n in range(1, 6):
            m = random_matrix(spec, n, n, rng)
            assert det(m) == det_laplace(m.to_lists(), spec)


def test_det_multiplicative(rng):
    for q in (2, 3, 5, 7):
        spec = GF(q)
        for n in range(1, 6):
            a = random_matrix(spec, n, n, rng)
            b = random_matrix(spec, n, n, rng)
            assert det(matmul(a, b)) == spec.mul(det(a), det(b))


def test_rank_examples():
    f2 = GF(2)
    assert rank(FqMatrix.zeros(f2, 3, 4)) == 0
    assert rank(FqMatrix.identity(GF(5), 4)) == 4
    assert rank(FqMatrix(f2, [[1, 1], [1, 1]])) == 1


def test_rank_det_consistency(rng):
    for _ in range(30):
        m = random_matrix(GF(5), 4, 4, rng)
        assert (rank(m) == 4) == (det(m) != 0)


def test_solve_examples(rng):
    f7 = GF(7)
    b = FqMatrix(f7, [[2], [5], [1]])
    assert solve(FqMatrix.identity(f7, 3), b) == b
    assert solve(FqMatrix(f7, [[2]]), FqMatrix(f7, [[3]])).to_lists() == [[5]]
    spec = GF(5)
    for _ in range(10):
        a = random_invertible(spec, 4, rng)
        rhs = random_matrix(spec, 4, 1, rng)
        x = solve(a, rhs)
        assert matmul(a, x) == rhs
    with pytest.raises(Singular):
        solve(FqMatrix(f7, [[1, 1], [1, 1]]), FqMatrix(f7, [[1], [0]]))


def test_cramer_component(rng):
    f7 = GF(7)
    b = FqMatrix(f7, [[4], [6], [2]])
    eye = FqMatrix.identity(f7, 3)
    for i in range(3):
        assert cramer_component(eye, b, i) == b[i, 0]
    assert cramer_component(FqMatrix(f7, [[3]]), FqMatrix(f7, [[5]]), 0) == f7.div(5, 3)
    for _ in range(10):
        a = random_invertible(f7, 3, rng)
        rhs = random_matrix(f7, 3, 1, rng)
        x = solve(a, rhs)
        for i in range(3):
            assert cramer_component(a, rhs, i) == x[i, 0]
    with pytest.raises(Singular):
        cramer_component(FqMatrix(f7, [[0]]), FqMatrix(f7, [[1]]), 0)


def test_solve_general_shapes():
    f5 = GF(5)
    # consistent overdetermined system
    sol, nullity = solve_general([[1, 0], [0, 1], [1, 1]], [2, 3, 0], f5)
    assert sol == [2, 3] and nullity == 0
    # inconsistent
    sol, _ = solve_general([[1, 0], [1, 0]], [1, 2], f5)
    assert sol is None
    # underdetermined
    sol, nullity = solve_general([[1, 1]], [3], f5)
    assert nullity == 1
    assert f5.add(sol[0], sol[1]) == 3


def test_matrix_validation():
    with pytest.raises(ValueError):
        FqMatrix(GF(3), [[0, 3]])  # entry out of range
    with pytest.raises(ValueError):
        FqMatrix(GF(3), [[0, 1], [2]])  # ragged
    m = FqMatrix(GF(3), [[0, 1], [2, 0]])
    with pytest.raises(IndexOutOfRange):
        m[2, 0]
