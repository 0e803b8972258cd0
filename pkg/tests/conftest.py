import random

import pytest

from slfr.field import GF


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def gf3():
    return GF(3)


@pytest.fixture
def gf5():
    return GF(5)


@pytest.fixture
def gf7():
    return GF(7)


def random_matrix(spec, rows, cols, rand):
    from slfr.linalg import FqMatrix

    return FqMatrix(spec, [[rand.randrange(spec.q) for _ in range(cols)] for _ in range(rows)])


def random_invertible(spec, n, rand):
    from slfr.linalg import det

    while True:
        m = random_matrix(spec, n, n, rand)
        if det(m) != 0:
            return m
