"""Placement phase and demand processing.

Covers the uncoded cache placement (file positions partitioned by t-subsets
of users, user k caching every subfile indexed by a subset containing k),
demand matrices, leader selection with the transformed demand matrix, and
exact load accounting as rationals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import comb

from .combinat import index_set, subsets
from .field import FieldSpec
from .linalg import FqMatrix, _rref, rank, solve_general


class IndivisibleFileLength(ValueError):
    pass


class InvalidSubset(ValueError):
    pass


@dataclass(frozen=True)
class SchemeParams:
    """Problem size: K users, N files, cache parameter t, file length B.

    B defaults to C(K, t) (one symbol per block), the smallest length the
    partition supports; correctness is block-wise so nothing is lost.
    """

    field: FieldSpec
    K: int
    N: int
    t: int
    B: int | None = None

    def __post_init__(self):
        if self.K < 1 or self.N < 1:
            raise ValueError("K and N must be >= 1")
        if not 0 <= self.t <= self.K:
            raise ValueError(f"t = {self.t} outside [0, {self.K}]")
        blocks = comb(self.K, self.t)
        if self.B is None:
            object.__setattr__(self, "B", blocks)
        if self.B % blocks != 0:
            raise IndivisibleFileLength(f"B = {self.B} not divisible by C(K, t) = {blocks}")

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def block_count(self) -> int:
        return comb(self.K, self.t)

    @property
    def block_size(self) -> int:
        return self.B // self.block_count

    @property
    def memory(self) -> Fraction:
        """Cache size per user, normalized by file length: N*t/K."""
        return Fraction(self.N * self.t, self.K)


@dataclass(frozen=True)
class Library:
    params: SchemeParams
    files: tuple

    def __post_init__(self):
        files = tuple(tuple(int(x) for x in f) for f in self.files)
        if len(files) != self.params.N:
            raise ValueError(f"expected {self.params.N} files, got {len(files)}")
        q = self.params.q
        for f in files:
            if len(f) != self.params.B:
                raise ValueError(f"file length {len(f)} != B = {self.params.B}")
            if any(not 0 <= x < q for x in f):
                raise ValueError("file symbols must be canonical encodings")
        object.__setattr__(self, "files", files)

    @classmethod
    def from_json(cls, params: SchemeParams, text_or_dict) -> "Library":
        data = json.loads(text_or_dict) if isinstance(text_or_dict, str) else text_or_dict
        return cls(params, tuple(tuple(f) for f in data["files"]))

    def to_json(self) -> dict:
        return {"files": [list(f) for f in self.files]}

    @classmethod
    def random(cls, params: SchemeParams, rng) -> "Library":
        q = params.q
        return cls(
            params,
            tuple(tuple(rng.randrange(q) for _ in range(params.B)) for _ in range(params.N)),
        )


@dataclass(frozen=True)
class Placement:
    """Deterministic partition of [B] into contiguous blocks, one per t-subset."""

    params: SchemeParams
    subsets: tuple  # lexicographic t-subsets of [1..K]
    blocks: dict = dc_field(compare=False)  # subset -> range of 0-based positions

    def block(self, t_set) -> range:
        try:
            return self.blocks[tuple(t_set)]
        except KeyError:
            raise InvalidSubset(f"{t_set!r} is not a placement subset") from None

    def cache_subsets(self, k: int) -> list:
        """Subsets whose subfiles user k caches (those containing k)."""
        return [t_set for t_set in self.subsets if k in t_set]

    def cache_symbols_per_user(self) -> int:
        p = self.params
        if p.t == 0:
            return 0
        return p.B * p.N * comb(p.K - 1, p.t - 1) // comb(p.K, p.t)


def make_placement(params: SchemeParams) -> Placement:
    block_size = params.block_size
    t_sets = tuple(subsets(range(1, params.K + 1), params.t))
    blocks = {
        t_set: range(i * block_size, (i + 1) * block_size) for i, t_set in enumerate(t_sets)
    }
    return Placement(params, t_sets, blocks)


def user_cache(lib: Library, placement: Placement, k: int) -> dict:
    """Cache content of user k: (file index, subset) -> cached symbols."""
    out = {}
    for t_set in placement.cache_subsets(k):
        rng = placement.blocks[t_set]
        for i, f in enumerate(lib.files, start=1):
            out[(i, t_set)] = f[rng.start : rng.stop]
    return out


def demand_matrix_from_json(spec: FieldSpec, text_or_dict) -> FqMatrix:
    data = json.loads(text_or_dict) if isinstance(text_or_dict, str) else text_or_dict
    return FqMatrix(spec, data["D"])


@dataclass(frozen=True)
class TransformedDemand:
    """Leader set L, the K x |L| transformed demand matrix, and the expansion
    coefficients writing each non-leader demand in the leader basis."""

    D: FqMatrix
    leaders: tuple
    Dprime: FqMatrix
    x: dict = dc_field(compare=False)

    @property
    def r(self) -> int:
        return len(self.leaders)

    @property
    def spec(self) -> FieldSpec:
        return self.D.spec

    def x_entry(self, k: int, leader: int) -> int:
        return self.x[(k, leader)]


def select_leaders(D: FqMatrix, leaders=None) -> TransformedDemand:
    """Pick a leader set and build the transformed demand matrix.

    The default choice is greedy-lexicographic: scan users 1..K and keep a
    row whenever it increases the rank.  A caller-supplied `leaders` tuple is
    validated instead (any basis of the row space is acceptable).
    """
    spec = D.spec
    K = D.rows
    total_rank = rank(D)
    if leaders is None:
        chosen = []
        kept_rows = []
        current = 0
        for k in range(1, K + 1):
            candidate = kept_rows + [list(D.row(k - 1))]
            _, pivots = _rref([list(r) for r in candidate], spec)
            if len(pivots) > current:
                chosen.append(k)
                kept_rows = candidate
                current = len(pivots)
            if current == total_rank:
                break
        leaders = tuple(chosen)
    else:
        leaders = index_set(leaders)
        sub = D.submatrix([k - 1 for k in leaders], range(D.cols))
        if rank(sub) != len(leaders) or len(leaders) != total_rank:
            raise ValueError(f"{leaders} is not a valid leader set for this demand matrix")

    r = len(leaders)
    leader_rows = [list(D.row(k - 1)) for k in leaders]
    x = {}
    dprime_rows = []
    # d_k = sum_l x_{k,l} d_l: solve the transposed system per non-leader.
    transposed = [[leader_rows[j][c] for j in range(r)] for c in range(D.cols)]
    for k in range(1, K + 1):
        if k in leaders:
            dprime_rows.append([1 if k == leaders[j] else 0 for j in range(r)])
            continue
        rhs = [D.row(k - 1)[c] for c in range(D.cols)]
        sol, _ = solve_general([list(row) for row in transposed], rhs, spec)
        if sol is None:  # cannot happen: leaders span the row space
            raise RuntimeError("demand row outside the leader span")  # pragma: no cover
        dprime_rows.append(sol)
        for j, leader in enumerate(leaders):
            x[(k, leader)] = sol[j]
    return TransformedDemand(D, leaders, FqMatrix(spec, dprime_rows, cols=r), x)


def demand_block(lib: Library, placement: Placement, D: FqMatrix, k: int, t_set) -> tuple:
    """User k's demanded linear combination restricted to one block."""
    t_set = tuple(t_set)
    rng = placement.block(t_set)
    spec = lib.params.field
    add, mul = spec.add, spec.mul
    d_row = D.row(k - 1)
    out = []
    for pos in rng:
        acc = 0
        for i, coeff in enumerate(d_row):
            if coeff:
                acc = add(acc, mul(coeff, lib.files[i][pos]))
        out.append(acc)
    return tuple(out)


def full_demand(lib: Library, D: FqMatrix, k: int) -> tuple:
    """User k's demanded linear combination over the whole file length."""
    spec = lib.params.field
    add, mul = spec.add, spec.mul
    d_row = D.row(k - 1)
    out = [0] * lib.params.B
    for i, coeff in enumerate(d_row):
        if coeff:
            f = lib.files[i]
            for pos in range(lib.params.B):
                out[pos] = add(out[pos], mul(coeff, f[pos]))
    return tuple(out)


def theoretical_load(K: int, t: int, N: int) -> Fraction:
    """Worst-case load point at cache parameter t, as an exact rational."""
    return Fraction(comb(K, t + 1) - comb(K - min(N, K), t + 1), comb(K, t))


def delta_header(K: int, r: int, q: int) -> int:
    """Header symbols for shipping the leader set and transformed demands."""
    if r == 0:
        return 0
    digits = 1
    while q**digits < K:
        digits += 1
    return r * digits + K + r


def measured_load(messages, B: int, delta: int = 0) -> Fraction:
    """Transmitted symbols divided by file length; `delta` adds header symbols."""
    payload = sum(len(m.payload) for m in messages)
    return Fraction(payload + delta, B)


def worst_case_demand(params: SchemeParams) -> FqMatrix:
    """A full-rank demand matrix (rank = min(N, K)): unit-vector rows, cycled."""
    rows = []
    for k in range(params.K):
        row = [0] * params.N
        row[k % params.N] = 1
        rows.append(row)
    return FqMatrix(params.field, rows, cols=params.N)
