"""Index-set utilities: fixed-size subset enumeration, the 1-based position
function, and order-preserving set operations.

User indices are 1-based throughout; an index set is a strictly increasing
tuple of ints, which is hashable and therefore usable as a mapping key.
Subset families are always emitted in lexicographic order so every map keyed
by index sets is byte-reproducible.
"""

from __future__ import annotations

from itertools import combinations


class InvalidSize(ValueError):
    pass


def index_set(values) -> tuple:
    """Canonicalize to a strictly increasing tuple; duplicates are an error."""
    out = tuple(sorted(values))
    if any(out[i] == out[i + 1] for i in range(len(out) - 1)):
        raise ValueError(f"duplicate indices in {values!r}")
    return out


def subsets(ground, size: int) -> list:
    """All size-`size` subsets of `ground`, lexicographic, each increasing."""
    ground = index_set(ground)
    if not 0 <= size <= len(ground):
        raise InvalidSize(f"size {size} outside [0, {len(ground)}]")
    return list(combinations(ground, size))


def ind(s, k: int) -> int:
    """1-based position of k in the increasing set s; 0 when absent."""
    for pos, member in enumerate(s, start=1):
        if member == k:
            return pos
    return 0


def hierarchy(s, leaders) -> int:
    """Number of leaders contained in s."""
    lead = set(leaders)
    return sum(1 for k in s if k in lead)


def diff(a, b) -> tuple:
    drop = set(b)
    return tuple(x for x in a if x not in drop)


def inter(a, b) -> tuple:
    keep = set(b)
    return tuple(x for x in a if x in keep)


def union(a, b) -> tuple:
    return tuple(sorted(set(a) | set(b)))


def complement(k_users: int, s) -> tuple:
    """[K] \\ s for the 1-based ground set [1..K]."""
    drop = set(s)
    return tuple(k for k in range(1, k_users + 1) if k not in drop)
