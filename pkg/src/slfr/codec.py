"""Delivery phase: multicast messages, encoding coefficients, closed-form
decoding coefficients, and reconstruction/decoding.

Every multicast message is an encoding-coefficient-weighted sum of demand
blocks.  Messages useful only to non-leaders are never sent; each such
message, indexed by a (t+1)-subset A of non-leaders, is reconstructed from
the sent ones via decoding coefficients.  A decoding coefficient factors as
a demand-free part (a signed product of encoding-coefficient ratios, the
closed form computed here) times the determinant of a submatrix of the
transformed demand matrix.  The demand-free part of the root message is
pinned to -1; any nonzero root value works and is exposed as a parameter.

The closed form is the primary computation path: it only ever divides by
encoding coefficients, which are nonzero by definition.  The hierarchy
recursion (climbing the number of leaders in the message index) is kept as
an independent cross-check; its intermediate steps divide by demand minors
that can vanish for degenerate demands, in which case it reports
SingularIntermediate while the closed form remains valid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .combinat import complement, diff, index_set, ind, inter, subsets, union
from .field import FieldSpec
from .linalg import det
from .scheme import Library, Placement, SchemeParams, TransformedDemand, demand_block


class IncompleteCoefficients(ValueError):
    pass


class InvalidArguments(ValueError):
    pass


class SingularIntermediate(ArithmeticError):
    """A recursion step divided by a vanished demand minor."""


class ReconstructionMismatch(ValueError):
    """A reconstructed message differs from the directly computed one."""


class MissingMessage(LookupError):
    pass


def coefficient_domain(K: int, t: int) -> list:
    """All (k, T) pairs with T a t-subset of [K] not containing k."""
    if t + 1 > K:
        return []
    out = []
    for s_set in subsets(range(1, K + 1), t + 1):
        for k in s_set:
            out.append((k, diff(s_set, (k,))))
    return out


@dataclass(frozen=True)
class EncodingCoefficients:
    """Nonzero weights alpha[(k, T)] for demand block (k, T) inside message
    W_{{k} union T}; the domain must cover every such pair exactly."""

    spec: FieldSpec
    K: int
    t: int
    alpha: dict

    def __post_init__(self):
        domain = coefficient_domain(self.K, self.t)
        missing = [key for key in domain if key not in self.alpha]
        if missing:
            raise IncompleteCoefficients(f"missing {len(missing)} coefficients, e.g. {missing[0]}")
        extra = set(self.alpha) - set(domain)
        if extra:
            raise ValueError(f"unexpected coefficient keys: {sorted(extra)[:3]}")
        for key, v in self.alpha.items():
            if not 0 < v < self.spec.q:
                raise ValueError(f"coefficient {key} = {v} must be a nonzero encoding")

    def __getitem__(self, key) -> int:
        try:
            return self.alpha[key]
        except KeyError:
            raise IncompleteCoefficients(f"no coefficient for {key}") from None

    def to_json(self) -> dict:
        return {
            "field": self.spec.to_json(),
            "K": self.K,
            "t": self.t,
            "alpha": {_coeff_key(k, t_set): v for (k, t_set), v in sorted(self.alpha.items())},
        }

    @classmethod
    def from_json(cls, data) -> "EncodingCoefficients":
        if isinstance(data, str):
            data = json.loads(data)
        spec = FieldSpec.from_json(data["field"])
        alpha = {_parse_coeff_key(key): v for key, v in data["alpha"].items()}
        return cls(spec, data["K"], data["t"], alpha)


def _coeff_key(k: int, t_set) -> str:
    return f"k={k}|T={','.join(map(str, t_set))}"


def _parse_coeff_key(key: str):
    k_part, t_part = key.split("|T=")
    members = tuple(int(x) for x in t_part.split(",") if x)
    return (int(k_part.removeprefix("k=")), members)


def wan_alpha(params: SchemeParams, leaders) -> EncodingCoefficients:
    """The alternating plus/minus-one choice: the sign exponent is the position
    of k among the leaders of S plus its position among the non-leaders of S."""
    spec = params.field
    leaders = index_set(leaders)
    alpha = {}
    if params.t + 1 <= params.K:
        for s_set in subsets(range(1, params.K + 1), params.t + 1):
            in_l = inter(s_set, leaders)
            out_l = diff(s_set, leaders)
            for k in s_set:
                alpha[(k, diff(s_set, (k,)))] = spec.sign(ind(in_l, k) + ind(out_l, k))
    return EncodingCoefficients(spec, params.K, params.t, alpha)


@dataclass(frozen=True)
class MulticastMessage:
    subset: tuple
    payload: tuple

    def __len__(self):
        return len(self.payload)


def message_table(messages) -> dict:
    return {m.subset: m.payload for m in messages}


def build_messages(lib: Library, placement: Placement, td: TransformedDemand,
                   enc: EncodingCoefficients):
    """Form all multicast messages; return (sent, unsent index list).

    Sent messages are exactly those whose index meets the leader set; the
    remaining indices (subsets of non-leaders) must be reconstructed.
    """
    params = lib.params
    spec = params.field
    K, t = params.K, params.t
    leaders = td.leaders
    sent = []
    if t + 1 <= K:
        lead = set(leaders)
        for s_set in subsets(range(1, K + 1), t + 1):
            if not lead.intersection(s_set):
                continue
            payload = [0] * params.block_size
            for k in s_set:
                t_set = diff(s_set, (k,))
                a = enc[(k, t_set)]
                block = demand_block(lib, placement, td.D, k, t_set)
                for i, sym in enumerate(block):
                    payload[i] = spec.add(payload[i], spec.mul(a, sym))
            sent.append(MulticastMessage(s_set, tuple(payload)))
    non_leaders = complement(K, leaders)
    unsent = subsets(non_leaders, t + 1) if len(non_leaders) >= t + 1 else []
    return sent, unsent


def phi_sign(A, k: int, T, leaders) -> int:
    """Sign exponent on the edge (k, T) of the constraint component for A."""
    A = tuple(A)
    T = tuple(T)
    leaders = tuple(leaders)
    ground = set(A) | set(leaders)
    if k in T or k not in ground or not set(T) <= ground:
        raise InvalidArguments(f"k={k}, T={T} invalid for A={A}, leaders={leaders}")
    if k in leaders:
        s_set = union(T, (k,))
        return 1 + ind(diff(s_set, A), k)
    return ind(diff(A, T), k)


def _check_reduced_subset(A, S, leaders):
    A = tuple(A)
    S = tuple(S)
    if set(A) & set(leaders):
        raise InvalidArguments(f"A={A} must avoid the leader set {leaders}")
    if len(S) != len(A) or not set(S) <= set(A) | set(leaders):
        raise InvalidArguments(f"S={S} is not a reduced-system message index for A={A}")
    return A, S


def closed_form_beta_tilde(A, S, enc: EncodingCoefficients, leaders) -> int:
    """Demand-free factor of the decoding coefficient, as the alternating
    product of encoding-coefficient ratios; -1 for the root index S = A."""
    A, S = _check_reduced_subset(A, S, leaders)
    spec = enc.spec
    if S == A:
        return spec.minus_one
    ells = inter(S, leaders)   # leaders of S, increasing
    js = diff(A, S)            # non-leaders missing from S, increasing
    j_cluster = inter(S, A)    # non-leaders kept in S
    h = len(ells)
    acc = spec.sign(h + 1)
    for i in range(1, h + 1):
        t_set = index_set(js[i:] + ells[: i - 1] + j_cluster)
        acc = spec.mul(acc, spec.div(enc[(js[i - 1], t_set)], enc[(ells[i - 1], t_set)]))
    return acc


def _dprime_minor(td: TransformedDemand, row_users, col_leaders) -> int:
    rows = [k - 1 for k in row_users]
    cols = [td.leaders.index(l) for l in col_leaders]
    return det(td.Dprime.submatrix(rows, cols))


def closed_form_beta(A, S, td: TransformedDemand, enc: EncodingCoefficients) -> int:
    """Full decoding coefficient: demand-free factor times the minor of the
    transformed demand matrix on rows A\\S and columns S\\A."""
    A, S = _check_reduced_subset(A, S, td.leaders)
    tilde = closed_form_beta_tilde(A, S, enc, td.leaders)
    return td.spec.mul(tilde, _dprime_minor(td, diff(A, S), diff(S, A)))


def all_beta(A, td: TransformedDemand, enc: EncodingCoefficients, root: int | None = None) -> dict:
    """Closed-form decoding coefficients for every message index of the
    reduced system on A plus the leaders; `root` rescales the whole family
    (default -1, the conventional value at index A)."""
    spec = td.spec
    ground = union(A, td.leaders)
    scale = 1 if root is None else spec.mul(root, spec.minus_one)
    out = {}
    for s_set in subsets(ground, len(A)):
        out[s_set] = spec.mul(scale, closed_form_beta(A, s_set, td, enc))
    return out


def hierarchy_recursion_beta(A, td: TransformedDemand, enc: EncodingCoefficients) -> dict:
    """Decoding coefficients by induction on the leader count of the index.

    Each step expresses a coefficient whose index has h leaders through one
    whose index has h-1, dividing by a minor of the transformed demand
    matrix.  Raises SingularIntermediate when every candidate minor along
    the way vanishes; the closed form has no such failure mode.

    Chains only agree with the closed form (and with each other) when the
    encoding coefficients satisfy the cycle constraints; this is the
    cross-check path, not the primary one.
    """
    A = tuple(A)
    spec = td.spec
    leaders = td.leaders
    ground = union(A, leaders)
    t_plus_1 = len(A)
    beta = {A: spec.minus_one}
    max_h = min(t_plus_1, len(leaders))
    for h in range(1, max_h + 1):
        for s_set in subsets(ground, t_plus_1):
            if len(inter(s_set, leaders)) != h:
                continue
            beta[s_set] = _recursion_step(s_set, A, td, enc, beta)
    return beta


def _recursion_step(s_set, A, td, enc, beta):
    spec = td.spec
    leaders = td.leaders
    for leader in reversed(inter(s_set, leaders)):
        t_set = diff(s_set, (leader,))   # one hierarchy down
        js = diff(A, t_set)
        ells = inter(t_set, leaders)
        cols_up = index_set(ells + (leader,))
        for idx, j in enumerate(js):
            minor = _dprime_minor(td, diff(js, (j,)), ells)
            if minor == 0:
                continue
            prev = beta[index_set(t_set + (j,))]
            big = _dprime_minor(td, js, cols_up)
            exponent = (idx + 1) - 1 - ind(cols_up, leader)
            val = spec.mul(spec.sign(exponent), prev)
            val = spec.mul(val, spec.div(enc[(j, t_set)], enc[(leader, t_set)]))
            return spec.mul(val, spec.div(big, minor))
    raise SingularIntermediate(f"all candidate minors vanish for index {s_set} (A={A})")


def check_feasibility(A, td: TransformedDemand, enc: EncodingCoefficients, beta: dict) -> list:
    """Coefficient-level verification of the reconstruction identity.

    For every t-subset T of the reduced ground set and every leader l, the
    weighted sum of decoding coefficients against the demand expansion must
    cancel (or match the leader term when l is outside T).  Holding for all
    (T, l) makes reconstruction exact for every realization of the library.
    Returns the list of violated (T, l) pairs; empty means feasible.
    """
    spec = td.spec
    leaders = td.leaders
    A = tuple(A)
    t = len(A) - 1
    ground = union(A, leaders)
    violations = []
    for t_set in subsets(ground, t):
        a_out = diff(A, t_set)
        for leader in leaders:
            acc = 0
            for k in a_out:
                term = spec.mul(beta[index_set(t_set + (k,))], enc[(k, t_set)])
                acc = spec.add(acc, spec.mul(term, td.x_entry(k, leader)))
            if leader in t_set:
                expected = 0
            else:
                expected = spec.neg(
                    spec.mul(beta[index_set(t_set + (leader,))], enc[(leader, t_set)])
                )
            if acc != expected:
                violations.append((t_set, leader))
    return violations


def reconstruct_unsent(spec: FieldSpec, A, available, beta: dict, expected=None) -> MulticastMessage:
    """Rebuild the non-sent message indexed by A from sent payloads.

    `available` maps message indices to payloads.  When `expected` (the
    directly computed payload) is supplied, a mismatch raises
    ReconstructionMismatch — the signature of an infeasible coefficient
    assignment.
    """
    A = tuple(A)
    payload = None
    for s_set, b in beta.items():
        if s_set == A:
            continue
        try:
            w = available[s_set]
        except KeyError:
            raise MissingMessage(f"message {s_set} unavailable") from None
        if payload is None:
            payload = [0] * len(w)
        for i, sym in enumerate(w):
            payload[i] = spec.add(payload[i], spec.mul(b, sym))
    if payload is None:
        raise InvalidArguments(f"no decoding coefficients besides the root for A={A}")
    factor = spec.neg(spec.inv(beta[A]))
    payload = tuple(spec.mul(factor, sym) for sym in payload)
    if expected is not None and payload != tuple(expected):
        raise ReconstructionMismatch(f"reconstructed message {A} differs from the true one")
    return MulticastMessage(A, payload)


def user_decode(k: int, cache: dict, sent, reconstructed, placement: Placement,
                td: TransformedDemand, enc: EncodingCoefficients) -> tuple:
    """Recover user k's full demanded combination.

    Blocks indexed by subsets containing k come out of the cache; every
    other block is peeled from the message it rides in, after cancelling
    the cached users' contributions.  Uses only k's cache, the message
    payloads, and the (public) demand matrix.
    """
    params = placement.params
    spec = params.field
    d_row = td.D.row(k - 1)
    out = [0] * params.B
    if not any(d_row):
        return tuple(out)
    lookup = dict(sent)
    lookup.update(reconstructed)

    def cached_block(j: int, t_set) -> list:
        # t_set contains k, so every subfile on it is in k's cache
        dj = td.D.row(j - 1)
        acc = [0] * params.block_size
        for i, coeff in enumerate(dj, start=1):
            if coeff:
                piece = cache[(i, t_set)]
                for pos in range(params.block_size):
                    acc[pos] = spec.add(acc[pos], spec.mul(coeff, piece[pos]))
        return acc

    for t_set in placement.subsets:
        if k in t_set:
            block = cached_block(k, t_set)
        else:
            s_set = index_set(t_set + (k,))
            if s_set not in lookup:
                raise MissingMessage(f"user {k} lacks message {s_set}")
            w = lookup[s_set]
            block = list(w)
            for j in t_set:
                t_other = diff(s_set, (j,))
                a_j = enc[(j, t_other)]
                for pos, sym in enumerate(cached_block(j, t_other)):
                    block[pos] = spec.sub(block[pos], spec.mul(a_j, sym))
            a_inv = spec.inv(enc[(k, t_set)])
            block = [spec.mul(a_inv, sym) for sym in block]
        rng = placement.blocks[t_set]
        for offset, pos in enumerate(rng):
            out[pos] = block[offset]
    return tuple(out)


@dataclass(frozen=True)
class DecodingCoefficients:
    """All closed-form decoding data: beta, its demand-free factor, and the
    per-(A, T) constants shared by the edges at T."""

    beta: dict        # (A, S) -> encoding
    beta_tilde: dict  # (A, S) -> encoding
    c: dict           # (A, T) -> encoding

    @classmethod
    def compute(cls, td: TransformedDemand, enc: EncodingCoefficients) -> "DecodingCoefficients":
        spec = td.spec
        leaders = td.leaders
        non_leaders = complement(enc.K, leaders)
        beta, beta_tilde, c = {}, {}, {}
        if len(non_leaders) < enc.t + 1:
            return cls(beta, beta_tilde, c)
        for A in subsets(non_leaders, enc.t + 1):
            ground = union(A, leaders)
            for s_set in subsets(ground, enc.t + 1):
                beta_tilde[(A, s_set)] = closed_form_beta_tilde(A, s_set, enc, leaders)
                beta[(A, s_set)] = closed_form_beta(A, s_set, td, enc)
            for t_set in subsets(ground, enc.t):
                k = diff(ground, t_set)[0]
                tilde = beta_tilde[(A, index_set(t_set + (k,)))]
                sign = spec.sign(phi_sign(A, k, t_set, leaders))
                c[(A, t_set)] = spec.mul(sign, spec.mul(enc[(k, t_set)], tilde))
        return cls(beta, beta_tilde, c)

    def to_json(self) -> dict:
        def fmt(tag, mapping):
            return {
                f"A={','.join(map(str, a))}|{tag}={','.join(map(str, key))}": v
                for (a, key), v in sorted(mapping.items())
            }

        return {
            "beta": fmt("S", self.beta),
            "beta_tilde": fmt("S", self.beta_tilde),
            "c": fmt("T", self.c),
        }


def coefficient_assignment_json(enc: EncodingCoefficients, dec: DecodingCoefficients) -> dict:
    out = enc.to_json()
    out.update(dec.to_json())
    return out
