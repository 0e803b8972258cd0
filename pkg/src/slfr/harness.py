"""Independent oracles and end-to-end simulation.

The oracle sets up the reconstruction-identity equations per non-sent
message index as one explicit linear system over the unknown decoding
coefficients and solves it by elimination — a route entirely separate from
the closed-form products, so agreement between the two is meaningful.
Simulation runs the whole pipeline (placement, delivery, reconstruction,
per-user decoding) on a seeded random library and reports exact loads.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from itertools import product

from . import codec
from .codec import EncodingCoefficients, MulticastMessage, message_table
from .combinat import diff, index_set, subsets, union
from .graph import random_feasible_alpha
from .linalg import FqMatrix, solve_general
from .scheme import (
    Library,
    SchemeParams,
    TransformedDemand,
    delta_header,
    demand_block,
    full_demand,
    make_placement,
    measured_load,
    select_leaders,
    theoretical_load,
    user_cache,
)


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleResult:
    """Outcome of brute-force solving for the decoding coefficients.

    `status` is "unique", "underdetermined", or "infeasible"; `beta` is a
    particular solution (free variables zeroed) including the pinned root,
    or None when infeasible."""

    status: str
    beta: dict | None
    nullity: int


def oracle_beta(A, td: TransformedDemand, enc: EncodingCoefficients) -> OracleResult:
    """Assemble and solve the full coefficient-level linear system for A."""
    spec = td.spec
    leaders = td.leaders
    A = tuple(A)
    t = len(A) - 1
    ground = union(A, leaders)
    unknowns = [s for s in subsets(ground, t + 1) if s != A]
    col = {s: i for i, s in enumerate(unknowns)}
    rows, rhs = [], []
    for t_set in subsets(ground, t):
        for leader in leaders:
            row = [0] * len(unknowns)
            b = 0
            for k in diff(A, t_set):
                coeff = spec.mul(enc[(k, t_set)], td.x_entry(k, leader))
                s_k = index_set(t_set + (k,))
                if s_k == A:
                    # the root coefficient is pinned to -1; move it across
                    b = spec.add(b, coeff)
                else:
                    row[col[s_k]] = spec.add(row[col[s_k]], coeff)
            if leader not in t_set:
                s_l = index_set(t_set + (leader,))
                row[col[s_l]] = spec.add(row[col[s_l]], enc[(leader, t_set)])
            rows.append(row)
            rhs.append(b)
    solution, nullity = solve_general(rows, rhs, spec)
    if solution is None:
        return OracleResult("infeasible", None, nullity)
    beta = {A: spec.minus_one}
    beta.update({s: solution[i] for s, i in col.items()})
    status = "unique" if nullity == 0 else "underdetermined"
    return OracleResult(status, beta, nullity)


def true_message(lib: Library, placement, td: TransformedDemand,
                 enc: EncodingCoefficients, s_set) -> MulticastMessage:
    """Directly computed multicast payload for an arbitrary index."""
    spec = lib.params.field
    payload = [0] * lib.params.block_size
    for k in s_set:
        t_set = diff(s_set, (k,))
        a = enc[(k, t_set)]
        for i, sym in enumerate(demand_block(lib, placement, td.D, k, t_set)):
            payload[i] = spec.add(payload[i], spec.mul(a, sym))
    return MulticastMessage(tuple(s_set), tuple(payload))


@dataclass
class TrialReport:
    params: dict
    seed: int
    alpha_strategy: str
    demand: list
    leaders: list
    r: int
    load_measured: str
    load_theoretical: str
    delta: int
    users_ok: list
    decode_ok: bool
    reconstruction_ok: bool
    feasibility_ok: bool
    oracle_ok: bool | None
    success: bool
    error: str | None

    def to_json_line(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)


def _params_echo(params: SchemeParams) -> dict:
    return {
        "K": params.K,
        "N": params.N,
        "t": params.t,
        "B": params.B,
        "field": params.field.to_json(),
    }


def resolve_alpha(params: SchemeParams, leaders, strategy, rng) -> tuple:
    """Map an alpha strategy (name, coefficients, or raw dict) to coefficients."""
    if isinstance(strategy, EncodingCoefficients):
        return strategy, "explicit"
    if isinstance(strategy, dict):
        return EncodingCoefficients(params.field, params.K, params.t, strategy), "explicit"
    if strategy == "wan":
        return codec.wan_alpha(params, leaders), "wan"
    if strategy == "random-free":
        return random_feasible_alpha(params, leaders, rng), "random-free"
    raise ValueError(f"unknown alpha strategy {strategy!r}")


def simulate(params: SchemeParams, D: FqMatrix, alpha_strategy="wan", seed: int = 0,
             check_oracle: bool = False) -> TrialReport:
    """One full placement -> delivery -> reconstruction -> decode run.

    Deterministic given (params, D, alpha_strategy, seed); module errors are
    captured in the report rather than raised."""
    rng = random.Random(seed)
    lib = Library.random(params, rng)
    placement = make_placement(params)
    td = select_leaders(D)
    spec = params.field
    report = dict(
        params=_params_echo(params),
        seed=seed,
        alpha_strategy=str(alpha_strategy) if isinstance(alpha_strategy, str) else "explicit",
        demand=D.to_lists(),
        leaders=list(td.leaders),
        r=td.r,
        load_theoretical=str(theoretical_load(params.K, params.t, params.N)),
        delta=delta_header(params.K, td.r, params.q),
        users_ok=[False] * params.K,
        decode_ok=False,
        reconstruction_ok=False,
        feasibility_ok=False,
        oracle_ok=None,
        error=None,
    )
    try:
        if td.r == 0:
            # all-zero demand: nothing to send, everyone needs the zero vector
            report.update(
                load_measured=str(measured_load([], params.B)),
                users_ok=[True] * params.K,
                decode_ok=True,
                reconstruction_ok=True,
                feasibility_ok=True,
            )
            return TrialReport(success=True, **report)

        enc, strategy_name = resolve_alpha(params, td.leaders, alpha_strategy, rng)
        report["alpha_strategy"] = strategy_name
        sent, unsent = codec.build_messages(lib, placement, td, enc)
        report["load_measured"] = str(measured_load(sent, params.B))
        sent_table = message_table(sent)

        recon_table = {}
        feasible = True
        oracle_ok = True if check_oracle else None
        for A in unsent:
            beta = codec.all_beta(A, td, enc)
            if codec.check_feasibility(A, td, enc, beta):
                feasible = False
            expected = true_message(lib, placement, td, enc, A)
            rebuilt = codec.reconstruct_unsent(spec, A, sent_table, beta, expected.payload)
            recon_table[rebuilt.subset] = rebuilt.payload
            if check_oracle:
                result = oracle_beta(A, td, enc)
                if result.status == "infeasible":
                    oracle_ok = False
                elif result.status == "unique":
                    oracle_ok = oracle_ok and (result.beta == beta)
                else:
                    oracle_ok = oracle_ok and not codec.check_feasibility(A, td, enc, result.beta)
        report["reconstruction_ok"] = True
        report["feasibility_ok"] = feasible
        report["oracle_ok"] = oracle_ok

        users_ok = []
        for k in range(1, params.K + 1):
            cache = user_cache(lib, placement, k)
            decoded = codec.user_decode(k, cache, sent_table, recon_table, placement, td, enc)
            users_ok.append(decoded == full_demand(lib, td.D, k))
        report["users_ok"] = users_ok
        report["decode_ok"] = all(users_ok)
        success = (
            report["decode_ok"]
            and feasible
            and report["reconstruction_ok"]
            and (oracle_ok is None or oracle_ok)
        )
        return TrialReport(success=success, **report)
    except (codec.ReconstructionMismatch, codec.SingularIntermediate,
            codec.MissingMessage, codec.IncompleteCoefficients, ValueError) as exc:
        report["error"] = f"{type(exc).__name__}: {exc}"
        report.setdefault("load_measured", "0")
        return TrialReport(success=False, **report)


@dataclass
class SweepReport:
    params: dict
    total: int
    passed: int
    failures: list
    reports: list

    @property
    def all_pass(self) -> bool:
        return self.passed == self.total

    def to_json_lines(self):
        for rep in self.reports:
            yield rep.to_json_line()
        yield json.dumps(
            {
                "aggregate": True,
                "total": self.total,
                "passed": self.passed,
                "all_pass": self.all_pass,
                "failures": self.failures[:20],
            },
            sort_keys=True,
        )


def _exhaustive_demands(params: SchemeParams):
    q, K, N = params.q, params.K, params.N
    for flat in product(range(q), repeat=K * N):
        yield FqMatrix(params.field, [flat[i * N : (i + 1) * N] for i in range(K)], cols=N)


def sweep(params: SchemeParams, demands="exhaustive", alpha_strategy="wan", seed: int = 0,
          trials: int = 100, check_oracle: bool = False,
          exhaustive_limit: int = 1 << 20, keep_reports: bool = True) -> SweepReport:
    """Run simulate over a family of demand matrices at one parameter point.

    `demands` is "exhaustive" (all q^(K*N) matrices, bounded by
    `exhaustive_limit`), "random" (`trials` seeded draws), or an iterable of
    demand matrices."""
    if demands == "exhaustive":
        total = params.q ** (params.K * params.N)
        if total > exhaustive_limit:
            raise BudgetExceeded(f"{total} demand matrices exceed the budget {exhaustive_limit}")
        source = _exhaustive_demands(params)
    elif demands == "random":
        rng = random.Random(seed)
        source = (
            FqMatrix(
                params.field,
                [[rng.randrange(params.q) for _ in range(params.N)] for _ in range(params.K)],
                cols=params.N,
            )
            for _ in range(trials)
        )
    else:
        source = iter(demands)

    passed = 0
    failures = []
    reports = []
    total = 0
    for idx, D in enumerate(source):
        rep = simulate(params, D, alpha_strategy, seed=seed + idx, check_oracle=check_oracle)
        total += 1
        if rep.success:
            passed += 1
        else:
            failures.append({"index": idx, "demand": D.to_lists(), "error": rep.error})
        if keep_reports:
            reports.append(rep)
    return SweepReport(_params_echo(params), total, passed, failures, reports)
