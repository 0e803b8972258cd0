"""Command-line front end.

Subcommands:
  graph   write the constraint graph (DOT per component) and the
          free/constrained coefficient analysis (JSON)
  verify  run a verification sweep over demand matrices; JSON-lines report
  demo    reproduce the 4-user / 5-user worked examples end to end

Exit codes: 0 pass, 1 verification failure, 2 usage error.  Set SLFR_LOG to
a level name (DEBUG, INFO, ...) for logging verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
from pathlib import Path

from . import codec, harness, worked_examples
from .field import GF, FieldSpec
from .graph import build_graph, component_dot, greedy_free_coefficients, spanning_tree
from .scheme import SchemeParams, demand_matrix_from_json, worst_case_demand

log = logging.getLogger("slfr")


def parse_field(text: str) -> FieldSpec:
    """Accept a prime, a prime power, or the explicit form p^m."""
    if "^" in text:
        p_str, m_str = text.split("^", 1)
        return GF(int(p_str), int(m_str))
    q = int(text)
    for p in range(2, q + 1):
        if q % p == 0:
            m = 0
            n = q
            while n % p == 0:
                n //= p
                m += 1
            if n != 1:
                raise ValueError(f"{q} is not a prime power")
            return GF(p, m)
    raise ValueError(f"{q} is not a valid field order")


def _add_common(parser):
    parser.add_argument("--K", type=int, required=True, help="number of users")
    parser.add_argument("--N", type=int, required=True, help="number of files")
    parser.add_argument("--t", type=int, required=True, help="cache parameter in [0, K]")
    parser.add_argument("--q", type=parse_field, required=True, metavar="Q",
                        help="field order, as a prime power or p^m")
    parser.add_argument("--B", type=int, default=None, help="file length (default C(K, t))")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--format", choices=["json", "dot", "text"], default="text")


def _build_params(args) -> SchemeParams:
    return SchemeParams(args.q, args.K, args.N, args.t, args.B)


def _load_alpha(params: SchemeParams, spec_text: str):
    if spec_text in ("wan", "random-free"):
        return spec_text
    if spec_text.startswith("file:"):
        data = json.loads(Path(spec_text[5:]).read_text())
        enc = codec.EncodingCoefficients.from_json(data)
        if enc.spec != params.field or enc.K != params.K or enc.t != params.t:
            raise ValueError("coefficient file does not match the scheme parameters")
        return enc
    raise ValueError(f"unknown alpha strategy {spec_text!r}")


def cmd_graph(args) -> int:
    params = _build_params(args)
    r = min(params.K, params.N)
    if args.demands and args.demands.startswith("file:"):
        D = demand_matrix_from_json(params.field, Path(args.demands[5:]).read_text())
        from .scheme import select_leaders

        leaders = select_leaders(D).leaders
        r = len(leaders)
    else:
        leaders = tuple(range(1, r + 1))
    if params.K - r < params.t + 1:
        print("nothing to reconstruct: every multicast message meets the leader set")
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / "coefficient_status.json").write_text(
                json.dumps({"components": 0, "free": [], "constrained": {}}, indent=2)
            )
        return 0
    graph = build_graph(params, leaders)
    status = greedy_free_coefficients(graph)
    out_dir = args.out or Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    for comp in graph.components:
        tree, _ = spanning_tree(comp)
        name = "component_" + "_".join(map(str, comp.A)) + ".dot"
        (out_dir / name).write_text(component_dot(comp, tree))
    status_doc = status.to_json()
    status_doc["components"] = len(graph.components)
    (out_dir / "coefficient_status.json").write_text(json.dumps(status_doc, indent=2))
    summary = (
        f"components: {len(graph.components)}, coefficients: {len(status.scores)}, "
        f"free: {len(status.free)}, constrained: {len(status.constrained)}"
    )
    if args.format == "json":
        print(json.dumps(status_doc, sort_keys=True))
    elif args.format == "dot":
        for comp in graph.components:
            print(component_dot(comp))
    else:
        print(summary)
        for cid, rel in sorted(status.constrained.items()):
            print(f"  constrained {rel.to_json()['target']}: "
                  f"sign {rel.to_json()['sign']}, factors {rel.to_json()['factors']}")
    log.info(summary)
    return 0


def cmd_verify(args) -> int:
    params = _build_params(args)
    alpha = _load_alpha(params, args.alpha)
    if args.demands.startswith("file:"):
        D = demand_matrix_from_json(params.field, Path(args.demands[5:]).read_text())
        demands = [D]
    elif args.demands in ("exhaustive", "random"):
        demands = args.demands
    else:
        raise ValueError(f"unknown demand source {args.demands!r}")
    report = harness.sweep(
        params,
        demands=demands,
        alpha_strategy=alpha,
        seed=args.seed,
        trials=args.trials,
        check_oracle=args.oracle,
    )
    lines = report.to_json_lines()
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "report.jsonl").write_text("\n".join(lines) + "\n")
        print(f"{report.passed}/{report.total} trials passed")
    elif args.format == "text":
        print(f"{report.passed}/{report.total} trials passed")
        for failure in report.failures[:10]:
            print(f"  FAIL {failure}")
    else:
        for line in lines:
            print(line)
    return 0 if report.all_pass else 1


def cmd_demo(args) -> int:
    which = args.which
    K = 4 if which == "appendix-a" else 5
    spec_eval = GF(7)
    spec_run = GF(3)
    params_eval = SchemeParams(spec_eval, K, 2, 1)
    leaders = (1, 2)
    graph = build_graph(params_eval, leaders)
    status = greedy_free_coefficients(graph)
    known = (
        worked_examples.FOUR_USER_FORMS if K == 4 else worked_examples.FIVE_USER_FORMS
    )
    identities = worked_examples.FOUR_USER_IDENTITIES if K == 4 else ()
    print(f"{K} users, leaders {{1,2}}, t=1: {len(graph.components)} component(s), "
          f"{len(status.constrained)} constrained coefficient(s)")
    for cid, rel in sorted(status.constrained.items()):
        doc = rel.to_json()
        print(f"  {doc['target']} = sign({doc['sign']}) * {doc['factors']}")
    rng = random.Random(args.seed)
    mismatches = worked_examples.equivalence_mismatches(
        worked_examples.status_forms(status), known, K, 1, spec_eval, rng,
        trials=50, identities=identities,
    )
    print(f"equivalence with the reference solved forms: "
          f"{'ok' if mismatches == 0 else f'{mismatches} mismatches'}")

    wan = codec.wan_alpha(SchemeParams(spec_run, K, 2, 1), leaders)
    graph_run = build_graph(SchemeParams(spec_run, K, 2, 1), leaders)
    status_run = greedy_free_coefficients(graph_run)
    wan_ok = all(rel.holds(spec_run, wan.alpha) for rel in status_run.constrained.values())
    print(f"alternating-sign coefficients satisfy every constraint: {'ok' if wan_ok else 'VIOLATED'}")

    params_run = SchemeParams(spec_run, K, 2, 1)
    trial = harness.simulate(params_run, worst_case_demand(params_run), "wan", seed=args.seed,
                             check_oracle=True)
    print(f"end-to-end decode over GF(3): {'ok' if trial.success else 'FAILED'} "
          f"(load {trial.load_measured}, reference {trial.load_theoretical})")
    ok = mismatches == 0 and wan_ok and trial.success
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slfr",
        description="Construct, analyze, and verify linear coded-caching schemes "
                    "for scalar linear function retrieval.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_graph = sub.add_parser("graph", help="export constraint graph and coefficient analysis")
    _add_common(p_graph)
    p_graph.add_argument("--demands", default=None,
                         help="file:PATH fixes the leader count from a demand matrix")
    p_graph.set_defaults(func=cmd_graph)

    p_verify = sub.add_parser("verify", help="run a verification sweep")
    _add_common(p_verify)
    p_verify.add_argument("--alpha", default="wan",
                          help="wan | random-free | file:PATH (default wan)")
    p_verify.add_argument("--demands", default="random",
                          help="random | exhaustive | file:PATH (default random)")
    p_verify.add_argument("--trials", type=int, default=100,
                          help="trial count for random demands")
    p_verify.add_argument("--oracle", action="store_true",
                          help="also cross-check decoding coefficients against the brute-force solver")
    p_verify.set_defaults(func=cmd_verify)

    p_demo = sub.add_parser("demo", help="reproduce a worked example")
    p_demo.add_argument("which", choices=["appendix-a", "appendix-b"])
    p_demo.add_argument("--seed", type=int, default=0)
    p_demo.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("SLFR_LOG", "WARNING"))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, harness.BudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
