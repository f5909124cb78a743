"""Command-line driver.

Every subcommand writes a line-delimited JSON record stream (header first) to
``--output`` or stdout, and a summary table to stderr. Exit codes: 0 success,
1 usage error, 2 a checked criterion failed.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import acceptance, comm, graphs, rounds
from .address import address_table, brute_force_min_queries, dt_tester_fk, dt_tester_fprime
from .codes import (corrupt, encode, exact_distance, hadamard_code, identity_code, local_test,
                    relaxed_decode)
from .core import LinearOracle, PointOracle, derive_rng, estimate_acceptance, run
from .errors import CapExceeded
from .records import render_table, write_stream
from .transference import LiftedProperty, dt_to_pt, lifted_distance, pt_to_ldt

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2

# operation -> subcommand that exercises it
OPERATIONS = {
    "g_iter": "address", "f_k": "address", "f_prime_k": "address", "dt_tester_fk": "address",
    "dt_tester_fprime": "address", "brute_force_min_queries": "address",
    "hadamard_code": "codes", "encode": "codes", "local_test": "codes",
    "relaxed_decode": "codes", "exact_distance": "codes",
    "pt_to_ldt": "transfer", "dt_to_pt": "transfer", "lifted_distance": "transfer",
    "gen_yes": "graphs", "gen_no": "graphs", "bfs_cycle_tester": "graphs",
    "has_cycle_leq": "graphs", "simulate_answers": "graphs", "estimate_gap": "graphs",
    "expand_nonadaptive": "rounds", "contract_one_round": "rounds", "strategy_to_tree": "rounds",
    "pi_k": "comm", "embed_instance": "comm", "ldt_to_protocol": "comm", "disj_parity_map": "comm",
    "run_suite": "suite",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(kind):
    def parse(text):
        value = kind(text)
        if value <= 0:
            raise argparse.ArgumentTypeError(f"expected a positive value, got {text}")
        return value
    return parse


def _default_seed() -> int:
    return int(os.environ.get("ROUNDLAB_SEED", "0"))


# ---------------------------------------------------------------------------
# subcommands: each returns (records, passed)


def cmd_address(args):
    k = 1 if args.k is None else args.k
    table = address_table(args.p, k, prime=args.prime)
    try:
        exact = args.rounds <= 1
        min_q = brute_force_min_queries(table, args.rounds, exact=exact)
    except CapExceeded as err:
        raise UsageError(str(err)) from err
    tester = dt_tester_fprime(k) if args.prime else dt_tester_fk(k)
    tree = rounds.strategy_to_tree(tester, args.p, sigma=args.p)
    X = np.array(list(np.ndindex(*(args.p,) * args.p)), dtype=np.int64)
    errors = int(np.sum(tree.evaluate_all(X).astype(np.int64) != table.values.ravel()))
    record = {"function": ("f_prime" if args.prime else "f") + f"_{k}", "p": args.p, "k": k,
              "rounds": args.rounds, "min_queries": min_q, "exact": exact,
              "dt_queries": tester.max_queries, "dt_errors": errors}
    return [record], errors == 0


def cmd_codes(args):
    code = hadamard_code(args.p, args.N)
    rng = derive_rng(args.seed, "codes")
    budget = max(1, int(args.corrupt * code.M))
    test_fail = dec_ok = dist_ok = 0
    for t in range(args.trials):
        x = rng.integers(args.p, size=code.N)
        word = encode(code, x)
        test_fail += local_test(code, word, 1, seed=derive_rng(args.seed, "lt", t)) != "accept"
        bad = corrupt(word, rng.choice(code.M, size=budget, replace=False), rng, args.p)
        i = int(rng.integers(1, code.N + 1))
        dec_ok += relaxed_decode(code, bad, i, seed=derive_rng(args.seed, "dec", t)) == x[i - 1]
        nearest, _ = exact_distance(code, bad)
        dist_ok += nearest == tuple(int(v) for v in x)
    record = {"p": args.p, "N": args.N, "M": code.M, "trials": args.trials,
              "corrupted": budget, "test_failures": test_fail,
              "decode_accuracy": dec_ok / args.trials, "nearest_recovered": dist_ok / args.trials}
    return [record], test_fail == 0


def cmd_transfer(args):
    k = 1 if args.k is None else args.k
    code = hadamard_code(args.p, args.p)
    prop = LiftedProperty(code, address_table(args.p, k))
    dt = dt_tester_fk(k)
    tester = dt_to_pt(dt, code, eps=args.eps or code.decoding_radius)
    records, ok = [], True
    rng = derive_rng(args.seed, "transfer")
    for t in range(args.inputs):
        x = tuple(int(v) for v in rng.integers(args.p, size=args.p))
        word = encode(code, np.array(x))
        used = set()
        est = estimate_acceptance(tester, lambda r, w=word: PointOracle(w), args.trials,
                                  derive_rng(args.seed, "tr", t).integers(2**31),
                                  on_transcript=lambda tr: used.add(tr.rounds_used))
        member = prop.contains(word)
        ldt = run(pt_to_ldt(tester, code), LinearOracle(x, args.p), seed=t).verdict
        ok &= (est.probability == 1.0) if member else (est.probability <= 1 / 3 + 0.05)
        ok &= used == {dt.rounds + 1}
        records.append({"x": list(x), "member": member, "acceptance": est.probability,
                        "half_width": est.half_width, "rounds_used": sorted(used),
                        "distance": lifted_distance(word, prop), "ldt_output": ldt})
    return records, ok


def cmd_graphs(args):
    n, k, d = args.n, args.k, args.d
    if n < 2 * k + 4:
        raise UsageError("--n must be at least 2k+4")
    sources = args.query_budget or max(1, math.isqrt(n) // 10)
    tester_rounds = k - 1 if args.rounds_budget is None else args.rounds_budget
    if tester_rounds < 0:
        raise UsageError("the restricted tester needs k >= 1 or --rounds-budget >= 0")
    tester = graphs.bfs_cycle_tester(tester_rounds, 2 * k + 3, d=d, sources=sources)
    gap = graphs.estimate_gap(tester, n, k, args.trials, args.seed, d)
    sim = estimate_acceptance(tester, graphs.simulator_sampler(n), args.trials,
                              derive_rng(args.seed, "sim").integers(2**31))
    full = graphs.bfs_cycle_tester(k, 2 * k + 1, eps=args.eps, d=d)
    one_sided = estimate_acceptance(full, graphs.yes_sampler(n, k, d), args.trials,
                                    derive_rng(args.seed, "os").integers(2**31))
    sample = graphs.gen_no(n, k, args.seed, d)
    record = {"n": n, "k": k, "d": d, "tester": tester.name, **gap.to_record(),
              "acc_sim": sim.probability, "full_tester_acc_yes": one_sided.probability,
              "no_has_short_cycle": graphs.has_cycle_leq(sample, 2 * k + 3)}
    return [record], one_sided.probability == 1.0 and gap.gap <= 0.1 + gap.ci


def cmd_rounds(args):
    rng = derive_rng(args.seed, "rounds")
    records, ok = [], True
    for t in range(args.trials):
        tree = rounds.random_tree(args.n_vars, args.depth, rng, leaf_prob=0.0)
        rep = rounds.contraction_report(tree)
        passed = all(rep[key] for key in ("expand_ok", "expand_bound_ok", "contract_ok", "contract_bound_ok"))
        ok &= passed
        records.append({"tree": t, **{k: v for k, v in rep.items() if k != "batches_after"}})
    return records, ok


def cmd_comm(args):
    n = args.n
    h = (n - 1) // 2
    k = 0 if args.k is None else args.k
    ldt = pt_to_ldt(dt_tester_fk(k + 1), identity_code(n, n))
    records, ok = [], True
    for t in range(args.trials):
        inst = comm.random_instance(h, derive_rng(args.seed, "comm", t))
        protocol = comm.ldt_to_protocol(ldt, inst, n, seed=t)
        expected = int(inst.label(comm.pi_k(inst, k + 2)) % 2 == 0)
        good = (protocol.rounds == ldt.rounds + 2 and protocol.output == expected
                and protocol.total_bits <= comm.bit_budget(protocol.queries, n))
        ok &= good
        records.append({"instance": t, "expected": expected, **protocol.to_record()})
    rng = derive_rng(args.seed, "disj")
    x, y = comm.random_promise_pair(args.m * args.m * 4, args.m, rng)
    oracle = comm.disj_parity_map(x, y, args.m)
    size = comm.parity_size(oracle)
    ok &= size == 2 * args.m - 2 * int(np.sum(x & y))
    records.append({"disjointness_n": len(x), "m": args.m, "parity_size": size,
                    "intersection": int(np.sum(x & y)), "bits": oracle.bits_exchanged})
    return records, ok


def cmd_suite(args):
    only = args.criteria or None
    results = acceptance.run_suite(args.seed, args.scale, only)
    for r in results:
        print(r.line(), file=sys.stderr)
    return [r.to_record() for r in results], all(r.passed for r in results)


COMMANDS = {"address": cmd_address, "codes": cmd_codes, "transfer": cmd_transfer,
            "graphs": cmd_graphs, "rounds": cmd_rounds, "comm": cmd_comm, "suite": cmd_suite}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master seed (default: $ROUNDLAB_SEED or 0)")
    common.add_argument("--trials", type=_positive(int), default=100)
    common.add_argument("--output", default=None, help="record stream path (default: stdout)")

    parser = _Parser(prog="roundlab", description="Round-adaptivity experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("address", parents=[common], help="iterated address functions")
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--rounds", type=int, default=0)
    p.add_argument("--prime", action="store_true", help="use f'_k instead of f_k")

    p = sub.add_parser("codes", parents=[common], help="Hadamard code tester and decoder")
    p.add_argument("--p", type=int, default=5)
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--corrupt", type=float, default=0.05)

    p = sub.add_parser("transfer", parents=[common], help="decision tree to tester reduction")
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--eps", type=_positive(float), default=None)
    p.add_argument("--inputs", type=_positive(int), default=5)

    p = sub.add_parser("graphs", parents=[common], help="cycle testers and the gap experiment")
    p.add_argument("--n", type=_positive(int), default=10**4)
    p.add_argument("--k", type=_positive(int), default=2)
    p.add_argument("--d", type=int, default=graphs.DEFAULT_DEGREE)
    p.add_argument("--eps", type=_positive(float), default=0.1)
    p.add_argument("--rounds-budget", type=int, default=None)
    p.add_argument("--query-budget", type=_positive(int), default=None, help="number of BFS sources")

    p = sub.add_parser("rounds", parents=[common], help="decision-tree round surgery")
    p.add_argument("--n-vars", type=_positive(int), default=8)
    p.add_argument("--depth", type=int, default=3)

    p = sub.add_parser("comm", parents=[common], help="pointer-following protocols")
    p.add_argument("--n", type=int, default=101)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--m", type=_positive(int), default=2)

    p = sub.add_parser("suite", parents=[common], help="run the acceptance criteria")
    p.add_argument("--scale", type=_positive(float), default=1.0)
    p.add_argument("--criteria", type=int, nargs="*", choices=range(1, 12))
    return parser


def _validate(args) -> None:
    if getattr(args, "k", None) is not None and args.k < 0:
        raise UsageError("--k must be non-negative")
    if args.command == "graphs" and args.d < 2:
        raise UsageError("--d must be at least 2")
    if args.command == "rounds" and not 2 <= args.depth <= 6:
        raise UsageError("--depth must lie in [2, 6]")
    if args.command == "rounds" and args.n_vars > 12:
        raise UsageError("--n-vars must be at most 12")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.seed is None:
            args.seed = _default_seed()
        _validate(args)
        records, passed = COMMANDS[args.command](args)
    except UsageError as err:
        print(f"roundlab: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as err:
        print(f"roundlab: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("output",)}
    if args.output:
        with open(args.output, "w") as stream:
            write_stream(stream, args.command, config, records)
    else:
        write_stream(sys.stdout, args.command, config, records)
    sys.stderr.write(render_table(records))
    return EXIT_OK if passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
