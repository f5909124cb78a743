"""The acceptance suite: one function per criterion, each returning a CriterionResult.

Every criterion takes ``seed`` and ``scale``; ``scale`` multiplies trial
counts (1.0 is the full suite) and never changes tolerances.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import comm, graphs, rounds
from .address import address_table, brute_force_min_queries, dt_tester_fk, f_k
from .codes import (corrupt, encode, hadamard_code, identity_code, local_test_strategy,
                    relaxed_decoder_strategy)
from .core import LinearOracle, PointOracle, derive_rng, estimate_acceptance, run
from .transference import LiftedProperty, dt_to_pt, pt_to_ldt


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        info = ", ".join(f"{k}={_short(v)}" for k, v in self.details.items())
        return f"[{flag}] criterion {self.number}: {self.title} ({info})"

    def to_record(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": self.passed, **self.details}


def _short(v):
    return f"{v:.4g}" if isinstance(v, float) else v


def _scaled(count: int, scale: float) -> int:
    return max(1, int(round(count * scale)))


def _sub(seed, *keys) -> int:
    return int(derive_rng(seed, *keys).integers(2**31))


# ---------------------------------------------------------------------------


def fk_values(p: int, k: int) -> np.ndarray:
    """f_k on all p^p inputs in lexicographic order, computed by array pointer chasing."""
    X = np.array(np.meshgrid(*[np.arange(p)] * p, indexing="ij")).reshape(p, -1).T
    value = X[:, 0].copy()
    rows = np.arange(len(X))
    for _ in range(k):
        value = X[rows, value]
    return (value % 2 == 0).astype(np.int64), X


def criterion_1(seed=0, scale=1.0) -> CriterionResult:
    errors, bad_shape, checked = 0, 0, 0
    for p in (3, 5, 7):
        for k in range(5):
            truth, X = fk_values(p, k)
            strategy = dt_tester_fk(k)
            tree = rounds.strategy_to_tree(strategy, p, sigma=p)
            got = tree.evaluate_all(X).astype(np.int64)
            errors += int(np.sum(got != truth))
            checked += len(X)
            if any(d != k + 1 or c != k + 1 for d, c in tree.paths()):
                bad_shape += 1
            rng = derive_rng(seed, "c1", p, k)
            for row in X[rng.choice(len(X), size=20, replace=False)]:
                t = run(strategy, PointOracle(row))
                if t.verdict != f_k(tuple(row), k) or t.rounds_used != k + 1 or t.total_queries != k + 1:
                    errors += 1
    return CriterionResult(1, "dt_tester_fk exact with k+1 queries in k+1 batches",
                           errors == 0 and bad_shape == 0,
                           {"inputs_checked": checked, "errors": errors, "bad_shapes": bad_shape})


def criterion_2(seed=0, scale=1.0) -> CriterionResult:
    got = {}
    for p in (3, 5):
        table = address_table(p, 1)
        got[p] = (brute_force_min_queries(table, 0), brute_force_min_queries(table, 1))
    ok = all(got[p] == (p, 2) for p in got)
    return CriterionResult(2, "brute-force separation for f_1", ok,
                           {f"p{p}": list(v) for p, v in got.items()})


def _transference_runs(seed, scale):
    code = hadamard_code(3, 3)
    f = address_table(3, 1)
    prop = LiftedProperty(code, f)
    dt = dt_tester_fk(1)
    tester = dt_to_pt(dt, code, eps=code.decoding_radius)
    trials = _scaled(1000, scale)
    members, nonmembers, round_mismatch = [], [], 0
    for x in np.ndindex(*(3,) * 3):
        word = encode(code, np.array(x))
        source_rounds = run(dt, PointOracle(x)).rounds_used
        used = []
        est = estimate_acceptance(tester, lambda rng, w=word: PointOracle(w), trials,
                                  _sub(seed, "c3", *x), on_transcript=lambda t: used.append(t.rounds_used))
        round_mismatch += sum(u != source_rounds for u in used)
        (members if f(x) == 1 else nonmembers).append(est.probability)
        assert prop.contains(word) == (f(x) == 1)
    return members, nonmembers, round_mismatch, trials


_C3_CACHE: dict = {}


def _transference_cached(seed, scale):
    key = (seed, scale)
    if key not in _C3_CACHE:
        _C3_CACHE[key] = _transference_runs(seed, scale)
    return _C3_CACHE[key]


def criterion_3(seed=0, scale=1.0) -> CriterionResult:
    members, nonmembers, _, trials = _transference_cached(seed, scale)
    min_accept = min(members)
    min_reject = min(1 - a for a in nonmembers)
    ok = min_accept == 1.0 and min_reject >= 2 / 3 - 0.05
    return CriterionResult(3, "dt_to_pt one-sided completeness and soundness on encodings", ok,
                           {"members": len(members), "nonmembers": len(nonmembers),
                            "trials_per_input": trials, "min_member_acceptance": min_accept,
                            "min_nonmember_rejection": min_reject})


def criterion_4(seed=0, scale=1.0) -> CriterionResult:
    members, nonmembers, mismatch, trials = _transference_cached(seed, scale)
    runs = (len(members) + len(nonmembers)) * trials
    return CriterionResult(4, "dt_to_pt preserves rounds_used", mismatch == 0,
                           {"runs": runs, "mismatches": mismatch})


def criterion_5(seed=0, scale=1.0) -> CriterionResult:
    test_trials = _scaled(10**5, scale)
    dec_trials = _scaled(10**4, scale)
    code = hadamard_code(5, 3)
    tester = local_test_strategy(code, 1)
    rng = derive_rng(seed, "c5")
    messages = rng.integers(5, size=(test_trials, code.N))
    failures = 0
    for t in range(test_trials):
        word = encode(code, messages[t])
        failures += run(tester, PointOracle(word), seed=derive_rng(seed, "c5t", t)).verdict != "accept"

    exact_errors, correct = 0, 0
    budget = max(1, int(0.05 * code.M))
    for t in range(dec_trials):
        x = rng.integers(5, size=code.N)
        i = int(rng.integers(1, code.N + 1))
        word = encode(code, x)
        decoder = relaxed_decoder_strategy(code, i)
        exact_errors += run(decoder, PointOracle(word), seed=derive_rng(seed, "c5e", t)).verdict != x[i - 1]
        bad = corrupt(word, rng.choice(code.M, size=budget, replace=False), rng, 5)
        correct += run(decoder, PointOracle(bad), seed=derive_rng(seed, "c5c", t)).verdict == x[i - 1]
    rate = correct / dec_trials
    ok = failures == 0 and exact_errors == 0 and rate >= 1 - 2 * 0.05
    return CriterionResult(5, "local test and relaxed decoder contracts", ok,
                           {"test_trials": test_trials, "test_failures": failures,
                            "decode_trials": dec_trials, "exact_errors": exact_errors,
                            "corrupted_fraction": budget / code.M, "corrupted_accuracy": rate})


def _far_instances(n, k, rng):
    """Short-cycle instances and their distance lower bounds (d = 3)."""
    short = 2 * k + 1
    if rng.random() < 0.5:
        count = n // short
        g = graphs.gen_cycles(n, [short] * count, rng)
    else:
        count = int(0.3 * n) // short
        rest = (n - count * short) // (2 * k + 4)
        g = graphs.gen_cycles(n, [short] * count + [2 * k + 4] * rest, rng)
    return g, graphs.removal_distance_bound(count, n, g.d)


def criterion_6(seed=0, scale=1.0) -> CriterionResult:
    per_cell = _scaled(2500, scale)
    far_trials = _scaled(250, scale)
    yes_rejections, far_rates, total = 0, {}, 0
    for k in (1, 2):
        tester = graphs.bfs_cycle_tester(k, 2 * k + 1, eps=0.1)
        for n in (10**3, 10**4):
            est = estimate_acceptance(tester, graphs.yes_sampler(n, k), per_cell, _sub(seed, "c6y", k, n))
            yes_rejections += round((1 - est.probability) * per_cell)
            total += per_cell
            rejected = 0
            for t in range(far_trials):
                rng = derive_rng(seed, "c6n", k, n, t)
                g, eps = _far_instances(n, k, rng)
                far_tester = graphs.bfs_cycle_tester(k, 2 * k + 1, eps=eps)
                rejected += not run(far_tester, graphs.GraphOracle(g), seed=rng).accepted
            far_rates[f"k{k}_n{n}"] = rejected / far_trials
    ok = yes_rejections == 0 and min(far_rates.values()) >= 2 / 3
    return CriterionResult(6, "BFS tester one-sided and sound on far instances", ok,
                           {"yes_instances": total, "yes_rejections": yes_rejections,
                            "min_far_rejection": min(far_rates.values())})


_GAP_CACHE: dict = {}


def _gaps(seed, scale):
    key = (seed, scale)
    if key not in _GAP_CACHE:
        trials = _scaled(10**4, scale)
        n, k = 10**4, 2
        tester = graphs.restricted_tester(n, k)
        small = graphs.estimate_gap(tester, n, k, trials, _sub(seed, "c7", n))
        large = graphs.estimate_gap(tester, 4 * n, k, trials, _sub(seed, "c7", 4 * n))
        sim = estimate_acceptance(tester, graphs.simulator_sampler(n), trials, _sub(seed, "c8"))
        _GAP_CACHE[key] = (small, large, sim, tester)
    return _GAP_CACHE[key]


def criterion_7(seed=0, scale=1.0) -> CriterionResult:
    small, large, _, tester = _gaps(seed, scale)
    scaling_ok = large.gap <= 0.5 * small.gap + large.ci + 0.5 * small.ci
    ok = small.gap <= 0.1 and scaling_ok
    return CriterionResult(7, "restricted tester gap and q^2/n scaling", ok,
                           {"tester": tester.name, "trials": small.trials, "gap_n": small.gap,
                            "gap_4n": large.gap, "ci_n": small.ci, "ci_4n": large.ci})


def criterion_8(seed=0, scale=1.0) -> CriterionResult:
    small, _, sim, _ = _gaps(seed, scale)
    d_yes = abs(sim.probability - small.acc_yes)
    d_no = abs(sim.probability - small.acc_no)
    h = sim.half_width  # both estimates use the same trial count
    ok = d_yes <= 2 * h and d_no <= 2 * h
    return CriterionResult(8, "simulator matches yes and no distributions", ok,
                           {"acc_sim": sim.probability, "acc_yes": small.acc_yes,
                            "acc_no": small.acc_no, "ci": 2 * h})


def criterion_9(seed=0, scale=1.0) -> CriterionResult:
    trees = _scaled(1000, scale)
    rng = derive_rng(seed, "c9")
    failures = []
    for t in range(trees):
        n_vars = int(rng.integers(4, 13))
        depth = int(rng.integers(2, 5))
        tree = rounds.random_tree(n_vars, depth, rng, max_batch=2)
        if tree.depth < 2:
            tree = rounds.random_tree(n_vars, depth, rng, max_batch=2, leaf_prob=0.0)
        rep = rounds.contraction_report(tree)
        checks = [rep["expand_ok"], rep["expand_bound_ok"], rep["contract_ok"],
                  rep["contract_bound_ok"], rep["batches_after"] == [tree.depth - 1]]
        if not all(checks):
            failures.append(t)
    return CriterionResult(9, "round surgery preserves verdicts within bounds", not failures,
                           {"trees": trees, "failures": len(failures)})


def criterion_10(seed=0, scale=1.0) -> CriterionResult:
    per_k = _scaled(1000, scale)
    n = 101
    h = (n - 1) // 2
    code = identity_code(n, n)
    bad_rounds = bad_output = bad_bits = 0
    for k in (0, 1, 2):
        ldt = pt_to_ldt(dt_tester_fk(k + 1), code)
        for t in range(per_k):
            rng = derive_rng(seed, "c10", k, t)
            inst = comm.random_instance(h, rng)
            protocol = comm.ldt_to_protocol(ldt, inst, n, seed=t)
            x = comm.embed_instance(inst, n)
            direct = run(ldt, LinearOracle(x.entries, n), seed=t)
            expected = int(inst.label(comm.pi_k(inst, k + 2)) % 2 == 0)
            bad_rounds += protocol.rounds != ldt.rounds + 2 or protocol.rounds != direct.rounds_used + 1
            bad_output += protocol.output != expected or direct.verdict != expected
            bad_bits += protocol.total_bits > comm.bit_budget(protocol.queries, n)
    ok = bad_rounds == bad_output == bad_bits == 0
    return CriterionResult(10, "LDT-to-protocol compiler rounds, outputs and bits", ok,
                           {"instances": 3 * per_k, "round_errors": bad_rounds,
                            "output_errors": bad_output, "bit_violations": bad_bits,
                            "bit_constant": comm.BIT_CONSTANT})


def criterion_11(seed=0, scale=1.0) -> CriterionResult:
    pairs = _scaled(1000, scale)
    n, m = 16, 4
    rng = derive_rng(seed, "c11")
    errors = 0
    for _ in range(pairs):
        x, y = comm.random_promise_pair(n, m, rng)
        oracle = comm.disj_parity_map(x, y, m)
        size = comm.parity_size(oracle)
        errors += size != 2 * m - 2 * int(np.sum(x & y)) or oracle.bits_exchanged != n
    return CriterionResult(11, "disjointness-to-parity size formula", errors == 0,
                           {"pairs": pairs, "errors": errors})


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 12)}


def run_suite(seed=0, scale=1.0, only=None) -> list[CriterionResult]:
    return [CRITERIA[i](seed, scale) for i in sorted(only or CRITERIA)]

