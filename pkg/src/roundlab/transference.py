"""Reductions between round-bounded testers and round-bounded (linear) decision trees.

``pt_to_ldt`` turns a tester for the lifted property C_f into a linear decision
tree for f by answering word coordinate ``i`` with the linear query ``rows_i``.
``dt_to_pt`` goes the other way: it runs the decision tree on a purported
codeword, decoding each message coordinate locally, while the local tester
runs inside the first batch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binom

from .address import FunctionTable
from .codes import (LinearCode, all_codewords, decode_plan, decode_votes, plurality,
                    triple_plan, triples_pass)
from .core import ACCEPT, REJECT, Strategy, accepted, amplify

BASE_SUCCESS = 27 / 50


def repetition_counts(code: LinearCode, eps: float, q: int) -> tuple[float, int, int]:
    """(delta_star, test triples, decoder calls per query)."""
    delta_star = min(code.decoding_radius, eps)
    r_test = math.ceil(8 / delta_star)
    r_dec = math.ceil(12 * math.log(10 * max(q, 1)))
    return delta_star, r_test, r_dec


def majority_copies(success: float = BASE_SUCCESS, target: float = 2 / 3) -> int:
    """Smallest odd number of copies whose majority is right with probability >= target."""
    c = 1
    while binom.sf(c // 2, c, success) < target:
        c += 2
    return c


def pt_to_ldt(tester, code: LinearCode) -> Strategy:
    """Linear-query algorithm for f from a tester for C_f.

    ``tester`` is a point strategy over words, or a callable taking the
    proximity parameter and returning one; it is built with eps = delta(C).
    The output is 1 when the tester accepts, 0 when it rejects, and any other
    output passes through unchanged.
    """
    if not isinstance(tester, Strategy):
        tester = tester(code.relative_distance)
    if tester.kind != "point":
        raise ValueError("pt_to_ldt needs a point-query tester")
    rows = code.rows

    def play(rng, size):
        game = tester.play(rng, code.M)
        try:
            answers = yield [tuple(rows[i - 1].tolist()) for i in next(game)]
            while True:
                answers = yield [tuple(rows[i - 1].tolist()) for i in game.send(answers)]
        except StopIteration as stop:
            verdict = stop.value
        if verdict == ACCEPT:
            return 1
        if verdict == REJECT:
            return 0
        return verdict

    return Strategy(play, "linear", tester.rounds, tester.max_queries, tester.mode,
                    f"ldt({tester.name})")


def dt_to_pt(dt: Strategy, code: LinearCode, eps: float, dt_exact: bool = True,
             copies: int | None = None, spot_check: bool = False) -> Strategy:
    """Tester for C_f from a round-bounded decision tree for f.

    Each decision-tree query x_i is answered by the plurality of ``r_dec``
    two-query decodings; ``r_test`` additivity triples ride along in the first
    batch. A failed triple is remembered and the simulation runs to the end,
    so the number of batches always matches the decision tree. With
    ``spot_check`` a failed triple or disagreeing decoder votes count as a
    detected corruption and reject at once.

    The base simulation is correct with probability at least 27/50; it is
    wrapped in a parallel majority vote over ``copies`` runs, by default the
    smallest odd count that lifts 27/50 to 2/3. ``copies=1`` returns the base
    simulation. ``dt_exact`` marks the decision tree as always correct, which
    makes the tester one-sided; it is recorded in the strategy name.
    """
    if dt.kind != "point":
        raise ValueError("dt_to_pt needs a point-query decision tree")
    code._require_hadamard()
    _, r_test, r_dec = repetition_counts(code, eps, dt.max_queries)

    def play(rng, size):
        game = dt.play(rng, code.N)
        tests_ok = True
        first = True
        try:
            dt_batch = list(next(game))
        except StopIteration as stop:
            dt_batch, output = None, stop.value
        while True:
            queries, spans = [], []
            for i in dt_batch or []:
                plan = decode_plan(code, rng, i, r_dec)
                spans.append((len(queries), len(plan)))
                queries += plan
            checks = len(queries)
            if first:
                queries += triple_plan(code, rng, r_test)
            answers = yield queries
            if first:
                tests_ok = triples_pass(code, answers[checks:])
                first = False
                if spot_check and not tests_ok:
                    return REJECT
            if dt_batch is None:
                break
            decoded = []
            for start, length in spans:
                block = answers[start:start + length]
                if spot_check:
                    votes = decode_votes(code, block)
                    if len(set(votes.tolist())) > 1:
                        return REJECT
                decoded.append(plurality(decode_votes(code, block)))
            try:
                dt_batch = list(game.send(decoded))
            except StopIteration as stop:
                output = stop.value
                break
        return ACCEPT if tests_ok and accepted(output) else REJECT

    side = "one-sided" if dt_exact else "two-sided"
    base = Strategy(play, "point", dt.rounds, 2 * r_dec * dt.max_queries + 3 * r_test,
                    name=f"pt({dt.name}),{side}")
    copies = majority_copies() if copies is None else copies
    return base if copies == 1 else amplify(base, copies, "majority")


# ---------------------------------------------------------------------------
# lifted property C_f


@dataclass
class LiftedProperty:
    code: LinearCode
    f: FunctionTable
    members: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if (self.f.p, self.f.N) != (self.code.p, self.code.N):
            raise ValueError("function table and code disagree on (p, N)")
        msgs, words = all_codewords(self.code)
        keep = self.f.values.ravel()[np.arange(len(msgs))] == 1
        self.members = words[keep]

    def contains(self, y) -> bool:
        return bool(np.any(np.all(self.members == np.asarray(y), axis=1)))


def lifted_distance(y, prop: LiftedProperty) -> float:
    """Relative distance from ``y`` to C_f; ``math.inf`` when C_f is empty."""
    if len(prop.members) == 0:
        return math.inf
    y = np.asarray(y, dtype=np.int64)
    return float((prop.members != y).sum(axis=1).min() / prop.code.M)
