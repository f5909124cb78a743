"""Oracles, round-bounded strategies, the runner and Monte Carlo estimation.

A strategy is a generator function ``play(rng, size)``. Each ``yield`` hands
one batch of queries to the runner and evaluates to the list of answers for
that batch; the generator's return value is the verdict. Because a batch must
be yielded before its answers exist, a strategy can only ever condition round
``l`` on the answers of rounds ``< l``.

Example::

    def play(rng, size):
        (first,) = yield [1]
        (second,) = yield [first + 1]
        return ACCEPT if second % 2 == 0 else REJECT
"""
from __future__ import annotations

import json
import math
import zlib
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .errors import BudgetExceeded, QueryShapeViolation

ACCEPT = "accept"
REJECT = "reject"

ROUND_ADAPTIVE = "round_adaptive"
TAIL_ADAPTIVE = "tail_adaptive"


def accepted(verdict) -> bool:
    """Acceptance reading of a verdict: ``ACCEPT``, ``True`` or the output 1."""
    if isinstance(verdict, str):
        return verdict == ACCEPT
    return verdict is not None and verdict == 1


def _tag(key) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode())
    return int(key)


def derive_rng(seed, *keys) -> np.random.Generator:
    """Independent stream for ``(seed, *keys)``; string keys are hashed."""
    return np.random.default_rng(np.random.SeedSequence([_tag(seed), *map(_tag, keys)]))


@dataclass(frozen=True)
class RoundBudget:
    rounds: int
    max_queries: int
    mode: str = ROUND_ADAPTIVE

    def __post_init__(self):
        if self.rounds < 0:
            raise ValueError("rounds must be non-negative")
        if self.max_queries < 1:
            raise ValueError("max_queries must be at least 1")
        if self.mode not in (ROUND_ADAPTIVE, TAIL_ADAPTIVE):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == TAIL_ADAPTIVE and self.rounds > self.max_queries:
            raise ValueError("a tail-adaptive budget needs rounds <= max_queries")


@dataclass(frozen=True)
class Strategy:
    """A round-bounded query strategy together with its declared budget.

    ``rounds`` counts adaptive rounds, so a strategy may emit ``rounds + 1``
    batches. ``kind`` names the oracle kind it talks to.
    """

    play: Callable[[np.random.Generator, int], Any]
    kind: str
    rounds: int
    max_queries: int
    mode: str = ROUND_ADAPTIVE
    name: str = ""

    @property
    def budget(self) -> RoundBudget:
        return RoundBudget(self.rounds, max(self.max_queries, 1), self.mode)


# ---------------------------------------------------------------------------
# oracles


class PointOracle:
    """Answers coordinate queries ``i`` (1-based) with ``values[i-1]``."""

    kind = "point"

    def __init__(self, values):
        self.values = np.asarray(values, dtype=np.int64)
        self.size = len(self.values)

    def answer(self, i):
        if not 1 <= i <= self.size:
            raise IndexError(f"coordinate {i} outside [1, {self.size}]")
        return int(self.values[i - 1])

    def answer_batch(self, queries):
        if not queries:
            return []
        idx = np.asarray(queries, dtype=np.int64)
        if idx.min() < 1 or idx.max() > self.size:
            raise IndexError(f"coordinate outside [1, {self.size}]")
        return self.values[idx - 1].tolist()


class LinearOracle:
    """Answers a coefficient vector ``L`` with ``<L, x> mod p``."""

    kind = "linear"

    def __init__(self, x, p: int):
        self.x = np.asarray(x, dtype=np.int64)
        self.p = p
        self.size = len(self.x)

    def answer(self, coeffs):
        return int(np.dot(np.asarray(coeffs, dtype=np.int64), self.x) % self.p)

    def answer_batch(self, queries):
        if not queries:
            return []
        mat = np.asarray(queries, dtype=np.int64)
        if mat.ndim != 2 or mat.shape[1] != self.size:
            raise ValueError(f"linear queries must have length {self.size}")
        return ((mat % self.p) @ self.x % self.p).tolist()


class GraphOracle:
    """Answers a vertex with the tuple of its neighbours."""

    kind = "graph"

    def __init__(self, graph):
        self.graph = graph
        self.size = graph.n

    def answer(self, v):
        return self.graph.neighbors(v)

    def answer_batch(self, queries):
        return [self.graph.neighbors(v) for v in queries]


# ---------------------------------------------------------------------------
# transcripts and the runner


def _plain(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    return obj


@dataclass
class Transcript:
    per_round: list = field(default_factory=list)
    verdict: Any = None
    seed: Any = None

    @property
    def total_queries(self) -> int:
        return sum(len(q) for q, _ in self.per_round)

    @property
    def rounds_used(self) -> int:
        return len(self.per_round)

    @property
    def accepted(self) -> bool:
        return accepted(self.verdict)

    def to_record(self) -> dict:
        return {
            "seed": self.seed,
            "rounds_used": self.rounds_used,
            "total_queries": self.total_queries,
            "per_round": [{"queries": _plain(q), "answers": _plain(a)} for q, a in self.per_round],
            "verdict": _plain(self.verdict),
        }

    @classmethod
    def from_record(cls, record: dict) -> "Transcript":
        def tup(v):
            return tuple(tup(u) for u in v) if isinstance(v, list) else v

        per_round = [([tup(q) for q in r["queries"]], [tup(a) for a in r["answers"]])
                     for r in record["per_round"]]
        return cls(per_round=per_round, verdict=record["verdict"], seed=record["seed"])


def dump_records(records: Iterable[dict], stream) -> None:
    for rec in records:
        stream.write(json.dumps(rec, sort_keys=True) + "\n")


def load_records(stream) -> list[dict]:
    return [json.loads(line) for line in stream if line.strip()]


def run(strategy: Strategy, oracle, budget: RoundBudget | None = None, seed=0) -> Transcript:
    """Play ``strategy`` against ``oracle`` under ``budget``.

    ``seed`` is an integer or an already-derived ``numpy.random.Generator``.
    Batches are checked against the budget before they are answered, so a
    violating strategy never sees the answers to its offending batch.
    """
    budget = budget or strategy.budget
    if strategy.kind != oracle.kind:
        raise ValueError(f"strategy expects a {strategy.kind} oracle, got {oracle.kind}")
    if isinstance(seed, np.random.Generator):
        rng, recorded_seed = seed, None
    else:
        rng, recorded_seed = derive_rng(seed), seed

    transcript = Transcript(seed=recorded_seed)
    total = 0
    game = strategy.play(rng, oracle.size)
    try:
        batch = next(game)
        while True:
            batch = list(batch)
            index = len(transcript.per_round)
            if index > budget.rounds:
                raise BudgetExceeded(f"batch {index} exceeds {budget.rounds} adaptive rounds")
            if total + len(batch) > budget.max_queries:
                raise BudgetExceeded(f"{total + len(batch)} queries exceed budget {budget.max_queries}")
            if budget.mode == TAIL_ADAPTIVE and index > 0 and len(batch) > 1:
                raise QueryShapeViolation(f"tail round {index} asked {len(batch)} queries")
            answers = list(oracle.answer_batch(batch))
            transcript.per_round.append((batch, answers))
            total += len(batch)
            batch = game.send(answers)
    except StopIteration as stop:
        transcript.verdict = stop.value
    return transcript


# ---------------------------------------------------------------------------
# amplification


def _combine(verdicts: Sequence, combiner: str):
    if combiner == "any_reject":
        return ACCEPT if all(accepted(v) for v in verdicts) else REJECT
    if all(v in (ACCEPT, REJECT) for v in verdicts):
        votes = sum(accepted(v) for v in verdicts)
        return ACCEPT if 2 * votes > len(verdicts) else REJECT
    counts = Counter(verdicts)
    top = max(counts.values())
    return min(v for v, c in counts.items() if c == top)


def amplify(strategy: Strategy, repetitions: int, combiner: str = "majority") -> Strategy:
    """Run ``repetitions`` independent copies side by side, one batch per round.

    The copies share the round structure, so the number of rounds is unchanged
    and each batch is the concatenation of the copies' batches.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    if combiner not in ("majority", "any_reject"):
        raise ValueError(f"unknown combiner {combiner!r}")
    if strategy.mode == TAIL_ADAPTIVE:
        raise ValueError("tail-adaptive strategies cannot be amplified without adding rounds")

    def play(rng, size):
        games = [strategy.play(rng, size) for _ in range(repetitions)]
        verdicts = [None] * repetitions
        pending = {}
        for j, game in enumerate(games):
            try:
                pending[j] = list(next(game))
            except StopIteration as stop:
                verdicts[j] = stop.value
        while pending:
            merged, spans = [], []
            for j, batch in pending.items():
                spans.append((j, len(merged), len(batch)))
                merged.extend(batch)
            answers = yield merged
            pending = {}
            for j, start, length in spans:
                try:
                    pending[j] = list(games[j].send(answers[start:start + length]))
                except StopIteration as stop:
                    verdicts[j] = stop.value
        return _combine(verdicts, combiner)

    return Strategy(play, strategy.kind, strategy.rounds, strategy.max_queries * repetitions,
                    strategy.mode, f"{strategy.name}x{repetitions}")


# ---------------------------------------------------------------------------
# Monte Carlo estimation


class Estimate(NamedTuple):
    probability: float
    half_width: float


def hoeffding_half_width(trials: int, alpha: float = 0.01) -> float:
    """Two-sided Hoeffding half-width at confidence ``1 - alpha``."""
    return math.sqrt(math.log(2 / alpha) / (2 * trials))


def trial_streams(seed, t: int) -> tuple[np.random.Generator, np.random.Generator]:
    """(instance stream, strategy stream) for trial ``t``; depends only on (seed, t)."""
    inst, strat = np.random.SeedSequence([_tag(seed), t]).spawn(2)
    return np.random.default_rng(inst), np.random.default_rng(strat)


def estimate_acceptance(strategy: Strategy, instance_sampler: Callable[[np.random.Generator], Any],
                        trials: int, seed=0, budget: RoundBudget | None = None,
                        on_transcript: Callable[[Transcript], None] | None = None) -> Estimate:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    hits = 0
    for t in range(trials):
        inst_rng, strat_rng = trial_streams(seed, t)
        transcript = run(strategy, instance_sampler(inst_rng), budget, strat_rng)
        if on_transcript is not None:
            on_transcript(transcript)
        hits += transcript.accepted
    return Estimate(hits / trials, hoeffding_half_width(trials))
