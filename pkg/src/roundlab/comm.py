"""Two-party simulations: pointer following and disjointness.

Players are plain state machines in one process. Each runs its own copy of a
linear-query algorithm on the same public seed, so both always agree on the
next batch once they know the same answers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .address import FieldVector, is_prime
from .core import Strategy, derive_rng
from .errors import NonPrimeModulus, PromiseViolation

ALICE = "alice"
BOB = "bob"
BIT_CONSTANT = 3  # total bits <= BIT_CONSTANT * q * ceil(log2 n)


class Vertex(NamedTuple):
    side: str  # "A" or "B"
    index: int


@dataclass(frozen=True)
class PointerInstance:
    """chi_a[j] is the B-index of chi_A(v_j); chi_b[j] is the A-index of chi_B(u_j)."""

    h: int
    chi_a: tuple
    chi_b: tuple

    def __post_init__(self):
        if len(self.chi_a) != self.h or len(self.chi_b) != self.h:
            raise ValueError("both maps need exactly h entries")
        if any(not 0 <= j < self.h for j in (*self.chi_a, *self.chi_b)):
            raise ValueError("map values must be indices in [0, h)")

    @property
    def start(self) -> Vertex:
        return Vertex("A", 0)

    def step(self, w: Vertex) -> Vertex:
        if w.side == "A":
            return Vertex("B", self.chi_a[w.index])
        return Vertex("A", self.chi_b[w.index])

    def label(self, w: Vertex) -> int:
        return w.index if w.side == "A" else self.h + w.index


def random_instance(h: int, rng: np.random.Generator) -> PointerInstance:
    return PointerInstance(h, tuple(rng.integers(h, size=h).tolist()),
                           tuple(rng.integers(h, size=h).tolist()))


def pi_k(instance: PointerInstance, k: int) -> Vertex:
    """k-fold iterate of the merged map from v_0."""
    if k < 1:
        raise ValueError("k must be at least 1")
    w = instance.start
    for _ in range(k):
        w = instance.step(w)
    return w


def embed_instance(instance: PointerInstance, n: int) -> FieldVector:
    """Vector over F_n with x_{label(w)+1} = label(chi(w)); labels >= 2h point to themselves."""
    if not is_prime(n) or n == 2:
        raise NonPrimeModulus(f"{n} is not an odd prime")
    if n < 2 * instance.h:
        raise ValueError(f"n = {n} is smaller than the instance size {2 * instance.h}")
    x = list(range(n))
    h = instance.h
    for j in range(h):
        x[j] = h + instance.chi_a[j]
        x[h + j] = instance.chi_b[j]
    return FieldVector(n, tuple(x))


def smallest_field_size(h: int) -> int:
    n = 2 * h + 1
    while not is_prime(n):
        n += 2
    return n


# ---------------------------------------------------------------------------
# LDT to protocol


@dataclass
class ProtocolRun:
    messages: list = field(default_factory=list)  # (sender, bits)
    outputs: dict = field(default_factory=dict)
    n: int = 0
    queries: int = 0
    ldt_rounds: int = 0

    @property
    def rounds(self) -> int:
        return len(self.messages)

    @property
    def total_bits(self) -> int:
        return sum(bits for _, bits in self.messages)

    @property
    def output(self):
        return self.outputs.get(ALICE)

    def to_record(self) -> dict:
        return {"messages": [list(m) for m in self.messages], "outputs": dict(self.outputs),
                "rounds": self.rounds, "total_bits": self.total_bits, "n": self.n,
                "queries": self.queries, "ldt_rounds": self.ldt_rounds}


class _Player:
    def __init__(self, name: str, entries: dict, n: int, strategy: Strategy, seed):
        self.name = name
        self.entries = entries  # 0-based coordinate -> value; only this player's share
        self.n = n
        self.game = strategy.play(derive_rng(seed), n)
        self.batch = None
        self.output = None
        self.done = False
        self.advance(None)

    def advance(self, answers) -> None:
        try:
            self.batch = next(self.game) if answers is None else self.game.send(answers)
            self.batch = [np.asarray(L, dtype=np.int64) for L in self.batch]
        except StopIteration as stop:
            self.batch, self.output, self.done = None, stop.value, True

    def partials(self) -> list[int]:
        idx = np.fromiter(self.entries.keys(), dtype=np.int64)
        vals = np.fromiter(self.entries.values(), dtype=np.int64)
        return [int(L[idx] @ vals % self.n) for L in self.batch]


def ldt_to_protocol(ldt: Strategy, instance: PointerInstance, n: int | None = None,
                    seed=0) -> ProtocolRun:
    """Run ``ldt`` on the embedded instance as a protocol in which Bob speaks first.

    Message 1 carries Bob's partial sums for the first batch. Every later
    message carries the full answers to the previous batch and the sender's
    partial sums for the current one. Whoever receives the last batch's
    partials learns the output and broadcasts it as one final bit.
    """
    if ldt.kind != "linear":
        raise ValueError("ldt_to_protocol needs a linear-query strategy")
    n = smallest_field_size(instance.h) if n is None else n
    x = embed_instance(instance, n).entries
    h = instance.h
    alice_coords = list(range(h)) + list(range(2 * h, n))
    players = {ALICE: _Player(ALICE, {i: x[i] for i in alice_coords}, n, ldt, seed),
               BOB: _Player(BOB, {i: x[i] for i in range(h, 2 * h)}, n, ldt, seed)}
    width = math.ceil(math.log2(n))
    run = ProtocolRun(n=n, ldt_rounds=ldt.rounds)

    sender, receiver = BOB, ALICE
    carried = []  # answers to the previous batch, known to the sender only
    while not players[sender].done:
        mine = players[sender].partials()
        run.messages.append((sender, width * (len(carried) + len(mine))))
        run.queries += len(mine)
        # receiver: catch up on the previous batch, then finish the current one
        if carried:
            players[receiver].advance(carried)
        theirs = players[receiver].partials()
        answers = [(a + b) % n for a, b in zip(mine, theirs)]
        players[receiver].advance(answers)
        carried = answers
        sender, receiver = receiver, sender
    # the sender now knows every answer; the other player still lacks the last batch
    run.messages.append((sender, 1))
    run.outputs = {sender: players[sender].output, receiver: players[sender].output}
    return run


def bit_budget(q: int, n: int, c: int = BIT_CONSTANT) -> int:
    return c * q * math.ceil(math.log2(n))


# ---------------------------------------------------------------------------
# disjointness to parity


class ParityOracle:
    """Truth table of z -> <x xor y, z> mod 2, answered one exchanged bit per query."""

    kind = "parity"

    def __init__(self, x: np.ndarray, y: np.ndarray):
        self._x, self._y = x, y
        self.size = 2 ** len(x)
        self.bits_exchanged = 0

    def answer(self, z) -> int:
        z = np.asarray(z, dtype=np.int64)
        alice_bit = int(self._x @ z % 2)  # Alice's only message
        self.bits_exchanged += 1
        return alice_bit ^ int(self._y @ z % 2)

    def answer_batch(self, queries):
        return [self.answer(z) for z in queries]


def _weight_check(v: np.ndarray, m: int, who: str) -> None:
    if np.any((v != 0) & (v != 1)):
        raise ValueError(f"{who} input must be a bit vector")
    if int(v.sum()) != m:
        raise PromiseViolation(f"{who} input has weight {int(v.sum())}, expected {m}")


def disj_parity_map(x, y, m: int) -> ParityOracle:
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape != y.shape:
        raise ValueError("inputs must have the same length")
    _weight_check(x, m, "Alice's")
    _weight_check(y, m, "Bob's")
    return ParityOracle(x, y)


def parity_support(oracle: ParityOracle) -> list[int]:
    """1-based coordinates of the parity, read off unit-vector queries."""
    n = len(oracle._x)
    return [i + 1 for i in range(n) if oracle.answer(np.eye(n, dtype=np.int64)[i])]


def parity_size(oracle: ParityOracle) -> int:
    return len(parity_support(oracle))


def random_promise_pair(n: int, m: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    x = np.zeros(n, dtype=np.int64)
    y = np.zeros(n, dtype=np.int64)
    x[rng.choice(n, size=m, replace=False)] = 1
    y[rng.choice(n, size=m, replace=False)] = 1
    return x, y
