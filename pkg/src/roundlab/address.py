"""Iterated address functions and exact decision-tree search on tiny inputs."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import Strategy
from .errors import EnumerationCapExceeded, NonPrimeModulus

ENUMERATION_CAP = 10**5
CHAIN_CAP = 10**6


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldVector:
    """A vector over F_p. ``entries`` is 0-based; ``at(i)`` reads x_i 1-based."""

    p: int
    entries: tuple

    def __post_init__(self):
        if not is_prime(self.p):
            raise NonPrimeModulus(f"{self.p} is not prime")
        object.__setattr__(self, "entries", tuple(int(v) for v in self.entries))
        if any(not 0 <= v < self.p for v in self.entries):
            raise ValueError(f"entries must be residues mod {self.p}")

    @property
    def N(self) -> int:
        return len(self.entries)

    def at(self, i: int) -> int:
        return self.entries[i - 1]


@dataclass(frozen=True)
class AddressChain:
    values: tuple
    coordinates: tuple

    @property
    def value(self) -> int:
        return self.values[-1]


def _as_vector(x, p=None) -> FieldVector:
    if isinstance(x, FieldVector):
        return x
    return FieldVector(p if p is not None else len(x), tuple(x))


def _check_address_input(x: FieldVector) -> None:
    if x.N != x.p:
        raise ValueError(f"address functions need N == p, got N={x.N}, p={x.p}")


def address_chain(x, k: int) -> AddressChain:
    """Follow the pointer chain c_0 = 1, c_{j+1} = x_{c_j} + 1 for k hops."""
    x = _as_vector(x)
    _check_address_input(x)
    if not 0 <= k <= CHAIN_CAP:
        raise ValueError(f"k must lie in [0, {CHAIN_CAP}]")
    coords, values = [1], [x.at(1)]
    for _ in range(k):
        coords.append(values[-1] + 1)
        values.append(x.at(coords[-1]))
    return AddressChain(tuple(values), tuple(coords))


def g_iter(x, k: int) -> int:
    return address_chain(x, k).value


def f_k(x, k: int) -> int:
    """1 iff the canonical residue of g_k(x) is even."""
    return int(g_iter(x, k) % 2 == 0)


def f_prime_k(x, k: int) -> int:
    """1 iff x_i equals its cyclic successor, where i = g_{k-1}(x) + 1."""
    if k < 1:
        raise ValueError("f_prime_k needs k >= 1")
    x = _as_vector(x)
    i = g_iter(x, k - 1) + 1
    return int(x.at(i) == x.at(i % x.N + 1))


def dt_tester_fk(k: int) -> Strategy:
    """Deterministic k-round, (k+1)-query algorithm computing f_k exactly."""
    if k < 0:
        raise ValueError("k must be non-negative")

    def play(rng, size):
        (value,) = yield [1]
        for _ in range(k):
            (value,) = yield [value + 1]
        return int(value % 2 == 0)

    return Strategy(play, "point", k, k + 1, name=f"dt_f{k}")


def dt_tester_fprime(k: int) -> Strategy:
    """k-round, (k+2)-query algorithm for f'_k; the last batch reads x_i and its successor."""
    if k < 1:
        raise ValueError("k must be at least 1")

    def play(rng, size):
        (value,) = yield [1]
        for _ in range(k - 1):
            (value,) = yield [value + 1]
        i = value + 1
        here, there = yield [i, i % size + 1]
        return int(here == there)

    return Strategy(play, "point", k, k + 2, name=f"dt_fprime{k}")


# ---------------------------------------------------------------------------
# explicit function tables and brute-force minimal query counts


@dataclass(frozen=True)
class FunctionTable:
    """Values of a function on F_p^N, stored as an array of shape (p,)*N.

    Axis j is coordinate x_{j+1}; the flattened C-order is the lexicographic
    input order with x_1 most significant.
    """

    p: int
    N: int
    values: np.ndarray

    @classmethod
    def from_function(cls, f: Callable[[tuple], int], p: int, N: int) -> "FunctionTable":
        if p**N > ENUMERATION_CAP:
            raise EnumerationCapExceeded(f"p^N = {p**N} exceeds {ENUMERATION_CAP}")
        vals = [f(x) for x in itertools.product(range(p), repeat=N)]
        return cls(p, N, np.asarray(vals).reshape((p,) * N))

    def __call__(self, x: Sequence[int]) -> int:
        return int(self.values[tuple(x)])

    def to_dict(self) -> dict:
        return {"p": self.p, "N": self.N, "values": self.values.ravel().tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "FunctionTable":
        p, N = data["p"], data["N"]
        vals = np.asarray(data["values"])
        if vals.size != p**N:
            raise ValueError(f"expected {p**N} values, got {vals.size}")
        return cls(p, N, vals.reshape((p,) * N))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "FunctionTable":
        return cls.from_dict(json.loads(text))


def address_table(p: int, k: int, prime: bool = False) -> FunctionTable:
    fn = f_prime_k if prime else f_k
    return FunctionTable.from_function(lambda x: fn(FieldVector(p, x), k), p, p)


def _determined_by(sub: np.ndarray, keep: tuple) -> bool:
    """Is ``sub`` constant along every axis outside ``keep``?"""
    drop = tuple(a for a in range(sub.ndim) if a not in keep)
    if not drop:
        return True
    return bool(np.array_equal(sub.max(axis=drop), sub.min(axis=drop)))


def _min_support(sub: np.ndarray) -> int:
    """Smallest number of axes that determine ``sub``."""
    axes = range(sub.ndim)
    for size in range(sub.ndim + 1):
        if any(_determined_by(sub, keep) for keep in itertools.combinations(axes, size)):
            return size
    return sub.ndim


def _restrict(values: np.ndarray, fixed: tuple, assignment: tuple) -> np.ndarray:
    index = [slice(None)] * values.ndim
    for axis, val in zip(fixed, assignment):
        index[axis] = val
    return values[tuple(index)]


def _one_round_cost(values: np.ndarray, p: int) -> int:
    best = values.ndim
    for size in range(values.ndim + 1):
        if size >= best:
            break
        for first in itertools.combinations(range(values.ndim), size):
            worst = 0
            for assignment in itertools.product(range(p), repeat=size):
                worst = max(worst, _min_support(_restrict(values, first, assignment)))
                if size + worst >= best:
                    break
            best = min(best, size + worst)
    return best


def _greedy_cost(values: np.ndarray, p: int, rounds: int) -> int:
    # Single-coordinate first batches only; an upper bound on the true minimum.
    if rounds <= 1:
        return _one_round_cost(values, p) if rounds == 1 else _min_support(values)
    best = _min_support(values)
    for axis in range(values.ndim):
        worst = 0
        for val in range(p):
            worst = max(worst, _greedy_cost(_restrict(values, (axis,), (val,)), p, rounds - 1))
        best = min(best, 1 + worst)
    return best


def brute_force_min_queries(table: FunctionTable, rounds: int, exact: bool = True) -> int:
    """Minimum worst-case query count of a deterministic ``rounds``-round algorithm.

    Exact search covers rounds 0 and 1. For more rounds pass ``exact=False``
    to get a heuristic upper bound.
    """
    if table.p**table.N > ENUMERATION_CAP:
        raise EnumerationCapExceeded(f"p^N = {table.p**table.N} exceeds {ENUMERATION_CAP}")
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    if rounds == 0:
        return _min_support(table.values)
    if rounds == 1:
        return _one_round_cost(table.values, table.p)
    if exact:
        raise ValueError("exact search is limited to rounds <= 1; pass exact=False for a bound")
    return _greedy_cost(table.values, table.p, rounds)
