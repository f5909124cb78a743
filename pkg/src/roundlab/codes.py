"""Linear codes over F_p with a local tester and a local decoder.

The Hadamard code is the only construction with a tester and decoder: the
codeword of ``x`` lists ``<a, x>`` for every ``a`` in F_p^N. Word coordinates
are 1-based and follow the lexicographic order of ``a`` (first entry most
significant), so coordinate ``1`` is ``a = 0``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .address import is_prime
from .core import ACCEPT, REJECT, PointOracle, Strategy, run
from .errors import CapExceeded, DimensionMismatch, IndexOutOfRange, NonPrimeModulus

BLOCK_CAP = 10**5
BOTTOM = None  # decoder output when a corruption is detected


@dataclass(frozen=True, eq=False)
class LinearCode:
    p: int
    N: int
    rows: np.ndarray
    relative_distance: float
    decoding_radius: float
    family: str = "generic"

    @property
    def M(self) -> int:
        return self.rows.shape[0]

    def to_dict(self) -> dict:
        return {"p": self.p, "N": self.N, "M": self.M, "rows": self.rows.tolist(),
                "relative_distance": self.relative_distance,
                "decoding_radius": self.decoding_radius, "family": self.family}

    @classmethod
    def from_dict(cls, data: dict) -> "LinearCode":
        rows = np.asarray(data["rows"], dtype=np.int64).reshape(data["M"], data["N"])
        return cls(data["p"], data["N"], rows, data["relative_distance"],
                   data["decoding_radius"], data.get("family", "generic"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    # Hadamard addressing -------------------------------------------------
    @cached_property
    def _powers(self) -> np.ndarray:
        return self.p ** np.arange(self.N - 1, -1, -1, dtype=np.int64)

    def index_of(self, a) -> np.ndarray | int:
        """1-based coordinate of Hadamard row(s) ``a``."""
        self._require_hadamard()
        a = np.asarray(a, dtype=np.int64) % self.p
        idx = a @ self._powers + 1
        return int(idx) if np.ndim(idx) == 0 else idx

    def _require_hadamard(self) -> None:
        if self.family != "hadamard":
            raise ValueError("this operation is only defined for the Hadamard code")


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise NonPrimeModulus(f"{p} is not prime")


def hadamard_code(p: int, N: int) -> LinearCode:
    _check_prime(p)
    if p**N > BLOCK_CAP:
        raise CapExceeded(f"block length {p**N} exceeds {BLOCK_CAP}")
    rows = np.array(list(itertools.product(range(p), repeat=N)), dtype=np.int64).reshape(-1, N)
    delta = 1 - 1 / p
    return LinearCode(p, N, rows, delta, delta / 4, "hadamard")


def identity_code(p: int, N: int) -> LinearCode:
    """The trivial code C(x) = x; used to lift point queries to unit linear queries."""
    _check_prime(p)
    return LinearCode(p, N, np.eye(N, dtype=np.int64), 1 / N, 1 / (4 * N), "identity")


def encode(code: LinearCode, x) -> np.ndarray:
    if getattr(x, "p", code.p) != code.p:
        raise DimensionMismatch(f"message over F_{x.p}, code over F_{code.p}")
    x = np.asarray(getattr(x, "entries", x), dtype=np.int64)
    if x.shape != (code.N,):
        raise DimensionMismatch(f"message length {x.shape} does not match N={code.N}")
    return code.rows @ (x % code.p) % code.p


def row_support(code: LinearCode, i: int) -> np.ndarray:
    if not 1 <= i <= code.M:
        raise IndexOutOfRange(f"row {i} outside [1, {code.M}]")
    return code.rows[i - 1].copy()


# ---------------------------------------------------------------------------
# local test and decoder as query plans


def triple_plan(code: LinearCode, rng: np.random.Generator, repetitions: int) -> list[int]:
    """Coordinates of ``repetitions`` triples (a, b, a+b), flattened."""
    code._require_hadamard()
    a = rng.integers(code.p, size=(repetitions, code.N))
    b = rng.integers(code.p, size=(repetitions, code.N))
    trip = np.stack([code.index_of(a), code.index_of(b), code.index_of(a + b)], axis=1)
    return trip.ravel().tolist()


def triples_pass(code: LinearCode, answers) -> bool:
    vals = np.asarray(answers, dtype=np.int64).reshape(-1, 3)
    return bool(np.all((vals[:, 0] + vals[:, 1] - vals[:, 2]) % code.p == 0))


def decode_plan(code: LinearCode, rng: np.random.Generator, i: int, repetitions: int,
                offsets=None) -> list[int]:
    """Coordinates of pairs (a, a + e_i), flattened."""
    code._require_hadamard()
    if not 1 <= i <= code.N:
        raise IndexOutOfRange(f"message coordinate {i} outside [1, {code.N}]")
    a = (np.asarray(offsets, dtype=np.int64).reshape(-1, code.N) if offsets is not None
         else rng.integers(code.p, size=(repetitions, code.N)))
    shifted = a.copy()
    shifted[:, i - 1] += 1
    return np.stack([code.index_of(a), code.index_of(shifted)], axis=1).ravel().tolist()


def decode_votes(code: LinearCode, answers) -> np.ndarray:
    vals = np.asarray(answers, dtype=np.int64).reshape(-1, 2)
    return (vals[:, 1] - vals[:, 0]) % code.p


def plurality(votes) -> int:
    """Most frequent vote; ties go to the smallest field element."""
    return int(np.argmax(np.bincount(np.asarray(votes, dtype=np.int64))))


def local_test_strategy(code: LinearCode, repetitions: int) -> Strategy:
    def play(rng, size):
        answers = yield triple_plan(code, rng, repetitions)
        return ACCEPT if triples_pass(code, answers) else REJECT

    return Strategy(play, "point", 0, 3 * repetitions, name="blr_test")


def relaxed_decoder_strategy(code: LinearCode, i: int, offset=None, spot_check: bool = False) -> Strategy:
    """Two-query decoder for x_i; with ``spot_check`` it also tests one triple and may return BOTTOM."""

    def play(rng, size):
        queries = decode_plan(code, rng, i, 1, offset)
        if spot_check:
            queries += triple_plan(code, rng, 1)
        answers = yield queries
        if spot_check and not triples_pass(code, answers[2:]):
            return BOTTOM
        return int(decode_votes(code, answers[:2])[0])

    return Strategy(play, "point", 0, 5 if spot_check else 2, name=f"decode_{i}")


def local_test(code: LinearCode, w, repetitions: int, seed=0) -> str:
    """BLR-style additivity test with ``repetitions`` triples (3 queries each)."""
    return run(local_test_strategy(code, repetitions), PointOracle(w), seed=seed).verdict


def relaxed_decode(code: LinearCode, w, i: int, seed=0, offset=None, spot_check: bool = False):
    """Return w_{a+e_i} - w_a for a random (or given) ``a``; BOTTOM if the spot check fails."""
    return run(relaxed_decoder_strategy(code, i, offset, spot_check), PointOracle(w), seed=seed).verdict


# ---------------------------------------------------------------------------
# brute-force distance


def all_codewords(code: LinearCode) -> tuple[np.ndarray, np.ndarray]:
    if code.p**code.N > BLOCK_CAP:
        raise CapExceeded(f"{code.p**code.N} messages exceed {BLOCK_CAP}")
    msgs = np.array(list(itertools.product(range(code.p), repeat=code.N)), dtype=np.int64)
    msgs = msgs.reshape(-1, code.N)
    return msgs, msgs @ code.rows.T % code.p


def exact_distance(code: LinearCode, w) -> tuple[tuple, float]:
    """Nearest message and its relative distance; ties go to the lexicographically smallest."""
    w = np.asarray(w, dtype=np.int64)
    if w.shape != (code.M,):
        raise DimensionMismatch(f"word length {w.shape} does not match M={code.M}")
    msgs, words = all_codewords(code)
    mismatches = (words != w).sum(axis=1)
    best = int(np.argmin(mismatches))
    return tuple(int(v) for v in msgs[best]), mismatches[best] / code.M


def corrupt(word, positions, rng: np.random.Generator, p: int) -> np.ndarray:
    """Copy of ``word`` with every listed (0-based) position changed to a different residue."""
    out = np.array(word, dtype=np.int64)
    positions = np.asarray(positions, dtype=np.int64)
    out[positions] = (out[positions] + rng.integers(1, p, size=len(positions))) % p
    return out
