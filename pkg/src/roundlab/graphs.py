"""Bounded-degree graphs, cycle-cover instance distributions and cycle testers.

Graphs are stored as an ``(n, d)`` integer array: row ``v`` lists the
neighbours of ``v`` in slot order, padded with ``-1`` (the nil entry).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .core import ACCEPT, REJECT, Estimate, GraphOracle, Strategy, derive_rng, estimate_acceptance
from .errors import PoolExhausted

NIL = -1
DEFAULT_DEGREE = 3


@dataclass(frozen=True, eq=False)
class BoundedDegreeGraph:
    n: int
    d: int
    adj: np.ndarray

    def neighbors(self, v: int) -> tuple:
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} outside [0, {self.n})")
        row = self.adj[v]
        return tuple(row[row != NIL].tolist())

    def slot(self, v: int, i: int):
        """g(v, i) for 1-based slot ``i``; ``None`` plays the nil entry."""
        u = int(self.adj[v, i - 1])
        return None if u == NIL else u

    def degree(self, v: int) -> int:
        return int((self.adj[v] != NIL).sum())

    def edges(self) -> set:
        out = set()
        for v in range(self.n):
            for u in self.neighbors(v):
                out.add((min(u, v), max(u, v)))
        return out

    @property
    def edge_count(self) -> int:
        return int((self.adj != NIL).sum()) // 2

    def adjacency(self) -> dict:
        return {v: self.neighbors(v) for v in range(self.n)}

    def validate(self) -> None:
        """Raise ``ValueError`` unless the list is symmetric, packed and simple."""
        if self.adj.shape != (self.n, self.d):
            raise ValueError("adjacency array has the wrong shape")
        filled = self.adj != NIL
        if np.any(filled[:, 1:] & ~filled[:, :-1]):
            raise ValueError("nil entries must come after all neighbours")
        for v in range(self.n):
            nbrs = self.neighbors(v)
            if len(set(nbrs)) != len(nbrs) or v in nbrs:
                raise ValueError(f"vertex {v} has a repeated neighbour or a self-loop")
            for u in nbrs:
                if v not in self.neighbors(u):
                    raise ValueError(f"edge {v}-{u} is not symmetric")

    def to_text(self) -> str:
        lines = [f"{self.n} {self.d}"]
        lines += [f"{v}: " + " ".join(map(str, self.neighbors(v))) for v in range(self.n)]
        return "\n".join(line.rstrip() for line in lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BoundedDegreeGraph":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        n, d = map(int, lines[0].split())
        adj = np.full((n, d), NIL, dtype=np.int64)
        for line in lines[1:]:
            head, _, rest = line.partition(":")
            nbrs = [int(u) for u in rest.split()]
            if len(nbrs) > d:
                raise ValueError(f"vertex {head} lists more than {d} neighbours")
            adj[int(head), :len(nbrs)] = nbrs
        return cls(n, d, adj)


def from_edges(n: int, edges: Iterable, d: int = DEFAULT_DEGREE) -> BoundedDegreeGraph:
    adj = np.full((n, d), NIL, dtype=np.int64)
    fill = np.zeros(n, dtype=np.int64)
    for u, v in edges:
        for a, b in ((u, v), (v, u)):
            if fill[a] >= d:
                raise ValueError(f"vertex {a} exceeds degree {d}")
            adj[a, fill[a]] = b
            fill[a] += 1
    return BoundedDegreeGraph(n, d, adj)


# ---------------------------------------------------------------------------
# instance distributions


def gen_cycles(n: int, lengths: Iterable[int], seed=0, d: int = DEFAULT_DEGREE,
               relabel: bool = True) -> BoundedDegreeGraph:
    """Disjoint cycles of the given lengths plus isolated vertices.

    The canonical graph puts the cycles on consecutive labels. With
    ``relabel`` the labels are permuted uniformly at random and each vertex's
    two slots are put in random order.
    """
    lengths = np.asarray(list(lengths), dtype=np.int64)
    if np.any(lengths < 3):
        raise ValueError("cycles need length at least 3")
    if d < 2:
        raise ValueError("cycles need degree bound at least 2")
    covered = int(lengths.sum())
    if covered > n:
        raise ValueError(f"cycles cover {covered} > n = {n} vertices")
    idx = np.arange(covered)
    base = np.repeat(np.cumsum(lengths) - lengths, lengths)
    size = np.repeat(lengths, lengths)
    pos = idx - base
    nbrs = np.stack([base + (pos - 1) % size, base + (pos + 1) % size], axis=1)
    adj = np.full((n, d), NIL, dtype=np.int64)
    if relabel:
        rng = seed if isinstance(seed, np.random.Generator) else derive_rng(seed, "graph")
        perm = rng.permutation(n)
        flip = rng.random(covered) < 0.5
        nbrs[flip] = nbrs[flip, ::-1]
        adj[perm[idx], :2] = perm[nbrs]
    else:
        adj[idx, :2] = nbrs
    return BoundedDegreeGraph(n, d, adj)


def gen_cycle_cover(n: int, t: int, seed=0, d: int = DEFAULT_DEGREE, relabel: bool = True,
                    count: int | None = None) -> BoundedDegreeGraph:
    """``count`` (default floor(n/t)) disjoint t-cycles plus isolated vertices."""
    count = n // t if count is None else count
    return gen_cycles(n, [t] * count, seed, d, relabel)


def gen_yes(n: int, k: int, seed=0, d: int = DEFAULT_DEGREE, relabel: bool = True) -> BoundedDegreeGraph:
    if n < 2 * k + 4:
        raise ValueError("n must be at least 2k+4")
    return gen_cycle_cover(n, 2 * k + 4, seed, d, relabel)


def gen_no(n: int, k: int, seed=0, d: int = DEFAULT_DEGREE, relabel: bool = True) -> BoundedDegreeGraph:
    if n < 2 * k + 3:
        raise ValueError("n must be at least 2k+3")
    return gen_cycle_cover(n, 2 * k + 3, seed, d, relabel)


def removal_distance_bound(disjoint_short_cycles: int, n: int, d: int) -> float:
    """Lower bound on the distance to short-cycle-freeness: one edge per disjoint short cycle."""
    return disjoint_short_cycles / (d * n / 2)


# ---------------------------------------------------------------------------
# exact short-cycle detection


def _as_adjacency(graph) -> Mapping:
    if isinstance(graph, BoundedDegreeGraph):
        return graph.adjacency()
    return graph


def has_cycle_leq(graph, t: int) -> bool:
    """Exact: does the graph contain a cycle of length at most ``t``?

    A depth-bounded DFS from every vertex ``v`` over simple paths through
    vertices larger than ``v`` finds each short cycle from its smallest vertex.
    ``graph`` may also be a mapping vertex -> neighbours (missing entries mean
    no known neighbours); edges are read symmetrically.
    """
    adj = {}
    for v, nbrs in _as_adjacency(graph).items():
        for u in nbrs:
            adj.setdefault(v, set()).add(u)
            adj.setdefault(u, set()).add(v)
    for start in sorted(adj):
        stack = [(start, (start,))]
        while stack:
            v, path = stack.pop()
            for u in adj[v]:
                if u == start and len(path) >= 3:
                    return True
                if u > start and u not in path and len(path) < t:
                    stack.append((u, path + (u,)))
    return False


# ---------------------------------------------------------------------------
# BFS tester


def bfs_cycle_tester(k: int, t: int, eps: float = 0.1, d: int = DEFAULT_DEGREE,
                     sources: int | None = None) -> Strategy:
    """k-round breadth-first cycle tester.

    Round 0 queries ``sources`` uniform vertices (default ceil(3/eps)); each
    later round queries every newly discovered vertex. The tester rejects iff
    the explored edges close a cycle of length at most ``t``. Detection from a
    single source on a short cycle is guaranteed when ``t <= 2k + 2``; larger
    ``t`` is allowed for lower-bound experiments.
    """
    if k < 0 or t < 3:
        raise ValueError("need k >= 0 and t >= 3")
    s = math.ceil(3 / eps) if sources is None else sources
    max_queries = s * sum(d**j for j in range(k + 1))

    def play(rng, n):
        frontier = list(dict.fromkeys(rng.integers(n, size=s).tolist()))
        explored = {}
        for _ in range(k + 1):
            batch = [v for v in frontier if v not in explored]
            answers = yield batch
            found = []
            for v, nbrs in zip(batch, answers):
                explored[v] = tuple(nbrs)
                found += [u for u in nbrs if u not in explored]
            frontier = list(dict.fromkeys(found))
        return REJECT if has_cycle_leq(explored, t) else ACCEPT

    return Strategy(play, "graph", k, max_queries, name=f"bfs(k={k},t={t},s={s})")


# ---------------------------------------------------------------------------
# answer simulator


class AnswerSimulator:
    """Answers graph queries without a graph, as a lazily sampled cycle cover.

    Fresh vertices get two unused labels; boundary vertices (announced earlier
    as someone's neighbour) get that neighbour plus one unused label. "Unused"
    excludes every vertex queried or announced so far and the current batch.
    """

    kind = "graph"

    def __init__(self, n: int, rng: np.random.Generator):
        self.n = n
        self.size = n
        self.rng = rng
        self.answers: dict = {}
        self.known_neighbor: dict = {}
        self.seen: set = set()

    def answer_batch(self, queries):
        return simulate_answers(self, queries)


def simulate_answers(state: AnswerSimulator, queries) -> list:
    queries = list(queries)
    excluded = state.seen | set(queries)
    out = []
    for v in queries:
        if v in state.answers:
            out.append(state.answers[v])
            continue
        known = state.known_neighbor.get(v)
        need = 2 if known is None else 1
        if state.n - len(excluded) < need:
            raise PoolExhausted(f"only {state.n - len(excluded)} unused labels left")
        picks = []
        while len(picks) < need:
            u = int(state.rng.integers(state.n))
            if u not in excluded:
                excluded.add(u)
                picks.append(u)
        nbrs = picks if known is None else [known, picks[0]]
        if state.rng.random() < 0.5:
            nbrs.reverse()
        state.answers[v] = tuple(nbrs)
        for u in picks:
            state.known_neighbor[u] = v
        out.append(state.answers[v])
    state.seen |= excluded
    return out


# ---------------------------------------------------------------------------
# acceptance-gap experiments


def yes_sampler(n: int, k: int, d: int = DEFAULT_DEGREE):
    return lambda rng: GraphOracle(gen_yes(n, k, rng, d))


def no_sampler(n: int, k: int, d: int = DEFAULT_DEGREE):
    return lambda rng: GraphOracle(gen_no(n, k, rng, d))


def simulator_sampler(n: int):
    return lambda rng: AnswerSimulator(n, rng)


@dataclass(frozen=True)
class GapReport:
    acc_yes: float
    acc_no: float
    gap: float
    ci: float
    trials: int

    def to_record(self) -> dict:
        return {"acc_yes": self.acc_yes, "acc_no": self.acc_no, "gap": self.gap,
                "ci": self.ci, "trials": self.trials}


def estimate_gap(tester: Strategy, n: int, k: int, trials: int, seed=0,
                 d: int = DEFAULT_DEGREE) -> GapReport:
    """|acc_Y - acc_N| with the sum of both Hoeffding half-widths as its CI."""
    yes: Estimate = estimate_acceptance(tester, yes_sampler(n, k, d), trials, _sub(seed, 1))
    no: Estimate = estimate_acceptance(tester, no_sampler(n, k, d), trials, _sub(seed, 2))
    return GapReport(yes.probability, no.probability, abs(yes.probability - no.probability),
                     yes.half_width + no.half_width, trials)


def _sub(seed, tag: int) -> int:
    return int(np.random.SeedSequence([int(seed), tag]).generate_state(1)[0])


def restricted_tester(n: int, k: int, d: int = DEFAULT_DEGREE) -> Strategy:
    """(k-1)-round BFS with floor(sqrt(n)/10) sources, rejecting on cycles of length <= 2k+3."""
    return bfs_cycle_tester(k - 1, 2 * k + 3, d=d, sources=max(1, math.isqrt(n) // 10))


# ---------------------------------------------------------------------------
# event-rate probes for the lower-bound analysis


def isolated_hit_rate(n: int, k: int, q: int, trials: int, seed=0, no: bool = True) -> float:
    """Frequency with which q distinct uniform vertices include an isolated one."""
    gen = gen_no if no else gen_yes
    hits = 0
    for t in range(trials):
        rng = derive_rng(seed, "isolated", t)
        g = gen(n, k, rng)
        probe = rng.choice(n, size=q, replace=False)
        hits += bool(np.any(g.adj[probe, 0] == NIL))
    return hits / trials


def fresh_collision_rate(n: int, k: int, q: int, trials: int, seed=0, no: bool = False) -> float:
    """Frequency of a fresh query landing on the cycle of an earlier round's query.

    Each of k+1 rounds queries q vertices that are uniform among those neither
    queried nor seen as neighbours so far (the fresh queries of the analysis).
    Collisions inside round 0 are not counted.
    """
    t_len = 2 * k + 3 if no else 2 * k + 4
    hits = 0
    for trial in range(trials):
        rng = derive_rng(seed, "collision", trial)
        perm = rng.permutation(n)
        cycle_of = np.full(n, -1)
        covered = (n // t_len) * t_len
        cycle_of[perm[:covered]] = np.arange(covered) // t_len
        seen, touched, hit = set(), set(), False
        for r in range(k + 1):
            batch = []
            while len(batch) < q:
                v = int(rng.integers(n))
                if v not in seen and v not in batch:
                    batch.append(v)
            if r > 0 and any(cycle_of[v] >= 0 and cycle_of[v] in touched for v in batch):
                hit = True
                break
            for v in batch:
                seen.add(v)
                if cycle_of[v] >= 0:
                    touched.add(int(cycle_of[v]))
                    # mark the two neighbours as seen so later fresh picks avoid them
                    c = cycle_of[v]
                    members = perm[c * t_len:(c + 1) * t_len]
                    pos = int(np.where(members == v)[0][0])
                    seen.add(int(members[(pos - 1) % t_len]))
                    seen.add(int(members[(pos + 1) % t_len]))
        hits += hit
    return hits / trials


def collision_union_bound(n: int, k: int, q: int, no: bool = False) -> float:
    """Union bound sum_i q * (i q (t)) / (n - 3 i q) before simplification."""
    t_len = 2 * k + 3 if no else 2 * k + 4
    return sum(q * i * q * t_len / (n - 3 * i * q) for i in range(1, k + 1))
