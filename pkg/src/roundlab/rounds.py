"""Explicit decision trees over the Boolean cube and round-reduction surgery.

A tree node asks a batch of variables (1-based) at once and branches on the
tuple of answers. Depth is counted in batches, so a strategy with ``k``
adaptive rounds becomes a tree of depth ``k + 1``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Any, Union

import numpy as np

from .core import Strategy, derive_rng
from .errors import CapExceeded, SizeCapExceeded

SIZE_CAP = 20
NODE_CAP = 10**5


@dataclass(eq=False)
class Leaf:
    verdict: Any


@dataclass(eq=False)
class Node:
    queries: tuple
    children: dict = field(default_factory=dict)


Tree = Union[Leaf, Node]


@dataclass(eq=False)
class ExplicitDecisionTree:
    root: Tree
    n_vars: int
    sigma: int = 2

    # evaluation -----------------------------------------------------------
    def evaluate(self, x) -> Any:
        """Verdict on input ``x`` (a sequence, 0-based) or a mapping var -> value."""
        get = x.__getitem__ if isinstance(x, dict) else (lambda v: x[v - 1])
        node = self.root
        while isinstance(node, Node):
            node = node.children[tuple(int(get(v)) for v in node.queries)]
        return node.verdict

    def inputs(self) -> np.ndarray:
        if self.n_vars > SIZE_CAP:
            raise SizeCapExceeded(f"{self.sigma}^{self.n_vars} inputs exceed the cap")
        grid = np.array(list(itertools.product(range(self.sigma), repeat=self.n_vars)), dtype=np.int64)
        return grid.reshape(-1, self.n_vars)

    def evaluate_all(self, inputs: np.ndarray | None = None) -> np.ndarray:
        """Verdicts on every input, in ``itertools.product`` order."""
        X = self.inputs() if inputs is None else inputs
        out = np.empty(len(X), dtype=object)
        weights = self.sigma ** np.arange(SIZE_CAP)

        def walk(node, rows):
            if isinstance(node, Leaf):
                out[rows] = [node.verdict] * len(rows)
                return
            cols = np.asarray(node.queries, dtype=np.int64) - 1
            keys = X[np.ix_(rows, cols)] @ weights[:len(cols)][::-1] if len(cols) else np.zeros(len(rows), np.int64)
            for key in np.unique(keys):
                sub = rows[keys == key]
                answer = tuple(int(d) for d in np.unravel_index(int(key), (self.sigma,) * len(cols)))
                walk(node.children[answer], sub)

        walk(self.root, np.arange(len(X)))
        return out

    # structure --------------------------------------------------------------
    def paths(self):
        """(depth, query count) for every root-to-leaf path consistent with some input."""
        found = []

        def walk(node, assignment, depth, count):
            if isinstance(node, Leaf):
                found.append((depth, count))
                return
            for answer, child in node.children.items():
                extended = _extend(assignment, node.queries, answer)
                if extended is not None:
                    walk(child, extended, depth + 1, count + len(node.queries))

        walk(self.root, {}, 0, 0)
        return found

    @property
    def depth(self) -> int:
        return max(d for d, _ in self.paths())

    def worst_case_queries(self) -> int:
        return max(c for _, c in self.paths())

    def node_count(self) -> int:
        seen, stack = set(), [self.root]
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            if isinstance(node, Node):
                stack.extend(node.children.values())
        return len(seen)

    # serialization ----------------------------------------------------------
    def to_dict(self) -> dict:
        return {"n_vars": self.n_vars, "sigma": self.sigma, "root": _node_to_dict(self.root)}

    @classmethod
    def from_dict(cls, data: dict) -> "ExplicitDecisionTree":
        return cls(_node_from_dict(data["root"]), data["n_vars"], data.get("sigma", 2))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExplicitDecisionTree":
        return cls.from_dict(json.loads(text))


def _extend(assignment: dict, queries, answer):
    """Assignment extended by ``queries = answer``; ``None`` if it contradicts."""
    out = dict(assignment)
    for v, a in zip(queries, answer):
        if out.setdefault(v, a) != a:
            return None
    return out


def _node_to_dict(node: Tree) -> dict:
    if isinstance(node, Leaf):
        return {"verdict": node.verdict}
    return {"query_set": list(node.queries),
            "children": {",".join(map(str, k)): _node_to_dict(c) for k, c in node.children.items()}}


def _node_from_dict(data: dict) -> Tree:
    if "verdict" in data:
        return Leaf(data["verdict"])
    children = {tuple(int(a) for a in k.split(",") if a != ""): _node_from_dict(c)
                for k, c in data["children"].items()}
    return Node(tuple(data["query_set"]), children)


def _require_boolean(tree: ExplicitDecisionTree) -> None:
    if tree.sigma != 2:
        raise ValueError("round surgery is only defined for Boolean trees")


# ---------------------------------------------------------------------------
# surgery


def expand_nonadaptive(tree: ExplicitDecisionTree, cap: int = SIZE_CAP) -> ExplicitDecisionTree:
    """One-batch tree asking every variable that some reachable node asks."""
    _require_boolean(tree)
    union: set = set()

    def collect(node, assignment):
        if isinstance(node, Leaf):
            return
        union.update(node.queries)
        for answer, child in node.children.items():
            extended = _extend(assignment, node.queries, answer)
            if extended is not None:
                collect(child, extended)

    collect(tree.root, {})
    queries = tuple(sorted(union))
    if len(queries) > cap:
        raise SizeCapExceeded(f"{len(queries)} queries exceed the cap {cap}")
    children = {answer: Leaf(tree.evaluate(dict(zip(queries, answer))))
                for answer in itertools.product(range(2), repeat=len(queries))}
    return ExplicitDecisionTree(Node(queries, children), tree.n_vars, 2)


def pad_to_depth(tree: ExplicitDecisionTree, depth: int) -> ExplicitDecisionTree:
    """Extend early leaves with empty batches so every path has ``depth`` batches."""

    def pad(node, level):
        if isinstance(node, Leaf):
            for _ in range(depth - level):
                node = Node((), {(): node})
            return node
        return Node(node.queries, {a: pad(c, level + 1) for a, c in node.children.items()})

    return ExplicitDecisionTree(pad(tree.root, 0), tree.n_vars, tree.sigma)


def contract_one_round(tree: ExplicitDecisionTree) -> ExplicitDecisionTree:
    """Remove one batch from every path by merging a light node with all its children.

    With ``k + 1`` batches and worst-case query count ``q``, each path has a
    node among its first ``k`` with at most ``q/k`` queries. The first such
    node is replaced by one batch holding its own queries and those of every
    child; the grandchildren are kept as they are.
    """
    _require_boolean(tree)
    batches = tree.depth
    if batches < 2:
        raise ValueError("contraction needs a tree with at least two batches")
    padded = pad_to_depth(tree, batches)
    k = batches - 1
    limit = padded.worst_case_queries() / k

    def merge(node, assignment):
        merged = set(node.queries)
        for answer, child in node.children.items():
            if _extend(assignment, node.queries, answer) is not None:
                merged.update(child.queries)
        queries = tuple(sorted(merged - set(assignment)))
        children = {}
        for answer in itertools.product(range(2), repeat=len(queries)):
            full = {**assignment, **dict(zip(queries, answer))}
            child = node.children[tuple(full[v] for v in node.queries)]
            children[answer] = child.children[tuple(full[v] for v in child.queries)]
        return Node(queries, children)

    def walk(node, assignment, level):
        # on consistent paths averaging guarantees a light node before level k
        if len(node.queries) <= limit or level == k - 1:
            return merge(node, assignment)
        children = {}
        for answer, child in node.children.items():
            extended = {**assignment, **dict(zip(node.queries, answer))}
            children[answer] = walk(child, extended, level + 1)
        return Node(node.queries, children)

    return ExplicitDecisionTree(walk(padded.root, {}, 0), tree.n_vars, 2)


def expansion_bound(q: int) -> int:
    return 2**q - 1


def contraction_bound(q: int, k: int) -> float:
    return q * (1 + 2 ** (q / k))


# ---------------------------------------------------------------------------
# random trees and strategy conversion


def random_tree(n_vars: int, depth: int, rng: np.random.Generator, max_batch: int = 2,
                leaf_prob: float = 0.2, verdicts=(0, 1)) -> ExplicitDecisionTree:
    """Random tree with at most ``depth`` batches, never re-asking a variable on a path."""

    def grow(level, asked):
        free = [v for v in range(1, n_vars + 1) if v not in asked]
        if level == depth or not free or (level > 0 and rng.random() < leaf_prob):
            return Leaf(verdicts[int(rng.integers(len(verdicts)))])
        size = int(rng.integers(1, min(max_batch, len(free)) + 1))
        queries = tuple(sorted(int(v) for v in rng.choice(free, size=size, replace=False)))
        children = {a: grow(level + 1, asked | set(queries))
                    for a in itertools.product(range(2), repeat=size)}
        return Node(queries, children)

    return ExplicitDecisionTree(grow(0, frozenset()), n_vars, 2)


def strategy_to_tree(strategy: Strategy, N: int, sigma: int = 2, seed=0,
                     cap: int = NODE_CAP) -> ExplicitDecisionTree:
    """Materialize a deterministic point strategy by replaying it on every answer prefix."""
    if strategy.kind != "point":
        raise ValueError("only point strategies can be materialized")
    count = 0

    def build(prefix):
        nonlocal count
        count += 1
        if count > cap:
            raise CapExceeded(f"tree exceeds {cap} nodes")
        game = strategy.play(derive_rng(seed), N)
        try:
            batch = next(game)
            for answers in prefix:
                batch = game.send(list(answers))
        except StopIteration as stop:
            return Leaf(stop.value)
        batch = tuple(batch)
        children = {a: build(prefix + [a]) for a in itertools.product(range(sigma), repeat=len(batch))}
        return Node(batch, children)

    return ExplicitDecisionTree(build([]), N, sigma)


def tree_to_strategy(tree: ExplicitDecisionTree, name: str = "tree") -> Strategy:
    def play(rng, size):
        node = tree.root
        while isinstance(node, Node):
            answers = yield list(node.queries)
            node = node.children[tuple(int(a) for a in answers)]
        return node.verdict

    paths = tree.paths()
    return Strategy(play, "point", max(max(d for d, _ in paths) - 1, 0),
                    max(max(c for _, c in paths), 1), name=name)


def equivalent(a: ExplicitDecisionTree, b: ExplicitDecisionTree) -> bool:
    """Exhaustive agreement on all inputs."""
    return bool(np.all(a.evaluate_all() == b.evaluate_all()))


def contraction_report(tree: ExplicitDecisionTree) -> dict:
    """Sizes and bound checks for both surgeries on one tree."""
    q = tree.worst_case_queries()
    k = tree.depth - 1
    expanded = expand_nonadaptive(tree)
    out = {"q": q, "batches": tree.depth, "q_expanded": expanded.worst_case_queries(),
           "expand_ok": equivalent(tree, expanded)}
    out["expand_bound_ok"] = out["q_expanded"] <= expansion_bound(q)
    if k >= 1:
        contracted = contract_one_round(tree)
        out["q_contracted"] = contracted.worst_case_queries()
        out["contract_ok"] = equivalent(tree, contracted)
        out["contract_bound_ok"] = out["q_contracted"] <= contraction_bound(q, k) + 1e-9
        out["batches_after"] = sorted({d for d, _ in contracted.paths()})
    return out

