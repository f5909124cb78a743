import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from roundlab.address import FieldVector, dt_tester_fk, f_k
from roundlab.core import ACCEPT, PointOracle, Strategy, run
from roundlab.errors import SizeCapExceeded
from roundlab.rounds import (ExplicitDecisionTree, Leaf, Node, contract_one_round,
                             contraction_bound, equivalent, expand_nonadaptive, expansion_bound,
                             pad_to_depth, random_tree, strategy_to_tree, tree_to_strategy)


def two_batch_tree():
    """Ask x1; then x2 if x1 = 0, else x3; output the second answer."""
    left = Node((2,), {(0,): Leaf(0), (1,): Leaf(1)})
    right = Node((3,), {(0,): Leaf(0), (1,): Leaf(1)})
    return ExplicitDecisionTree(Node((1,), {(0,): left, (1,): right}), 3)


def brute_evaluate(tree, x):
    node = tree.root
    while isinstance(node, Node):
        node = node.children[tuple(x[v - 1] for v in node.queries)]
    return node.verdict


def test_evaluate_all_matches_walk():
    tree = random_tree(6, 3, np.random.default_rng(0))
    table = tree.evaluate_all()
    for j, x in enumerate(itertools.product(range(2), repeat=6)):
        assert table[j] == brute_evaluate(tree, x) == tree.evaluate(x)


def test_expand_example():
    tree = two_batch_tree()
    flat = expand_nonadaptive(tree)
    assert flat.root.queries == (1, 2, 3)
    assert flat.depth == 1
    assert flat.worst_case_queries() == 3 <= expansion_bound(tree.worst_case_queries())
    assert equivalent(tree, flat)


def test_expand_nonadaptive_identity():
    children = {a: Leaf(int(sum(a) % 2)) for a in itertools.product(range(2), repeat=3)}
    tree = ExplicitDecisionTree(Node((2, 4, 5), children), 5)
    flat = expand_nonadaptive(tree)
    assert flat.root.queries == (2, 4, 5)
    assert equivalent(tree, flat)


def test_expand_skips_unreachable_nodes():
    # the x1 = 1 branch asks x1 again; its inconsistent child must not contribute x4
    dead = Node((4,), {(0,): Leaf(0), (1,): Leaf(1)})
    again = Node((1,), {(0,): dead, (1,): Leaf(1)})
    tree = ExplicitDecisionTree(Node((1,), {(0,): Leaf(0), (1,): again}), 4)
    assert expand_nonadaptive(tree).root.queries == (1,)


def test_contract_example():
    tree = two_batch_tree()
    once = contract_one_round(tree)
    assert once.depth == 1
    assert once.worst_case_queries() == 3 <= contraction_bound(2, 1) == 10
    assert equivalent(tree, once)


def test_contract_light_first_round():
    rng = np.random.default_rng(1)
    children = {}
    for a in range(2):
        qs = tuple(sorted(int(v) for v in rng.choice(range(2, 9), size=3, replace=False)))
        children[(a,)] = Node(qs, {b: Leaf(int(sum(b) % 2)) for b in itertools.product(range(2), repeat=3)})
    tree = ExplicitDecisionTree(Node((1,), children), 8)
    once = contract_one_round(tree)
    assert once.worst_case_queries() <= 1 + 2 * 3
    assert equivalent(tree, once)


def test_contract_pads_short_paths():
    tree = ExplicitDecisionTree(Node((1,), {(0,): Leaf(0), (1,): Node((2,), {(0,): Leaf(1), (1,): Leaf(0)})}), 2)
    padded = pad_to_depth(tree, 2)
    assert {d for d, _ in padded.paths()} == {2}
    once = contract_one_round(tree)
    assert {d for d, _ in once.paths()} == {1}
    assert equivalent(tree, once)


def test_contract_needs_two_batches():
    tree = expand_nonadaptive(two_batch_tree())
    with pytest.raises(ValueError):
        contract_one_round(tree)


def test_surgery_refuses_other_alphabets():
    tree = ExplicitDecisionTree(Node((1,), {(a,): Leaf(a) for a in range(3)}), 1, sigma=3)
    with pytest.raises(ValueError):
        expand_nonadaptive(tree)
    with pytest.raises(ValueError):
        contract_one_round(tree)


def test_expand_size_cap():
    tree = two_batch_tree()
    with pytest.raises(SizeCapExceeded):
        expand_nonadaptive(tree, cap=2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 4), st.integers(4, 10))
def test_surgery_properties(seed, depth, n_vars):
    rng = np.random.default_rng(seed)
    tree = random_tree(n_vars, depth, rng, max_batch=2, leaf_prob=0.0)
    q, k = tree.worst_case_queries(), tree.depth - 1
    flat = expand_nonadaptive(tree)
    assert equivalent(tree, flat)
    assert q <= flat.worst_case_queries() <= expansion_bound(q)
    once = contract_one_round(tree)
    assert equivalent(tree, once)
    assert q <= once.worst_case_queries() <= contraction_bound(q, k)
    assert {d for d, _ in once.paths()} == {tree.depth - 1}


def test_random_depth3_trees_over_8_variables():
    rng = np.random.default_rng(7)
    for _ in range(100):
        tree = random_tree(8, 3, rng, max_batch=3)
        assert equivalent(tree, expand_nonadaptive(tree))
        if tree.depth >= 2:
            once = contract_one_round(tree)
            assert equivalent(tree, once)
            assert once.worst_case_queries() <= contraction_bound(tree.worst_case_queries(), tree.depth - 1)


def test_strategy_to_tree_boolean_address():
    strategy = dt_tester_fk(1)
    tree = strategy_to_tree(strategy, 2)
    assert tree.depth == 2
    for x in itertools.product(range(2), repeat=2):
        assert tree.evaluate(x) == f_k(FieldVector(2, x), 1) == run(strategy, PointOracle(x)).verdict


def test_constant_strategy_is_a_leaf():
    def play(rng, size):
        return ACCEPT
        yield  # pragma: no cover

    tree = strategy_to_tree(Strategy(play, "point", 0, 1), 3)
    assert isinstance(tree.root, Leaf) and tree.root.verdict == ACCEPT
    assert tree.node_count() == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_tree_strategy_round_trip(seed):
    tree = random_tree(6, 3, np.random.default_rng(seed))
    back = strategy_to_tree(tree_to_strategy(tree), 6)
    assert back.to_dict() == tree.to_dict()


def test_serialization_round_trip():
    tree = random_tree(7, 3, np.random.default_rng(4))
    back = ExplicitDecisionTree.from_json(tree.to_json())
    assert back.to_dict() == tree.to_dict()
    assert equivalent(tree, back)
    empty = ExplicitDecisionTree(Node((), {(): Leaf(1)}), 1)
    assert ExplicitDecisionTree.from_dict(empty.to_dict()).evaluate((0,)) == 1


def test_tree_strategy_runs_within_budget():
    tree = two_batch_tree()
    strat = tree_to_strategy(tree)
    assert (strat.rounds, strat.max_queries) == (1, 2)
    for x in itertools.product(range(2), repeat=3):
        assert run(strat, PointOracle(x)).verdict == tree.evaluate(x)
