import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from roundlab.address import (FieldVector, FunctionTable, address_chain, address_table,
                              brute_force_min_queries, dt_tester_fk, dt_tester_fprime, f_k,
                              f_prime_k, g_iter, is_prime)
from roundlab.core import PointOracle, run
from roundlab.errors import EnumerationCapExceeded, NonPrimeModulus

X = FieldVector(5, (2, 4, 1, 3, 0))


@pytest.mark.parametrize("x, k, expected", [
    (X, 0, 2),
    (X, 2, 4),
    (FieldVector(7, (0,) * 7), 10, 0),
])
def test_g_iter(x, k, expected):
    assert g_iter(x, k) == expected


def test_chain_of_example():
    chain = address_chain(X, 2)
    assert chain.values == (2, 1, 4)
    assert chain.coordinates == (1, 3, 2)


@pytest.mark.parametrize("x, k, expected", [
    (X, 1, 0),
    (X, 2, 1),
    (FieldVector(5, (0,) * 5), 3, 1),
])
def test_f_k(x, k, expected):
    assert f_k(x, k) == expected


@pytest.mark.parametrize("x, k, expected", [
    (X, 1, 0),
    (FieldVector(5, (0,) * 5), 2, 1),
    (FieldVector(5, (1, 1, 0, 0, 0)), 1, 0),  # i = 2 and x_2 = 1 differs from x_3 = 0
])
def test_f_prime_k(x, k, expected):
    assert f_prime_k(x, k) == expected


def test_f_prime_needs_positive_k():
    with pytest.raises(ValueError):
        f_prime_k(X, 0)


def test_field_vector_validation():
    with pytest.raises(NonPrimeModulus):
        FieldVector(4, (0, 1, 2, 3))
    with pytest.raises(ValueError):
        FieldVector(5, (0, 5))
    with pytest.raises(ValueError):
        g_iter(FieldVector(5, (0, 1, 2)), 1)


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([3, 5, 7, 11]).flatmap(
    lambda p: st.tuples(st.just(p), st.lists(st.integers(0, p - 1), min_size=p, max_size=p))),
    st.integers(1, 12))
def test_pointer_chase_recurrence(px, k):
    p, entries = px
    x = FieldVector(p, entries)
    assert g_iter(x, k) == x.at(g_iter(x, k - 1) + 1)
    chain = address_chain(x, k)
    assert chain.coordinates[0] == 1
    for j in range(k):
        assert chain.coordinates[j + 1] == chain.values[j] + 1
    assert all(chain.values[j] == x.at(c) for j, c in enumerate(chain.coordinates))


def test_dt_fk_k0():
    t = run(dt_tester_fk(0), PointOracle((2, 0, 0, 0, 0)))
    assert t.per_round == [([1], [2])]
    assert t.verdict == 1


def test_dt_fk_example_transcript():
    t = run(dt_tester_fk(1), PointOracle(X.entries))
    assert t.per_round == [([1], [2]), ([3], [1])]
    assert t.verdict == 0


def test_dt_fk_exhaustive_f5():
    tester = dt_tester_fk(3)
    for x in itertools.product(range(5), repeat=5):
        t = run(tester, PointOracle(x))
        assert t.verdict == f_k(FieldVector(5, x), 3)
        assert t.total_queries <= 4 and t.rounds_used <= 4


def test_dt_fprime_example_transcript():
    t = run(dt_tester_fprime(1), PointOracle(X.entries))
    assert t.per_round == [([1], [2]), ([3, 4], [1, 3])]
    assert t.verdict == 0
    assert run(dt_tester_fprime(1), PointOracle((0,) * 5)).verdict == 1


def test_dt_fprime_exhaustive_f3():
    for x in itertools.product(range(3), repeat=3):
        t = run(dt_tester_fprime(2), PointOracle(x))
        assert t.verdict == f_prime_k(FieldVector(3, x), 2)
        assert t.rounds_used == 3 and t.total_queries == 4


# --- independent brute force: fibers as dictionaries -----------------------------


def naive_support(fn, inputs, p):
    """Fewest coordinates whose values determine fn on ``inputs``."""
    N = len(inputs[0])
    for size in range(N + 1):
        for S in itertools.combinations(range(N), size):
            fibers = {}
            if all(fibers.setdefault(tuple(x[i] for i in S), fn[x]) == fn[x] for x in inputs):
                return size
    return N


def naive_one_round(fn, p, N):
    inputs = list(itertools.product(range(p), repeat=N))
    best = N
    for size in range(N + 1):
        for S in itertools.combinations(range(N), size):
            worst = 0
            for a in itertools.product(range(p), repeat=size):
                sub = [x for x in inputs if all(x[i] == v for i, v in zip(S, a))]
                worst = max(worst, naive_support(fn, sub, p))
            best = min(best, size + worst)
    return best


@pytest.mark.parametrize("k, rounds, expected", [(0, 0, 1), (1, 0, 3), (1, 1, 2)])
def test_brute_force_f3(k, rounds, expected):
    table = address_table(3, k)
    fn = {x: table(x) for x in itertools.product(range(3), repeat=3)}
    oracle = naive_support(fn, list(fn), 3) if rounds == 0 else naive_one_round(fn, 3, 3)
    assert oracle == expected
    assert brute_force_min_queries(table, rounds) == expected


@pytest.mark.parametrize("p", [3, 5])
def test_round_hierarchy(p):
    table = address_table(p, 1)
    assert brute_force_min_queries(table, 1) < brute_force_min_queries(table, 0) == p


def test_brute_force_higher_rounds():
    table = address_table(3, 1)
    with pytest.raises(ValueError):
        brute_force_min_queries(table, 2)
    assert brute_force_min_queries(table, 2, exact=False) == 2


def test_enumeration_cap():
    with pytest.raises(EnumerationCapExceeded):
        FunctionTable.from_function(lambda x: 0, 11, 5)
    big = FunctionTable(7, 7, np.zeros((7,) * 7, dtype=np.int64))
    with pytest.raises(EnumerationCapExceeded):
        brute_force_min_queries(big, 0)


def test_function_table_round_trip():
    table = address_table(3, 2)
    back = FunctionTable.from_json(table.to_json())
    assert np.array_equal(back.values, table.values)
    assert table.to_dict()["values"][:3] == [table((0, 0, 0)), table((0, 0, 1)), table((0, 0, 2))]
    with pytest.raises(ValueError):
        FunctionTable.from_dict({"p": 3, "N": 3, "values": [0] * 26})
