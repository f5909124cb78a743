import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from roundlab.address import FieldVector
from roundlab.codes import (BOTTOM, LinearCode, corrupt, decode_plan, encode, exact_distance,
                            hadamard_code, identity_code, local_test, local_test_strategy,
                            plurality, relaxed_decode, relaxed_decoder_strategy, row_support)
from roundlab.core import PointOracle, estimate_acceptance, run
from roundlab.errors import CapExceeded, DimensionMismatch, IndexOutOfRange, NonPrimeModulus

H52 = hadamard_code(5, 2)
H32 = hadamard_code(3, 2)


def test_hadamard_parameters():
    assert (H52.M, H52.N, H52.p) == (25, 2, 5)
    assert H52.relative_distance == pytest.approx(0.8)
    assert H52.decoding_radius == pytest.approx(0.2)
    assert H52.decoding_radius < H52.relative_distance / 2


def test_row_order_and_index():
    assert H52.index_of((0, 0)) == 1
    assert H52.index_of((3, 4)) == 3 * 5 + 4 + 1
    assert tuple(row_support(H52, H52.index_of((3, 4)))) == (3, 4)
    assert not row_support(H52, 1).any()
    assert np.array_equal(row_support(H52, 7), row_support(H52, 7))


def test_row_support_range():
    with pytest.raises(IndexOutOfRange):
        row_support(H52, 26)
    with pytest.raises(IndexOutOfRange):
        row_support(H52, 0)


def test_encode_examples():
    w = encode(H52, (1, 2))
    assert w[H52.index_of((3, 4)) - 1] == 1
    assert not encode(H52, (0, 0)).any()
    assert np.array_equal(encode(H52, FieldVector(5, (1, 2))), w)


def test_encode_errors():
    with pytest.raises(DimensionMismatch):
        encode(H52, (1, 2, 3))
    with pytest.raises(DimensionMismatch):
        encode(H52, FieldVector(3, (1, 2, 0)))


def test_construction_errors():
    with pytest.raises(CapExceeded):
        hadamard_code(11, 5)
    with pytest.raises(NonPrimeModulus):
        hadamard_code(6, 2)


def brute_min_distance(code):
    words = [tuple(encode(code, x)) for x in itertools.product(range(code.p), repeat=code.N)]
    return min(sum(a != b for a, b in zip(u, v)) for u, v in itertools.combinations(words, 2)) / code.M


def test_distance_brute_force():
    assert brute_min_distance(H32) == pytest.approx(2 / 3)
    assert brute_min_distance(H32) >= H32.relative_distance - 1e-12


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=2, max_size=2), st.lists(st.integers(0, 4), min_size=2, max_size=2),
       st.integers(0, 4), st.integers(0, 4))
def test_linearity(x, y, alpha, beta):
    x, y = np.array(x), np.array(y)
    lhs = encode(H52, (alpha * x + beta * y) % 5)
    rhs = (alpha * encode(H52, x) + beta * encode(H52, y)) % 5
    assert np.array_equal(lhs, rhs)


def test_local_test_codewords_never_rejected():
    rng = np.random.default_rng(0)
    for t in range(200):
        w = encode(H52, rng.integers(5, size=2))
        assert local_test(H52, w, 10, seed=t) == "accept"


def test_local_test_single_corruption_caught():
    w = corrupt(encode(H52, (1, 2)), [7], np.random.default_rng(1), 5)
    est = estimate_acceptance(local_test_strategy(H52, 200), lambda rng: PointOracle(w), 200, seed=1)
    assert est.probability < 1.0


def test_local_test_random_words_rejected():
    est = estimate_acceptance(local_test_strategy(H52, 50),
                              lambda rng: PointOracle(rng.integers(5, size=25)), 1000, seed=2)
    assert 1 - est.probability >= 0.99


def test_decoder_example():
    w = encode(H52, (1, 2))
    assert relaxed_decode(H52, w, 2, offset=(3, 4)) == 2
    plan = decode_plan(H52, None, 2, 1, offsets=(3, 4))
    assert plan == [H52.index_of((3, 4)), H52.index_of((3, 0))]


def test_decoder_exact_on_codewords():
    rng = np.random.default_rng(3)
    for t in range(1000):
        x = rng.integers(5, size=2)
        i = int(rng.integers(1, 3))
        assert relaxed_decode(H52, encode(H52, x), i, seed=t) == x[i - 1]


def test_decoder_two_queries():
    t = run(relaxed_decoder_strategy(H52, 1), PointOracle(encode(H52, (4, 4))), seed=0)
    assert t.total_queries == 2 and t.rounds_used == 1


def test_decoder_under_corruption():
    w = corrupt(encode(H52, (3, 1)), [4], np.random.default_rng(5), 5)  # 1 of 25 entries
    strat = relaxed_decoder_strategy(H52, 1)
    correct = sum(run(strat, PointOracle(w), seed=t).verdict == 3 for t in range(10**4))
    assert correct / 10**4 >= 1 - 2 * 0.05


def test_spot_check_outputs_bottom():
    w = np.zeros(25, dtype=np.int64)
    w[0] = 1  # only triples touching the row a = 0 fail
    outs = {relaxed_decode(H52, w, 1, seed=t, spot_check=True) for t in range(300)}
    assert BOTTOM in outs
    assert relaxed_decode(H52, encode(H52, (2, 2)), 1, seed=0, spot_check=True) == 2


def test_plurality_ties_to_smallest():
    assert plurality([3, 1, 3, 1, 2]) == 1
    assert plurality([4]) == 4


def brute_nearest(code, w):
    best = None
    for x in itertools.product(range(code.p), repeat=code.N):
        d = int(np.sum(encode(code, x) != w))
        if best is None or d < best[1]:
            best = (x, d)
    return best[0], best[1] / code.M


@pytest.mark.parametrize("message, flip", [((1, 0), 5), ((0, 0), 2)])
def test_exact_distance_examples(message, flip):
    w = encode(H32, message)
    w[flip] = (w[flip] + 1) % 3
    nearest, dist = exact_distance(H32, w)
    assert (nearest, dist) == brute_nearest(H32, w)
    assert nearest == message and dist == pytest.approx(1 / 9)


def test_exact_distance_codeword():
    assert exact_distance(H52, encode(H52, (4, 1))) == ((4, 1), 0)
    with pytest.raises(DimensionMismatch):
        exact_distance(H52, [0] * 24)


def test_identity_code():
    code = identity_code(7, 4)
    assert np.array_equal(encode(code, (1, 2, 3, 4)), [1, 2, 3, 4])
    with pytest.raises(ValueError):
        decode_plan(code, np.random.default_rng(0), 1, 1)


def test_code_serialization():
    back = LinearCode.from_dict(H52.to_dict())
    assert np.array_equal(back.rows, H52.rows)
    assert (back.p, back.N, back.M, back.family) == (5, 2, 25, "hadamard")
    assert back.decoding_radius == H52.decoding_radius
