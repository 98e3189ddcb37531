import random
from fractions import Fraction

import pytest

from pirsi.errors import FieldTooSmall, InvalidInstance, UseGrsInstead
from pirsi.gf import FieldParams, next_prime
from pirsi.gpc import (
    GpcAnswer,
    PartitionTrace,
    canonical_blocks,
    gpc_answer,
    gpc_decode,
    gpc_params,
    gpc_partition,
    gpc_query,
)
from pirsi.privacy import enumerate_runs

F5 = FieldParams(5)


def formula_params(K, D, M):
    a = M // D
    b = D + a
    g = K // b
    r = K - b * g
    return a, b, g, r, max(r - D, 0)


@pytest.mark.parametrize("K,D,M,expected", [
    (10, 2, 2, (1, 3, 3, 1, 0)),
    (5, 2, 2, (1, 3, 1, 2, 0)),
    (9, 1, 1, formula_params(9, 1, 1)),
    (11, 2, 4, formula_params(11, 2, 4)),
])
def test_params(K, D, M, expected):
    p = gpc_params(K, D, M)
    assert (p.alpha, p.beta, p.gamma, p.rho, p.sigma) == expected


def test_params_sigma_branch():
    assert formula_params(11, 2, 4) == (2, 4, 2, 3, 1)
    assert formula_params(9, 1, 1) == (1, 2, 4, 1, 0)


def test_params_errors():
    with pytest.raises(UseGrsInstead):
        gpc_params(5, 2, 1)
    with pytest.raises(InvalidInstance):
        gpc_params(5, 2, 4)


@pytest.mark.parametrize("K", range(2, 41))
def test_params_invariants(K):
    for D in range(1, K):
        for M in range(D, K - D + 1):
            p = gpc_params(K, D, M)
            assert 0 <= p.rho < p.beta
            assert p.sigma == 0 or p.sigma <= p.alpha - 1
            assert (p.sigma > 0) == (p.rho > D) == (Fraction(K - D, p.beta) > K // p.beta)


def reachable(K, D, M, W, S):
    params = gpc_params(K, D, M)
    probs = {}
    for trace, p in enumerate_runs(lambda rng: gpc_partition(W, S, params, rng)):
        key = canonical_blocks(trace.blocks)
        probs[key] = probs.get(key, 0) + p
    assert sum(probs.values()) == 1
    return probs


def test_k10_example_partition_is_reachable():
    probs = reachable(10, 2, 2, {3, 4}, {5, 8})
    target = canonical_blocks([(2,), (4, 6, 8), (3, 5, 7), (1, 9, 10)])
    assert probs.get(target, 0) > 0


def test_k5_example_partition_is_reachable():
    probs = reachable(5, 2, 2, {2, 5}, {1, 3})
    assert probs.get(canonical_blocks([(3, 5), (1, 2, 4)]), 0) > 0


def test_rho_zero_puts_everything_in_blocks():
    # D = K-M and M = D*alpha with rho = 0: K=6, D=2, M=4 gives alpha=2, beta=4 -> rho=2; use K=4, D=2, M=2
    params = gpc_params(6, 3, 3)
    assert params.rho == 2
    params = gpc_params(4, 2, 2)
    assert params.rho == 1
    params = gpc_params(6, 2, 4)
    assert params.rho == 2
    params = gpc_params(2, 1, 1)
    assert params.rho == 0
    rng = random.Random(3)
    for _ in range(20):
        t = gpc_partition({1}, {2}, params, rng)
        assert t.blocks[0] == ()
        assert t.demand_placement[0] == 0
        assert t.placed_side_info == {1: frozenset({2})}


def test_partition_trace_invariants_random():
    rng = random.Random(11)
    for K in range(2, 16):
        for D in range(1, K):
            for M in range(D, K - D + 1):
                params = gpc_params(K, D, M)
                W = rng.sample(range(1, K + 1), D)
                S = rng.sample([i for i in range(1, K + 1) if i not in W], M)
                t = gpc_partition(W, S, params, rng)
                assert sorted(i for b in t.blocks for i in b) == list(range(1, K + 1))
                for b, placed in t.placed_side_info.items():
                    assert placed <= set(S)
                    assert placed <= set(t.blocks[b])
                    assert len(placed) == (params.sigma if b == 0 else params.alpha)
                    assert t.demand_placement[b] > 0
                    assert t.demand_placement[b] == len(set(W) & set(t.blocks[b]))


def test_partition_rejects_bad_sets():
    params = gpc_params(5, 2, 2)
    with pytest.raises(InvalidInstance):
        gpc_partition({1, 2}, {2, 3}, params, random.Random(0))
    with pytest.raises(InvalidInstance):
        gpc_partition({1}, {2, 3}, params, random.Random(0))


def test_partition_is_reproducible_from_seed():
    params = gpc_params(12, 2, 3)
    a = gpc_partition({1, 7}, {2, 3, 9}, params, random.Random(42))
    b = gpc_partition({1, 7}, {2, 3, 9}, params, random.Random(42))
    assert a == b


def k10_example_query():
    params = gpc_params(10, 2, 2)
    trace = PartitionTrace(((2,), (4, 6, 8), (3, 5, 7), (1, 9, 10)), (0, 1, 1, 0), {1: frozenset({8}), 2: frozenset({5})})
    return params, gpc_query(trace, params, F5)


def k5_example_query():
    params = gpc_params(5, 2, 2)
    trace = PartitionTrace(((3, 5), (1, 2, 4)), (1, 1), {1: frozenset({1})})
    return params, gpc_query(trace, params, F5)


def test_query_matrices_of_examples():
    _, Q = k10_example_query()
    assert Q.Qdprime.to_rows() == [[1, 1, 1], [0, 1, 2]]
    assert Q.Qprime.to_rows() == [[1]]
    assert Q.blocks == ((2,), (1, 9, 10), (3, 5, 7), (4, 6, 8))
    _, Q = k5_example_query()
    assert Q.Qprime.to_rows() == [[1, 1], [0, 1]]
    assert Q.blocks == ((3, 5), (1, 2, 4))


def test_query_rho_zero_has_empty_qprime():
    params = gpc_params(4, 1, 1)
    Q = gpc_query(gpc_partition({1}, {2}, params, random.Random(0)), params, F5)
    assert Q.rho == 0 and Q.Qprime.rows == 0 and Q.rows0 == 0


def test_query_field_too_small():
    params = gpc_params(8, 1, 3)
    t = gpc_partition({1}, {2, 3, 4}, params, random.Random(0))
    with pytest.raises(FieldTooSmall):
        gpc_query(t, params, FieldParams(3))


def test_query_discards_client_state():
    _, Q = k10_example_query()
    fields = set(vars(Q))
    assert fields == {"fp", "blocks", "rows0", "rowsi"}


def symbolic(coeffs, db, q=5):
    return (sum(c * db[i - 1][0] for i, c in coeffs.items()) % q,)


def test_answer_equations_k10():
    _, Q = k10_example_query()
    rng = random.Random(5)
    db = [(rng.randrange(5),) for _ in range(10)]
    A = gpc_answer(Q, db)
    assert A.A0 == (symbolic({2: 1}, db),)
    by_block = dict(zip(Q.blocks[1:], A.Ai))
    assert by_block[(4, 6, 8)] == (symbolic({4: 1, 6: 1, 8: 1}, db), symbolic({6: 1, 8: 2}, db))
    assert by_block[(3, 5, 7)] == (symbolic({3: 1, 5: 1, 7: 1}, db), symbolic({5: 1, 7: 2}, db))
    assert by_block[(1, 9, 10)] == (symbolic({1: 1, 9: 1, 10: 1}, db), symbolic({9: 1, 10: 2}, db))
    assert len(A.symbols) == 7


def test_answer_equations_k5():
    _, Q = k5_example_query()
    db = [(1,), (2,), (3,), (4,), (0,)]
    A = gpc_answer(Q, db)
    assert A.A0 == (symbolic({3: 1, 5: 1}, db), symbolic({5: 1}, db))
    assert A.Ai == ((symbolic({1: 1, 2: 1, 4: 1}, db), symbolic({2: 1, 4: 2}, db)),)
    assert len(A.symbols) == 4


def test_answer_zero_db():
    _, Q = k10_example_query()
    assert all(s == (0,) for s in gpc_answer(Q, [(0,)] * 10).symbols)


def test_decode_k10_example():
    _, Q = k10_example_query()
    db = [(i % 5,) for i in range(1, 11)]
    A = gpc_answer(Q, db)
    got = gpc_decode(Q, A, {3, 4}, {5, 8}, {5: db[4], 8: db[7]}, decode_block_extras=True)
    assert got == {3: db[2], 7: db[6], 4: db[3], 6: db[5]}
    assert gpc_decode(Q, A, {3, 4}, {5, 8}, {5: db[4], 8: db[7]}) == {3: db[2], 4: db[3]}


def test_decode_k5_example():
    _, Q = k5_example_query()
    db = [(1,), (2,), (3,), (4,), (0,)]
    A = gpc_answer(Q, db)
    got = gpc_decode(Q, A, {2, 5}, {1, 3}, {1: db[0], 3: db[2]}, decode_block_extras=True)
    assert got == {5: db[4], 2: db[1], 4: db[3]}


def test_decode_from_regrouped_symbols():
    _, Q = k10_example_query()
    db = [(i % 5,) for i in range(1, 11)]
    A = GpcAnswer.from_symbols(Q, gpc_answer(Q, db).symbols)
    assert A == gpc_answer(Q, db)


@pytest.mark.parametrize("K", range(2, 8))
def test_round_trip_all_instances(K):
    rng = random.Random(100 + K)
    for D in range(1, K):
        for M in range(D, K - D + 1):
            params = gpc_params(K, D, M)
            fp = FieldParams(next_prime(params.beta), 2)
            for _ in range(15):
                W = rng.sample(range(1, K + 1), D)
                S = rng.sample([i for i in range(1, K + 1) if i not in W], M)
                db = [fp.random_message(rng) for _ in range(K)]
                Q = gpc_query(gpc_partition(W, S, params, rng), params, fp)
                got = gpc_decode(Q, gpc_answer(Q, db), W, S, {s: db[s - 1] for s in S})
                assert got == {w: db[w - 1] for w in W}


@pytest.mark.parametrize("K", range(2, 41))
def test_download_count_closed_forms(K):
    for D in range(1, K):
        for M in range(D, K - D + 1):
            p = gpc_params(K, D, M)
            n = p.download_symbols
            if p.sigma == 0:
                assert n == K - p.alpha * p.gamma
            else:
                assert Fraction(D, n) == Fraction(1, -(-K // p.beta))


def test_download_counts_of_examples():
    assert gpc_params(10, 2, 2).download_symbols == 7
    assert gpc_params(5, 2, 2).download_symbols == 4


@pytest.mark.parametrize("K", range(2, 60))
def test_d1_download_is_ceiling(K):
    for M in range(1, K):
        assert gpc_params(K, 1, M).download_symbols == -(-K // (M + 1))
