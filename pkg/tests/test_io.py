import itertools
import json
import random
from collections import defaultdict

import pytest
from hypothesis import given, settings, strategies as st

from pirsi.dbfile import format_database, parse_database, read_database, write_database
from pirsi.errors import ParseError, WireError
from pirsi.gf import FieldParams, next_prime
from pirsi.gpc import PartitionTrace, gpc_answer, gpc_params, gpc_partition, gpc_query
from pirsi.grs import GrsAnswer, GrsQuery, grs_answer, grs_query
from pirsi.privacy import enumerate_runs
from pirsi import wire

from oracles import gpc_instances

F5 = FieldParams(5)


# database files


def test_parse_k10_database():
    text = "5 1 10\n" + "\n".join(str(i % 5) for i in range(10)) + "\n"
    fp, db = parse_database(text)
    assert fp == F5 and len(db) == 10 and db[3] == (3,)


def test_parse_single_zero_message():
    assert parse_database("2 1 1\n0\n") == (FieldParams(2), [(0,)])


@pytest.mark.parametrize("text,line", [
    ("5 1 2\n7\n1\n", 2),
    ("5 1\n1\n", 1),
    ("4 1 1\n0\n", 1),
    ("5 1 3\n1\n2\n", 3),
    ("5 2 1\n1\n", 2),
    ("5 1 1\nx\n", 2),
    ("", 1),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as exc:
        parse_database(text)
    assert exc.value.line == line
    assert str(exc.value).startswith(f"line {line}:")


def test_database_file_round_trip(tmp_path):
    rng = random.Random(0)
    fp = FieldParams(7, 3)
    msgs = [fp.random_message(rng) for _ in range(6)]
    path = tmp_path / "db.txt"
    write_database(path, fp, msgs)
    assert read_database(path) == (fp, msgs)
    assert parse_database(format_database(fp, msgs)) == (fp, msgs)


# wire format


def test_grs_query_bytes():
    frame = wire.encode_query(grs_query(3, 1, F5))
    assert frame == b'{"K":3,"M":1,"m":1,"protocol":"grs","q":5,"type":"query"}\n'
    assert wire.encode_query(wire.decode_query(frame)) == frame


def test_gpc_k5_blocks_on_the_wire():
    params = gpc_params(5, 2, 2)
    Q = gpc_query(PartitionTrace(((5, 3), (4, 1, 2)), (1, 1), {1: frozenset({1})}), params, F5)
    obj = json.loads(wire.encode_query(Q))
    assert obj == {"type": "query", "protocol": "gpc", "q": 5, "m": 1,
                   "blocks": [[3, 5], [1, 2, 4]], "rows0": 2, "rowsi": 2}
    assert wire.decode_query(wire.encode_query(Q)) == Q


@pytest.mark.parametrize("frame", [
    b'{"K":3,"M":1,"m":1,"protocol":"grs","q":5,"ty',
    b"",
    b"not json\n",
    b"[1,2]\n",
    b'{"a":1}\n',
    b'{"type":"query"}\n{"type":"query"}\n',
    b"\xff\xfe\n",
])
def test_malformed_frames(frame):
    with pytest.raises(WireError):
        wire.decode_query(frame)


@pytest.mark.parametrize("obj", [
    {"type": "query", "protocol": "pir", "q": 5, "m": 1, "K": 3, "M": 1},
    {"type": "query", "protocol": "grs", "q": 4, "m": 1, "K": 3, "M": 1},
    {"type": "query", "protocol": "grs", "q": 5, "m": 1, "K": 3, "M": 1, "W": [1]},
    {"type": "query", "protocol": "grs", "q": 5, "m": 1, "K": "3", "M": 1},
    {"type": "query", "protocol": "gpc", "q": 5, "m": 1, "blocks": [[1, 2], [3]], "rows0": 1, "rowsi": 1},
    {"type": "query", "protocol": "gpc", "q": 5, "m": 1, "blocks": [[3], [2, 1]], "rows0": 1, "rowsi": 1},
    {"type": "answer", "symbols": []},
])
def test_invalid_query_objects(obj):
    with pytest.raises(WireError):
        wire.decode_query(json.dumps(obj).encode())


def test_answer_frames():
    A = GrsAnswer(((3,), (2,)))
    frame = wire.encode_answer(A)
    assert frame == b'{"symbols":[[3],[2]],"type":"answer"}\n'
    assert wire.decode_answer(frame, grs_query(3, 1, F5)) == A
    with pytest.raises(WireError):
        wire.decode_answer(frame, grs_query(4, 1, F5))
    with pytest.raises(WireError):
        wire.decode_answer(b'{"symbols":[[3],[9]],"type":"answer"}\n', grs_query(3, 1, F5))
    with pytest.raises(WireError):
        wire.decode_answer_symbols(b'{"symbols":[[true]],"type":"answer"}\n')


def test_error_and_hello_frames():
    assert wire.encode_error("nope") == b'{"reason":"nope","type":"error"}\n'
    assert wire.encode_hello() == b'{"type":"hello"}\n'
    assert wire.encode_hello(F5, 10) == b'{"K":10,"m":1,"q":5,"type":"hello"}\n'


@st.composite
def random_queries(draw):
    seed = draw(st.integers(0, 2 ** 32))
    rng = random.Random(seed)
    m = draw(st.integers(1, 3))
    if draw(st.booleans()):
        K = draw(st.integers(1, 12))
        M = draw(st.integers(0, K - 1))
        return grs_query(K, M, FieldParams(next_prime(K), m)), rng
    K = draw(st.integers(2, 14))
    D = draw(st.integers(1, K // 2))
    M = draw(st.integers(D, K - D))
    params = gpc_params(K, D, M)
    W = rng.sample(range(1, K + 1), D)
    S = rng.sample([i for i in range(1, K + 1) if i not in W], M)
    return gpc_query(gpc_partition(W, S, params, rng), params, FieldParams(next_prime(params.beta), m)), rng


@settings(max_examples=150, deadline=None)
@given(random_queries())
def test_wire_round_trip(qr):
    query, rng = qr
    frame = wire.encode_query(query)
    assert wire.decode_query(frame) == query
    assert wire.encode_query(wire.decode_query(frame)) == frame
    db = [query.fp.random_message(rng) for _ in range(query.K)]
    answer = grs_answer(query, db) if isinstance(query, GrsQuery) else gpc_answer(query, db)
    assert wire.decode_answer(wire.encode_answer(answer), query) == answer


@pytest.mark.parametrize("K,D,M", list(gpc_instances(5)))
def test_gpc_encoding_depends_only_on_partition(K, D, M):
    params = gpc_params(K, D, M)
    fp = FieldParams(next_prime(params.beta))
    seen = defaultdict(set)
    universe = range(1, K + 1)
    for W in itertools.combinations(universe, D):
        for S in itertools.combinations([i for i in universe if i not in W], M):
            for trace, _ in enumerate_runs(lambda rng: gpc_partition(W, S, params, rng)):
                frame = wire.encode_query(gpc_query(trace, params, fp))
                seen[json.dumps(json.loads(frame)["blocks"])].add(frame)
    assert seen
    assert all(len(frames) == 1 for frames in seen.values())
