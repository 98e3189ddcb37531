"""Newline-delimited JSON wire format.

Every frame is one JSON object with sorted keys, no insignificant whitespace,
terminated by ``\\n``.  Query frames carry only the canonical query; there is
no field in which demand or side-information indices could travel.

    {"K":3,"M":1,"m":1,"protocol":"grs","q":5,"type":"query"}
    {"blocks":[[3,5],[1,2,4]],"m":1,"protocol":"gpc","q":5,"rows0":2,"rowsi":2,"type":"query"}
    {"symbols":[[3],[2]],"type":"answer"}
    {"reason":"...","type":"error"}
    {"type":"hello"}                       (client asks for database parameters)
    {"K":10,"m":1,"q":5,"type":"hello"}    (server reply)
"""

from __future__ import annotations

import json
from typing import List, Sequence, Union

from .errors import PirSiError, WireError
from .gf import FieldParams, Message
from .gpc import GpcAnswer, GpcQuery
from .grs import GrsAnswer, GrsQuery

Query = Union[GrsQuery, GpcQuery]
Answer = Union[GrsAnswer, GpcAnswer]


def _frame(obj: dict) -> bytes:
    return (json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")


def decode_frame(data: bytes) -> dict:
    """Parse one frame; the trailing newline is optional."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise WireError(f"frame is not UTF-8: {exc}") from None
    if data.endswith("\n"):
        data = data[:-1]
    if "\n" in data:
        raise WireError("frame contains more than one line")
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise WireError(f"malformed frame: {exc}") from None
    if not isinstance(obj, dict) or not isinstance(obj.get("type"), str):
        raise WireError("frame must be a JSON object with a string 'type'")
    return obj


def _int(obj: dict, key: str) -> int:
    v = obj.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        raise WireError(f"field {key!r} must be an integer")
    return v


def _expect_keys(obj: dict, keys: set):
    if set(obj) != keys:
        raise WireError(f"expected fields {sorted(keys)}, got {sorted(obj)}")


def encode_query(query: Query) -> bytes:
    fp = query.fp
    if isinstance(query, GrsQuery):
        return _frame({"type": "query", "protocol": "grs", "q": fp.q, "m": fp.m, "K": query.K, "M": query.M})
    if isinstance(query, GpcQuery):
        return _frame({
            "type": "query", "protocol": "gpc", "q": fp.q, "m": fp.m,
            "blocks": [list(b) for b in query.blocks],
            "rows0": query.rows0, "rowsi": query.rowsi,
        })
    raise TypeError(f"not a query: {query!r}")


def query_from_obj(obj: dict) -> Query:
    if obj.get("type") != "query":
        raise WireError(f"expected a query frame, got {obj.get('type')!r}")
    protocol = obj.get("protocol")
    try:
        if protocol == "grs":
            _expect_keys(obj, {"type", "protocol", "q", "m", "K", "M"})
            fp = FieldParams(_int(obj, "q"), _int(obj, "m"))
            return GrsQuery(_int(obj, "K"), _int(obj, "M"), fp)
        if protocol == "gpc":
            _expect_keys(obj, {"type", "protocol", "q", "m", "blocks", "rows0", "rowsi"})
            fp = FieldParams(_int(obj, "q"), _int(obj, "m"))
            blocks = obj["blocks"]
            if not isinstance(blocks, list) or not all(
                isinstance(b, list) and all(isinstance(i, int) and not isinstance(i, bool) for i in b)
                for b in blocks
            ):
                raise WireError("'blocks' must be a list of integer lists")
            return GpcQuery(fp, tuple(tuple(b) for b in blocks), _int(obj, "rows0"), _int(obj, "rowsi"))
    except (PirSiError, ValueError) as exc:
        if isinstance(exc, WireError):
            raise
        raise WireError(f"invalid query: {exc}") from exc
    raise WireError(f"unknown protocol tag {protocol!r}")


def decode_query(data: bytes) -> Query:
    return query_from_obj(decode_frame(data))


def encode_answer(answer: Union[Answer, Sequence[Message]]) -> bytes:
    symbols = answer.symbols if isinstance(answer, (GrsAnswer, GpcAnswer)) else answer
    return _frame({"type": "answer", "symbols": [list(s) for s in symbols]})


def answer_symbols_from_obj(obj: dict) -> List[Message]:
    if obj.get("type") != "answer":
        raise WireError(f"expected an answer frame, got {obj.get('type')!r}")
    _expect_keys(obj, {"type", "symbols"})
    symbols = obj["symbols"]
    if not isinstance(symbols, list) or not all(
        isinstance(s, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in s) for s in symbols
    ):
        raise WireError("'symbols' must be a list of integer lists")
    return [tuple(s) for s in symbols]


def decode_answer_symbols(data: bytes) -> List[Message]:
    return answer_symbols_from_obj(decode_frame(data))


def answer_for_query(query: Query, symbols: Sequence[Message]) -> Answer:
    """Regroup raw answer symbols into the answer type the query's decoder expects."""
    for s in symbols:
        try:
            query.fp.check_message(s)
        except PirSiError as exc:
            raise WireError(f"answer symbol invalid for query field: {exc}") from exc
    if isinstance(query, GrsQuery):
        if len(symbols) != query.num_rows:
            raise WireError(f"{len(symbols)} answer symbols, query expects {query.num_rows}")
        return GrsAnswer(tuple(tuple(s) for s in symbols))
    try:
        return GpcAnswer.from_symbols(query, symbols)
    except PirSiError as exc:
        raise WireError(str(exc)) from exc


def decode_answer(data: bytes, query: Query) -> Answer:
    return answer_for_query(query, decode_answer_symbols(data))


def encode_error(reason: str) -> bytes:
    return _frame({"type": "error", "reason": str(reason)})


def encode_hello(fp: FieldParams | None = None, K: int | None = None) -> bytes:
    if fp is None:
        return _frame({"type": "hello"})
    return _frame({"type": "hello", "q": fp.q, "m": fp.m, "K": K})
