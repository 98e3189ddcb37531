"""Flat text database files.

Line 1 is ``q m K``; each of the next K lines holds the m symbols of one
message, all decimal and space-separated.
"""

from __future__ import annotations

from pathlib import Path
from typing import List, Sequence, Tuple

from .errors import ParseError
from .gf import FieldParams, Message, is_prime


def parse_database(text: str) -> Tuple[FieldParams, List[Message]]:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ParseError("empty database file", line=1)
    header = lines[0].split()
    if len(header) != 3:
        raise ParseError("header must be 'q m K'", line=1)
    try:
        q, m, K = (int(v) for v in header)
    except ValueError:
        raise ParseError("header fields must be integers", line=1) from None
    if not is_prime(q):
        raise ParseError(f"q={q} is not prime", line=1)
    if m < 1 or K < 1:
        raise ParseError("m and K must be positive", line=1)
    fp = FieldParams(q, m)
    body = lines[1:]
    if len(body) != K:
        raise ParseError(f"expected {K} message records, found {len(body)}", line=len(lines))
    msgs = []
    for lineno, line in enumerate(body, start=2):
        fields = line.split()
        if len(fields) != m:
            raise ParseError(f"expected {m} symbols, found {len(fields)}", line=lineno)
        try:
            msg = tuple(int(v) for v in fields)
        except ValueError:
            raise ParseError("symbols must be decimal integers", line=lineno) from None
        for s in msg:
            if not 0 <= s < q:
                raise ParseError(f"symbol {s} outside [0, {q})", line=lineno)
        msgs.append(msg)
    return fp, msgs


def format_database(fp: FieldParams, msgs: Sequence[Message]) -> str:
    out = [f"{fp.q} {fp.m} {len(msgs)}"]
    out.extend(" ".join(str(s) for s in fp.check_message(x)) for x in msgs)
    return "\n".join(out) + "\n"


def read_database(path) -> Tuple[FieldParams, List[Message]]:
    return parse_database(Path(path).read_text(encoding="utf-8"))


def write_database(path, fp: FieldParams, msgs: Sequence[Message]) -> None:
    Path(path).write_text(format_database(fp, msgs), encoding="utf-8")
