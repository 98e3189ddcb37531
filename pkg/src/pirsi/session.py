"""Client-side glue: pick a protocol, build its query, decode its answer."""

from __future__ import annotations

from typing import Dict, Mapping, Optional, Sequence

from .capacity import plan
from .errors import InvalidInstance
from .gf import FieldParams, Message
from .gpc import GpcAnswer, GpcQuery, gpc_answer, gpc_decode, gpc_params, gpc_partition, gpc_query
from .grs import GrsAnswer, GrsQuery, grs_answer, grs_decode, grs_query


def build_query(K: int, D: int, M: int, W, S, fp: FieldParams, rng, protocol: Optional[str] = None):
    """Query for demand W and side information S; ``protocol`` defaults to the planner's choice."""
    W, S = sorted(W), sorted(S)
    if len(W) != D or len(S) != M or set(W) & set(S):
        raise InvalidInstance("W and S must be disjoint with |W| = D and |S| = M")
    if any(not 1 <= i <= K for i in W + S):
        raise InvalidInstance(f"indices must lie in [1, {K}]")
    protocol = (protocol or plan(K, D, M).protocol).upper()
    if protocol == "GRS":
        return grs_query(K, M, fp)
    if protocol == "GPC":
        params = gpc_params(K, D, M)
        return gpc_query(gpc_partition(W, S, params, rng), params, fp)
    raise ValueError(f"unknown protocol {protocol!r}")


def compute_answer(query, db: Sequence[Message]):
    if isinstance(query, GpcQuery):
        return gpc_answer(query, db)
    return grs_answer(query, db)


def decode(query, answer, W, S, X_S: Mapping[int, Message]) -> Dict[int, Message]:
    """Return X_W decoded from the answer."""
    if isinstance(query, GrsQuery):
        assert isinstance(answer, GrsAnswer)
        full = grs_decode(query, answer, S, X_S)
        return {w: full[w] for w in sorted(W)}
    assert isinstance(answer, GpcAnswer)
    return gpc_decode(query, answer, W, S, X_S)


def protocol_name(query) -> str:
    return "GRS" if isinstance(query, GrsQuery) else "GPC"
