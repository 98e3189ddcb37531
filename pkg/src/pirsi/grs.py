"""GRS Code protocol: K-M Vandermonde-weighted sums of the whole database.

The query depends only on (K, M, q, m), never on the demand or side
information, so it reveals nothing.  Downloading K-M coded symbols lets the
user, after cancelling its M known messages, solve for every message it does
not hold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence

from .errors import DimensionMismatch, FieldTooSmall, InvalidInstance, SingularSystem
from .gf import FieldParams, Message, message_sub
from .linalg import MatrixFq, solve_square, vandermonde


@dataclass(frozen=True)
class GrsQuery:
    K: int
    M: int
    fp: FieldParams

    def __post_init__(self):
        if not 0 <= self.M < self.K:
            raise InvalidInstance(f"need 0 <= M < K, got K={self.K}, M={self.M}")
        if self.fp.q < self.K:
            raise FieldTooSmall(f"GRS Code needs q >= K={self.K}, got q={self.fp.q}")

    @property
    def omegas(self) -> tuple:
        # canonical evaluation points 0, 1, ..., K-1
        return tuple(range(self.K))

    @property
    def num_rows(self) -> int:
        return self.K - self.M

    @property
    def matrix(self) -> MatrixFq:
        return vandermonde(self.omegas, self.num_rows, self.fp.q)


@dataclass(frozen=True)
class GrsAnswer:
    symbols: tuple

    def __len__(self):
        return len(self.symbols)


def grs_query(K: int, M: int, fp: FieldParams) -> GrsQuery:
    return GrsQuery(K, M, fp)


def _check_db(db: Sequence[Message], K: int, fp: FieldParams) -> List[Message]:
    if len(db) != K:
        raise DimensionMismatch(f"database has {len(db)} messages, query expects K={K}")
    return [fp.check_message(x) for x in db]


def grs_answer(query: GrsQuery, db: Sequence[Message]) -> GrsAnswer:
    """Server side: A_i = sum_j omega_j^(i-1) X_j for i = 1..K-M."""
    db = _check_db(db, query.K, query.fp)
    return GrsAnswer(tuple(query.matrix.apply(db)))


def grs_decode(
    query: GrsQuery,
    answer: GrsAnswer,
    S: Sequence[int],
    X_S: Mapping[int, Message],
) -> Dict[int, Message]:
    """Recover every message outside S (1-based indices) from the answer.

    Returns the whole complement [K] \\ S, which contains the demand.
    """
    K, q = query.K, query.fp.q
    S = sorted(set(S))
    if len(S) != query.M or any(not 1 <= s <= K for s in S):
        raise InvalidInstance(f"side information must be {query.M} indices in [1, {K}], got {S}")
    if set(X_S) != set(S):
        raise InvalidInstance("X_S must contain exactly the messages indexed by S")
    if len(answer.symbols) != query.num_rows:
        raise DimensionMismatch(f"answer has {len(answer.symbols)} symbols, expected {query.num_rows}")

    V = query.matrix
    unknown = [j for j in range(1, K + 1) if j not in X_S]
    rhs = []
    for i, a in enumerate(answer.symbols):
        for s in S:
            c = V.entry(i, s - 1)
            if c:
                a = message_sub(a, tuple(c * v % q for v in X_S[s]), q)
        rhs.append(a)
    sub = V.select_columns([j - 1 for j in unknown])
    try:
        solved = solve_square(sub, rhs)
    except SingularSystem as exc:
        # square Vandermonde submatrices on distinct points are invertible
        raise RuntimeError("internal error: GRS decoding system is singular") from exc
    return dict(zip(unknown, solved))
