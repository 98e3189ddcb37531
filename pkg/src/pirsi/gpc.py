"""Generalized Partition and Code (GPC) protocol for D <= M.

The user randomly partitions [K] into a block Q_0 of size rho and gamma
blocks of size beta = D + floor(M/D).  Each block that receives a demand
index also receives enough side-information indices that a D-row (or, for
Q_0, a (rho-sigma)-row) Vandermonde combination of the block suffices to
decode it.  The server sees only the unordered partition.

All randomness goes through ``rng.randrange(n)``; ``random.Random(seed)``
satisfies this, and the privacy enumerator substitutes a scripted source.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence, Tuple

from .errors import DimensionMismatch, FieldTooSmall, InvalidInstance, SingularSystem, UseGrsInstead
from .gf import FieldParams, Message, fpow, message_sub
from .linalg import MatrixFq, solve_square, vandermonde


@dataclass(frozen=True)
class GpcParams:
    K: int
    D: int
    M: int
    alpha: int
    beta: int
    gamma: int
    rho: int
    sigma: int

    @property
    def download_symbols(self) -> int:
        return (self.rho - self.sigma) + self.gamma * self.D

    @property
    def block_sizes(self) -> Tuple[int, ...]:
        return (self.rho,) + (self.beta,) * self.gamma


def gpc_params(K: int, D: int, M: int) -> GpcParams:
    if D < 1 or K < 1:
        raise InvalidInstance(f"need K >= 1 and D >= 1, got K={K}, D={D}")
    if D > M:
        raise UseGrsInstead(f"D={D} > M={M}: use the GRS Code protocol")
    if M > K - D:
        raise InvalidInstance(f"M={M} exceeds K-D={K - D}")
    alpha = M // D
    beta = D + alpha
    gamma = K // beta
    rho = K - beta * gamma
    sigma = max(rho - D, 0)
    return GpcParams(K, D, M, alpha, beta, gamma, rho, sigma)


@dataclass(frozen=True)
class PartitionTrace:
    """Client-side record of one run of the randomized partition.

    Block 0 is Q_0.  ``demand_placement[b]`` is the number of demand indices
    in block b and ``placed_side_info[b]`` the side-information indices that
    were deliberately put next to them.  None of this is sent to the server.
    """

    blocks: Tuple[Tuple[int, ...], ...]
    demand_placement: Tuple[int, ...]
    placed_side_info: Mapping[int, frozenset] = field(default_factory=dict)

    @property
    def num_demand_blocks(self) -> int:
        return sum(1 for n in self.demand_placement[1:] if n)


def _check_sets(W, S, params: GpcParams):
    W, S = set(W), set(S)
    K = params.K
    if len(W) != params.D or len(S) != params.M:
        raise InvalidInstance(f"|W|={len(W)}, |S|={len(S)}; expected D={params.D}, M={params.M}")
    if W & S:
        raise InvalidInstance("demand and side information overlap")
    if any(not (isinstance(i, int) and 1 <= i <= K) for i in W | S):
        raise InvalidInstance(f"indices must lie in [1, {K}]")
    return W, S


def gpc_partition(W, S, params: GpcParams, rng) -> PartitionTrace:
    """Run the randomized partition for demand W and side information S."""
    W, S = _check_sets(W, S, params)
    sizes = params.block_sizes
    blocks: List[List[int]] = [[] for _ in sizes]
    free = [b for b, size in enumerate(sizes) for _ in range(size)]

    # (a) demand indices go to D slots chosen uniformly among all K
    for w in sorted(W):
        blocks[free.pop(rng.randrange(len(free)))].append(w)
    counts = tuple(len(b) for b in blocks)

    # (b) pad each demand-bearing block with sigma (Q_0) or alpha (Q_i) side-info indices
    pool = sorted(S)
    placed: Dict[int, frozenset] = {}
    for b, n in enumerate(counts):
        if not n:
            continue
        chosen = []
        for _ in range(params.sigma if b == 0 else params.alpha):
            s = pool.pop(rng.randrange(len(pool)))
            free.remove(b)
            blocks[b].append(s)
            chosen.append(s)
        placed[b] = frozenset(chosen)

    # (c) everything else is scattered uniformly over the remaining slots
    used = W.union(*placed.values()) if placed else set(W)
    for x in [i for i in range(1, params.K + 1) if i not in used]:
        blocks[free.pop(rng.randrange(len(free)))].append(x)

    trace = PartitionTrace(tuple(tuple(b) for b in blocks), counts, placed)
    _check_trace(trace, params)
    return trace


def _check_trace(trace: PartitionTrace, params: GpcParams):
    seen = [i for b in trace.blocks for i in b]
    assert sorted(seen) == list(range(1, params.K + 1))
    assert tuple(len(b) for b in trace.blocks) == params.block_sizes
    n = trace.demand_placement
    assert sum(n) == params.D and n[0] <= params.rho - params.sigma
    lam = trace.num_demand_blocks
    deliberate = (params.sigma if n[0] else 0) + lam * params.alpha
    assert deliberate <= params.M
    assert sum(len(v) for v in trace.placed_side_info.values()) == deliberate


def canonical_blocks(blocks: Sequence[Sequence[int]]) -> Tuple[Tuple[int, ...], ...]:
    """Sort each block and order Q_1..Q_gamma by smallest element; Q_0 stays first."""
    head = tuple(sorted(blocks[0]))
    rest = sorted(tuple(sorted(b)) for b in blocks[1:])
    return (head,) + tuple(rest)


@dataclass(frozen=True)
class GpcQuery:
    """What the server receives: the canonical partition and the row counts.

    ``blocks[0]`` is Q_0 (possibly empty); every other block has size beta.
    Position l of a sorted block is bound to evaluation point omega = l.
    """

    fp: FieldParams
    blocks: Tuple[Tuple[int, ...], ...]
    rows0: int
    rowsi: int

    def __post_init__(self):
        if not self.blocks:
            raise InvalidInstance("GPC query needs at least the Q_0 block")
        if canonical_blocks(self.blocks) != self.blocks:
            raise InvalidInstance("GPC query blocks are not in canonical order")
        K = sum(len(b) for b in self.blocks)
        if sorted(i for b in self.blocks for i in b) != list(range(1, K + 1)):
            raise InvalidInstance("GPC query blocks do not partition [K]")
        others = {len(b) for b in self.blocks[1:]}
        if len(others) > 1:
            raise InvalidInstance("blocks Q_1..Q_gamma must have equal size")
        if others and len(self.blocks[0]) >= others.pop():
            raise InvalidInstance("Q_0 must be smaller than the other blocks")
        rho = len(self.blocks[0])
        if not (0 <= self.rows0 <= rho) or (rho and self.rows0 < 1):
            raise InvalidInstance(f"rows0={self.rows0} invalid for |Q_0|={rho}")
        if self.gamma and not 1 <= self.rowsi <= self.beta:
            raise InvalidInstance(f"rowsi={self.rowsi} invalid for block size {self.beta}")
        if self.fp.q < max(rho, self.beta):
            raise FieldTooSmall(f"GPC needs q >= {max(rho, self.beta)}, got q={self.fp.q}")

    @property
    def K(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def rho(self) -> int:
        return len(self.blocks[0])

    @property
    def gamma(self) -> int:
        return len(self.blocks) - 1

    @property
    def beta(self) -> int:
        return len(self.blocks[1]) if self.gamma else 0

    @property
    def Qprime(self) -> MatrixFq:
        if self.rows0 == 0:
            return MatrixFq.zeros(self.fp.q, 0, self.rho)
        return vandermonde(range(self.rho), self.rows0, self.fp.q)

    @property
    def Qdprime(self) -> MatrixFq:
        return vandermonde(range(self.beta), self.rowsi, self.fp.q)

    def block_matrix(self, b: int) -> MatrixFq:
        return self.Qprime if b == 0 else self.Qdprime

    @property
    def download_symbols(self) -> int:
        return self.rows0 + self.gamma * self.rowsi


def gpc_query(trace: PartitionTrace, params: GpcParams, fp: FieldParams) -> GpcQuery:
    if fp.q < params.beta:
        raise FieldTooSmall(f"GPC needs q >= beta={params.beta}, got q={fp.q}")
    return GpcQuery(fp, canonical_blocks(trace.blocks), params.rho - params.sigma, params.D)


@dataclass(frozen=True)
class GpcAnswer:
    A0: tuple
    Ai: tuple

    @property
    def symbols(self) -> List[Message]:
        out = list(self.A0)
        for a in self.Ai:
            out.extend(a)
        return out

    def block(self, b: int) -> tuple:
        return self.A0 if b == 0 else self.Ai[b - 1]

    @classmethod
    def from_symbols(cls, query: GpcQuery, symbols: Sequence[Message]) -> "GpcAnswer":
        if len(symbols) != query.download_symbols:
            raise DimensionMismatch(f"{len(symbols)} symbols, query expects {query.download_symbols}")
        symbols = [tuple(s) for s in symbols]
        a0 = tuple(symbols[:query.rows0])
        rest = symbols[query.rows0:]
        ai = tuple(tuple(rest[i * query.rowsi:(i + 1) * query.rowsi]) for i in range(query.gamma))
        return cls(a0, ai)


def gpc_answer(query: GpcQuery, db: Sequence[Message]) -> GpcAnswer:
    if len(db) != query.K:
        raise DimensionMismatch(f"database has {len(db)} messages, query covers K={query.K}")
    db = [query.fp.check_message(x) for x in db]
    out = []
    for b, block in enumerate(query.blocks):
        mat = query.block_matrix(b)
        out.append(tuple(mat.apply([db[i - 1] for i in block])) if mat.rows else ())
    return GpcAnswer(out[0], tuple(out[1:]))


def gpc_decode(
    query: GpcQuery,
    answer: GpcAnswer,
    W: Sequence[int],
    S: Sequence[int],
    X_S: Mapping[int, Message],
    decode_block_extras: bool = False,
) -> Dict[int, Message]:
    """Recover X_W block by block.

    In each block holding a demand index, every known side-information
    message is cancelled and the leading u rows of the block's Vandermonde
    system are solved for its u remaining unknowns.  With
    ``decode_block_extras`` the other unknowns of those blocks are returned
    as well.
    """
    q = query.fp.q
    W = set(W)
    if set(X_S) != set(S):
        raise InvalidInstance("X_S must contain exactly the messages indexed by S")
    if W & set(S) or not W or not W <= set(range(1, query.K + 1)):
        raise InvalidInstance("demand must be a non-empty subset of [K] disjoint from S")
    out: Dict[int, Message] = {}
    for b, block in enumerate(query.blocks):
        if not W.intersection(block):
            continue
        mat = query.block_matrix(b)
        eqs = answer.block(b)
        unknown = [l for l, idx in enumerate(block) if idx not in X_S]
        if len(unknown) > len(eqs):
            raise InvalidInstance(
                f"block {b} has {len(unknown)} unknowns but {len(eqs)} equations; "
                "query was not built for this (W, S)"
            )
        u = len(unknown)
        rhs = []
        for j in range(u):
            a = eqs[j]
            for l, idx in enumerate(block):
                if idx in X_S:
                    c = mat.entry(j, l)
                    if c:
                        a = message_sub(a, tuple(c * v % q for v in X_S[idx]), q)
            rhs.append(a)
        sub = MatrixFq.from_rows(q, [[fpow(l, j, q) for l in unknown] for j in range(u)], cols=u)
        try:
            solved = solve_square(sub, rhs)
        except SingularSystem as exc:
            raise RuntimeError(f"internal error: GPC block {b} system is singular") from exc
        for l, x in zip(unknown, solved):
            idx = block[l]
            if decode_block_extras or idx in W:
                out[idx] = x
    return out
