"""Privacy and recoverability checks for the two protocols.

Three independent views of the same claims live here:

* an exhaustive enumerator that replays ``gpc_partition`` over every
  sequence of random draws and records exact probabilities;
* closed-form combinatorial expressions for P(N), P(Q | W, S, N), P(Q),
  P(W | N, Q) and the compliance counts T_1, T_2;
* span audits on the linear answer map, which turn the entropy conditions
  H(X_T | A, Q, X_S) = 0 into row-space membership tests.

Message indices are 1-based throughout.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from .errors import EnumerationBoundExceeded, InvalidCounts, NotCompliant, UnreachableQuery
from .gf import FieldParams
from .gpc import GpcParams, GpcQuery, canonical_blocks, gpc_params, gpc_partition, gpc_query
from .grs import GrsQuery, grs_query
from .linalg import MatrixFq, units_in_span

DEFAULT_ENUMERATION_BOUND = 7

AnswerMatrix = MatrixFq


# ---------------------------------------------------------------------------
# exhaustive enumeration


class _ScriptedRng:
    """Draw source that replays a fixed prefix and then returns 0s."""

    def __init__(self, prefix: Tuple[int, ...]):
        self.prefix = prefix
        self.values: List[int] = []
        self.bounds: List[int] = []

    def randrange(self, n: int) -> int:
        i = len(self.values)
        v = self.prefix[i] if i < len(self.prefix) else 0
        if not 0 <= v < n:
            raise RuntimeError("draw bounds changed under replay; procedure is not deterministic")
        self.values.append(v)
        self.bounds.append(n)
        return v


def enumerate_runs(fn: Callable) -> Iterator[Tuple[object, Fraction]]:
    """Yield (fn(rng), probability) for every distinct sequence of uniform draws.

    ``fn`` must use only ``rng.randrange`` and be deterministic given the draws.
    """
    stack: List[Tuple[int, ...]] = [()]
    while stack:
        prefix = stack.pop()
        rng = _ScriptedRng(prefix)
        result = fn(rng)
        for d in range(len(prefix), len(rng.bounds)):
            base = tuple(rng.values[:d])
            stack.extend(base + (v,) for v in range(1, rng.bounds[d]))
        yield result, Fraction(1, math.prod(rng.bounds))


def _subsets(universe, k):
    return [tuple(c) for c in itertools.combinations(sorted(universe), k)]


@dataclass
class QueryDistribution:
    """Exact query distribution of a protocol under the uniform (W, S) prior.

    ``conditional[(W, S)][Q]`` is P(Q | W, S); ``witnesses[(W, S)]`` refines it
    by the set of deliberately placed side-information indices; ``total[Q]``
    is the marginal P(Q).
    """

    K: int
    D: int
    M: int
    fp: FieldParams
    params: Optional[GpcParams]
    conditional: Dict[tuple, Dict[object, Fraction]] = field(default_factory=dict)
    witnesses: Dict[tuple, Dict[tuple, Fraction]] = field(default_factory=dict)
    total: Dict[object, Fraction] = field(default_factory=dict)

    @property
    def prior(self) -> Fraction:
        return Fraction(1, math.comb(self.K, self.D) * math.comb(self.K - self.D, self.M))

    @property
    def demand_sets(self) -> List[tuple]:
        return _subsets(range(1, self.K + 1), self.D)


def enumerate_distribution(
    K: int,
    D: int,
    M: int,
    fp: FieldParams,
    bound: int = DEFAULT_ENUMERATION_BOUND,
    partition: Callable = gpc_partition,
) -> QueryDistribution:
    """Ground-truth GPC query distribution by exhaustive replay of the partition.

    ``partition`` defaults to the real procedure; tests pass mutated variants
    with the same signature to check that the oracle detects leaks.
    """
    if K > bound:
        raise EnumerationBoundExceeded(f"K={K} exceeds enumeration bound {bound}")
    params = gpc_params(K, D, M)
    dist = QueryDistribution(K, D, M, fp, params)
    prior = dist.prior
    for W in dist.demand_sets:
        for S in _subsets(set(range(1, K + 1)) - set(W), M):
            cond: Dict[object, Fraction] = defaultdict(Fraction)
            wit: Dict[tuple, Fraction] = defaultdict(Fraction)
            for trace, p in enumerate_runs(lambda rng: partition(W, S, params, rng)):
                Q = gpc_query(trace, params, fp)
                placed = frozenset().union(*trace.placed_side_info.values())
                cond[Q] += p
                wit[(Q, placed)] += p
            assert sum(cond.values()) == 1
            dist.conditional[(W, S)] = dict(cond)
            dist.witnesses[(W, S)] = dict(wit)
            for Q, p in cond.items():
                dist.total[Q] = dist.total.get(Q, Fraction(0)) + prior * p
    return dist


def enumerate_grs_distribution(K: int, D: int, M: int, fp: FieldParams) -> QueryDistribution:
    """Same bookkeeping for GRS, whose query does not look at (W, S) at all."""
    dist = QueryDistribution(K, D, M, fp, None)
    prior = dist.prior
    for W in dist.demand_sets:
        for S in _subsets(set(range(1, K + 1)) - set(W), M):
            Q = grs_query(K, M, fp)
            dist.conditional[(W, S)] = {Q: Fraction(1)}
            dist.total[Q] = dist.total.get(Q, Fraction(0)) + prior
    return dist


def posterior(Q, dist: QueryDistribution) -> Dict[tuple, Fraction]:
    """P(W = W* | Q) for every demand set W*, by Bayes over the uniform prior."""
    pq = dist.total.get(Q)
    if not pq:
        raise UnreachableQuery(f"query not reachable under this distribution: {Q}")
    post = {W: Fraction(0) for W in dist.demand_sets}
    prior = dist.prior
    for (W, _S), cond in dist.conditional.items():
        p = cond.get(Q)
        if p:
            post[W] += prior * p
    return {W: p / pq for W, p in post.items()}


def is_w_private(dist: QueryDistribution) -> bool:
    uniform = Fraction(1, math.comb(dist.K, dist.D))
    return all(all(p == uniform for p in posterior(Q, dist).values()) for Q in dist.total)


# ---------------------------------------------------------------------------
# closed forms


@dataclass(frozen=True)
class DemandCounts:
    """Demand indices per block, n = (n_0, n_1, ..., n_gamma)."""

    n: Tuple[int, ...]

    @property
    def n0(self) -> int:
        return self.n[0]

    @property
    def lam(self) -> int:
        return sum(1 for x in self.n[1:] if x)

    @property
    def occupied(self) -> Tuple[int, ...]:
        """Non-zero n_i for i >= 1, largest first."""
        return tuple(sorted((x for x in self.n[1:] if x), reverse=True))

    def multiplicities(self, D: int) -> Dict[int, int]:
        """m_j for j in [D]: number of blocks Q_1..Q_gamma holding exactly j demands.

        Sizes that do not occur get m_j = 1 (0! = 1! makes the choice immaterial).
        """
        c = Counter(self.occupied)
        return {j: c.get(j, 1) for j in range(1, D + 1)}

    @property
    def profile(self) -> Tuple[int, Tuple[int, ...]]:
        # what the closed forms actually condition on: n_0 plus the multiset of the rest
        return (self.n0, self.occupied)


def demand_counts(Q: GpcQuery, W) -> DemandCounts:
    W = set(W)
    return DemandCounts(tuple(len(W.intersection(b)) for b in Q.blocks))


def _check_counts(params: GpcParams, counts: DemandCounts):
    n = counts.n
    if len(n) != params.gamma + 1:
        raise InvalidCounts(f"expected {params.gamma + 1} block counts, got {len(n)}")
    if sum(n) != params.D or any(x < 0 for x in n):
        raise InvalidCounts(f"block counts {n} must be non-negative and sum to D={params.D}")
    if n[0] > params.rho - params.sigma:
        raise InvalidCounts(f"n_0={n[0]} exceeds rho-sigma={params.rho - params.sigma}")
    if any(x > params.D for x in n[1:]):
        raise InvalidCounts("n_i exceeds D")


def _sigma_used(params: GpcParams, counts: DemandCounts) -> int:
    # sigma side-info indices are only placed in Q_0 when it holds a demand
    return params.sigma if counts.n0 else 0


def _profile_ways(params: GpcParams, counts: DemandCounts) -> int:
    """Number of demand sets W with this profile against one fixed partition."""
    lam = counts.lam
    mult = math.factorial(lam)
    for mj in counts.multiplicities(params.D).values():
        mult //= math.factorial(mj)
    ways = math.comb(params.gamma, lam) * mult * math.comb(params.rho, counts.n0)
    for x in counts.occupied:
        ways *= math.comb(params.beta, x)
    return ways


def closed_form_p_n(params: GpcParams, counts: DemandCounts) -> Fraction:
    """P(N): probability that the demand lands with profile N."""
    _check_counts(params, counts)
    return Fraction(_profile_ways(params, counts), math.comb(params.K, params.D))


def closed_form_p_q_given_wsn(params: GpcParams, counts: DemandCounts) -> Fraction:
    """P(Q, placement | W, S, N) for one compliant placement witness."""
    _check_counts(params, counts)
    f = math.factorial
    K, D, M, a, b, g, r = params.K, params.D, params.M, params.alpha, params.beta, params.gamma, params.rho
    s = _sigma_used(params, counts)
    lam = counts.lam
    occ = counts.occupied
    free_left = K - D - s - lam * a
    if M - s - lam * a < 0:
        raise InvalidCounts("profile needs more side information than M")
    num = math.prod(f(mj) for mj in counts.multiplicities(D).values())
    num *= f(counts.n0) * math.prod(f(x) for x in occ)
    num *= f(M - s - lam * a) * f(s) * f(a) ** lam
    num *= f(g - lam) * f(r - s - counts.n0) * math.prod(f(b - a - x) for x in occ) * f(b) ** (g - lam)
    return Fraction(num, f(D) * f(M) * f(free_left))


def closed_form_p_q(params: GpcParams) -> Fraction:
    """P(Q) = gamma! rho! (beta!)^gamma / K!, the same for every partition."""
    f = math.factorial
    return Fraction(f(params.gamma) * f(params.rho) * f(params.beta) ** params.gamma, f(params.K))


def num_partitions(params: GpcParams) -> int:
    f = math.factorial
    return f(params.K) // (f(params.gamma) * f(params.rho) * f(params.beta) ** params.gamma)


def closed_form_p_w_given_nq(params: GpcParams, counts: DemandCounts) -> Fraction:
    _check_counts(params, counts)
    return Fraction(1, _profile_ways(params, counts))


def t1_count(params: GpcParams, counts: DemandCounts) -> int:
    """Number of compliant (W, S, placement) witnesses for a fixed Q and profile N."""
    _check_counts(params, counts)
    return _profile_ways(params, counts) * t2_count(params, counts)


def t2_count(params: GpcParams, counts: DemandCounts) -> int:
    """Number of compliant (S, placement) witnesses for fixed Q and W."""
    _check_counts(params, counts)
    s = _sigma_used(params, counts)
    lam = counts.lam
    a = params.alpha
    ways = math.comb(params.rho - counts.n0, s)
    for x in counts.occupied:
        ways *= math.comb(params.beta - x, a)
    return ways * math.comb(params.K - params.D - s - lam * a, params.M - s - lam * a)


def _check_compliant(Q: GpcQuery, W, params: GpcParams) -> DemandCounts:
    W = set(W)
    if Q.K != params.K or tuple(len(b) for b in Q.blocks) != params.block_sizes:
        raise NotCompliant("query shape does not match the GPC parameters")
    if len(W) != params.D or not W <= set(range(1, params.K + 1)):
        raise NotCompliant(f"W must be {params.D} indices in [1, {params.K}]")
    counts = demand_counts(Q, W)
    try:
        closed_form_p_q_given_wsn(params, counts)
    except InvalidCounts as exc:
        raise NotCompliant(str(exc)) from exc
    return counts


def closed_form_posterior(Q: GpcQuery, W, params: GpcParams) -> Fraction:
    """P(N | Q) * P(W | N, Q), with P(N | Q) = P(N)."""
    counts = _check_compliant(Q, W, params)
    return closed_form_p_n(params, counts) * closed_form_p_w_given_nq(params, counts)


def all_counts(params: GpcParams) -> List[DemandCounts]:
    """Every valid profile, as a representative n-vector with demand blocks first."""
    out = []
    for n0 in range(0, min(params.rho - params.sigma, params.D) + 1):
        rest = params.D - n0
        for parts in _partitions(rest, params.D):
            if len(parts) > params.gamma:
                continue
            n = (n0,) + tuple(parts) + (0,) * (params.gamma - len(parts))
            out.append(DemandCounts(n))
    return out


def _partitions(n: int, largest: int):
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for tail in _partitions(n - first, first):
            yield (first,) + tail


# ---------------------------------------------------------------------------
# Monte Carlo diagnostic for instances too large to enumerate


@dataclass
class MonteCarloReport:
    samples: int
    categories: int
    counts: Dict[tuple, int]
    chi2: float
    p_value: float

    def looks_uniform(self, alpha: float = 1e-3) -> bool:
        return self.p_value >= alpha


def montecarlo_posterior(
    K: int,
    D: int,
    M: int,
    fp: FieldParams,
    samples: int,
    seed: int = 0,
    partition: Callable = gpc_partition,
) -> MonteCarloReport:
    """Chi-square check that the demand is uniform given the query.

    Each sampled (Q, W) is pushed through a uniformly random relabelling that
    maps Q onto a fixed reference partition.  The protocol is equivariant under
    relabelling, so under W-privacy the image of W is uniform over all
    D-subsets; any dependence of W on Q shows up as skew.
    """
    from scipy.stats import chisquare

    params = gpc_params(K, D, M)
    rng = random.Random(seed)
    universe = list(range(1, K + 1))
    cats = _subsets(universe, D)
    counts = Counter({c: 0 for c in cats})
    ref_sizes = params.block_sizes
    ref, start = [], 1
    for size in ref_sizes:
        ref.append(list(range(start, start + size)))
        start += size
    for _ in range(samples):
        W = rng.sample(universe, D)
        S = rng.sample([i for i in universe if i not in W], M)
        trace = partition(W, S, params, rng)
        blocks = [list(b) for b in canonical_blocks(trace.blocks)]
        tail = blocks[1:]
        rng.shuffle(tail)
        relabel = {}
        for src, dst in zip([blocks[0]] + tail, ref):
            src = src[:]
            rng.shuffle(src)
            relabel.update(zip(src, dst))
        counts[tuple(sorted(relabel[w] for w in W))] += 1
    observed = [counts[c] for c in cats]
    stat, p = chisquare(observed)
    return MonteCarloReport(samples, len(cats), dict(counts), float(stat), float(p))


# ---------------------------------------------------------------------------
# span audits


def linearize(query, protocol: Optional[str] = None) -> AnswerMatrix:
    """Coefficient matrix of the server's answer map: row r holds downloaded symbol r."""
    if protocol is None:
        protocol = "GRS" if isinstance(query, GrsQuery) else "GPC"
    protocol = protocol.upper()
    if protocol == "GRS":
        return query.matrix
    if protocol != "GPC":
        raise ValueError(f"unknown protocol {protocol!r}")
    q, K = query.fp.q, query.K
    rows = []
    for b, block in enumerate(query.blocks):
        mat = query.block_matrix(b)
        for j in range(mat.rows):
            row = [0] * K
            for l, idx in enumerate(block):
                row[idx - 1] = mat.entry(j, l)
            rows.append(row)
    return MatrixFq.from_rows(q, rows, cols=K)


@dataclass
class NecessaryConditionReport:
    """For each candidate demand W*, a side-information set S* that would decode it."""

    D: int
    M: int
    witnesses: Dict[tuple, Optional[tuple]]

    @property
    def passed(self) -> bool:
        return all(s is not None for s in self.witnesses.values())

    @property
    def failures(self) -> List[tuple]:
        return [w for w, s in self.witnesses.items() if s is None]


def recoverable(mat: AnswerMatrix, known, targets) -> bool:
    """H(X_targets | A, Q, X_known) = 0 for a linear answer map (1-based indices)."""
    return units_in_span(mat, {i - 1 for i in known}, {j - 1 for j in targets})


def audit_necessary_condition(mat: AnswerMatrix, D: int, M: int) -> NecessaryConditionReport:
    """Every W* must be decodable from the answer plus some M-subset of the rest."""
    K = mat.cols
    universe = range(1, K + 1)
    witnesses: Dict[tuple, Optional[tuple]] = {}
    for Wstar in _subsets(universe, D):
        witnesses[Wstar] = next(
            (S for S in _subsets(set(universe) - set(Wstar), M) if recoverable(mat, S, Wstar)),
            None,
        )
    return NecessaryConditionReport(D, M, witnesses)


def audit_full_recovery(mat: AnswerMatrix, S) -> bool:
    """True iff all of X_{[K] \\ S} follows from the answer and X_S."""
    S = set(S)
    return recoverable(mat, S, set(range(1, mat.cols + 1)) - S)
