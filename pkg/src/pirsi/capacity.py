"""Capacity values, the protocol planner, and the D = 1 identities.

Every rate is an exact ``fractions.Fraction``.  The bound formulas here are
evaluated straight from floor/ceiling expressions in K, D and M; they do not
reuse the GPC parameter code, so comparing the two is a genuine check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import DivisibilityNotSatisfied, InvalidInstance
from .gpc import gpc_params

EXACT = "exact"
LOWER_BOUND = "lower_bound"


class CapacityValue(NamedTuple):
    value: Fraction
    kind: str  # EXACT or LOWER_BOUND

    @property
    def exact(self) -> bool:
        return self.kind == EXACT


def _check_instance(K: int, D: int, M: int):
    if not (isinstance(K, int) and isinstance(D, int) and isinstance(M, int)):
        raise InvalidInstance("K, D, M must be integers")
    if D < 1 or M < 0 or M > K - D:
        raise InvalidInstance(f"need 1 <= D and 0 <= M <= K-D, got K={K}, D={D}, M={M}")


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def gpc_bound(K: int, D: int, M: int) -> Fraction:
    """Rate achieved by partition-and-code for D <= M, from the closed form."""
    b = D + M // D
    if Fraction(K - D, b) <= K // b:
        return Fraction(D, K - (M // D) * (K // b))
    return Fraction(1, _ceil_div(K, b))


def capacity_value(K: int, D: int, M: int) -> CapacityValue:
    """Capacity for D > M (exact) or its lower bound for D <= M."""
    _check_instance(K, D, M)
    grs = Fraction(D, K - M)
    if D > M:
        return CapacityValue(grs, EXACT)
    return CapacityValue(max(grs, gpc_bound(K, D, M)), LOWER_BOUND)


@dataclass(frozen=True)
class Plan:
    protocol: str  # "GRS" or "GPC"
    download_symbols: int
    rate: Fraction
    K: int
    D: int
    M: int

    def __post_init__(self):
        if self.rate != Fraction(self.D, self.download_symbols):
            raise ValueError("plan rate must equal D / download_symbols")


def plan(K: int, D: int, M: int) -> Plan:
    """Pick the protocol with the smaller download; ties go to GRS."""
    _check_instance(K, D, M)
    grs_symbols = K - M
    if D > M:
        return Plan("GRS", grs_symbols, Fraction(D, grs_symbols), K, D, M)
    gpc_symbols = gpc_params(K, D, M).download_symbols
    if gpc_symbols < grs_symbols:
        return Plan("GPC", gpc_symbols, Fraction(D, gpc_symbols), K, D, M)
    return Plan("GRS", grs_symbols, Fraction(D, grs_symbols), K, D, M)


def appendix_identity(K: int, M: int) -> bool:
    """Check K - M*floor(K/(M+1)) == ceil(K/(M+1)) when (K-1)/(M+1) <= floor(K/(M+1)).

    Returns True vacuously when the premise fails.
    """
    if not 1 <= M + 1 <= K:
        raise InvalidInstance(f"need 1 <= M+1 <= K, got K={K}, M={M}")
    f = K // (M + 1)
    if Fraction(K - 1, M + 1) > f:
        return True
    return K - M * f == _ceil_div(K, M + 1)


def remark3_simplification(K: int, D: int, M: int) -> Fraction:
    """max{D/(K-M), (D + M/D)/K}, valid when D | M and (D + M/D) | K."""
    _check_instance(K, D, M)
    if M % D or K % (D + M // D):
        raise DivisibilityNotSatisfied(f"need D | M and (D + M/D) | K; got K={K}, D={D}, M={M}")
    return max(Fraction(D, K - M), Fraction(D + M // D, K))
