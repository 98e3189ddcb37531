"""Prime-field arithmetic over F_q and message vectors.

A message X_i in F_{q^m} is stored as its coordinate vector in F_q^m, a
plain tuple of ``m`` integers in ``[0, q)``.  Both protocols only ever scale
messages by F_q coefficients and add them, so componentwise arithmetic is
exact and no irreducible polynomial is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

from .errors import DimensionMismatch, FieldMismatch, InversionOfZero

Message = Tuple[int, ...]


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    n = max(n, 2)
    while not is_prime(n):
        n += 1
    return n


@dataclass(frozen=True)
class FieldParams:
    """F_q with messages of ``m`` symbols; ``L = m * log2(q)`` bits each."""

    q: int
    m: int = 1

    def __post_init__(self):
        if not isinstance(self.q, int) or not is_prime(self.q):
            raise ValueError(f"q must be prime, got {self.q!r}")
        if not isinstance(self.m, int) or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m!r}")

    @property
    def message_bits(self) -> float:
        return self.m * math.log2(self.q)

    def element(self, value: int) -> "Fq":
        return Fq(value % self.q, self.q)

    def zero_message(self) -> Message:
        return (0,) * self.m

    def check_message(self, msg: Sequence[int]) -> Message:
        """Validate ``msg`` against this field and return it as a tuple."""
        msg = tuple(msg)
        if len(msg) != self.m:
            raise DimensionMismatch(f"message has {len(msg)} symbols, expected m={self.m}")
        for s in msg:
            if not (isinstance(s, int) and 0 <= s < self.q):
                raise FieldMismatch(f"symbol {s!r} is not an element of F_{self.q}")
        return msg

    def random_message(self, rng) -> Message:
        return tuple(rng.randrange(self.q) for _ in range(self.m))


@dataclass(frozen=True)
class Fq:
    """An element of the prime field F_q."""

    value: int
    q: int

    def __post_init__(self):
        if not 0 <= self.value < self.q:
            raise ValueError(f"{self.value} is not reduced mod {self.q}")

    def _coerce(self, other) -> int:
        if isinstance(other, Fq):
            if other.q != self.q:
                raise FieldMismatch(f"cannot combine F_{self.q} with F_{other.q}")
            return other.value
        if isinstance(other, int):
            return other % self.q
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        return Fq((self.value + b) % self.q, self.q)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        return Fq((self.value - b) % self.q, self.q)

    def __rsub__(self, other):
        b = self._coerce(other)
        return Fq((b - self.value) % self.q, self.q)

    def __mul__(self, other):
        b = self._coerce(other)
        return Fq(self.value * b % self.q, self.q)

    __rmul__ = __mul__

    def __neg__(self):
        return Fq(-self.value % self.q, self.q)

    def __pow__(self, exponent: int):
        return Fq(fpow(self.value, exponent, self.q), self.q)

    def __truediv__(self, other):
        b = self._coerce(other)
        return Fq(self.value * inv(b, self.q) % self.q, self.q)

    def inverse(self) -> "Fq":
        return Fq(inv(self.value, self.q), self.q)

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value


def inv(a: int, q: int) -> int:
    a %= q
    if a == 0:
        raise InversionOfZero(f"0 has no inverse in F_{q}")
    return pow(a, q - 2, q)


def fpow(a: int, e: int, q: int) -> int:
    # Python's pow(0, 0, q) is already 1; omega = 0 depends on that.
    if e < 0:
        raise ValueError("exponent must be non-negative")
    return pow(a % q, e, q)


_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
}


def field_arith(a: Fq, b, op: str) -> Fq:
    """Apply ``op`` in {add, sub, mul, inv, pow} to field elements.

    ``b`` is ignored for ``inv`` and is a non-negative integer exponent for
    ``pow``; otherwise it must be an element of the same field as ``a``.
    """
    if op == "inv":
        return a.inverse()
    if op == "pow":
        return a ** int(b)
    if not isinstance(b, Fq):
        raise TypeError("binary field operations take two Fq operands")
    if a.q != b.q:
        raise FieldMismatch(f"cannot combine F_{a.q} with F_{b.q}")
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown field operation {op!r}") from None
    return fn(a, b)


def message_add(x: Message, y: Message, q: int) -> Message:
    if len(x) != len(y):
        raise DimensionMismatch("messages have different lengths")
    return tuple((a + b) % q for a, b in zip(x, y))


def message_sub(x: Message, y: Message, q: int) -> Message:
    if len(x) != len(y):
        raise DimensionMismatch("messages have different lengths")
    return tuple((a - b) % q for a, b in zip(x, y))


def message_scale(c: int, x: Message, q: int) -> Message:
    c = int(c)
    return tuple(c * a % q for a in x)


def message_combine(coeffs: Sequence, msgs: Sequence[Message], q: int) -> Message:
    """Return sum_j coeffs[j] * msgs[j], computed componentwise over F_q."""
    if len(coeffs) != len(msgs):
        raise DimensionMismatch(f"{len(coeffs)} coefficients for {len(msgs)} messages")
    if not msgs:
        raise DimensionMismatch("cannot combine an empty list of messages")
    m = len(msgs[0])
    acc = [0] * m
    for c, msg in zip(coeffs, msgs):
        if len(msg) != m:
            raise DimensionMismatch("messages have different lengths")
        c = int(c) % q
        if c == 0:
            continue
        for k, s in enumerate(msg):
            acc[k] += c * s
    return tuple(a % q for a in acc)
