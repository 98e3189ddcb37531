"""Exact linear algebra over F_q: Vandermonde matrices, elimination, spans.

Column indices in this module are 0-based.  Protocol code works with 1-based
message indices and converts at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

from .errors import DimensionMismatch, DuplicateEvaluationPoints, FieldMismatch, SingularSystem
from .gf import Message, fpow, inv, message_combine


@dataclass(frozen=True)
class MatrixFq:
    """Dense ``rows x cols`` matrix over F_q, entries stored row-major."""

    q: int
    rows: int
    cols: int
    entries: Tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionMismatch("matrix dimensions must be non-negative")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatch(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix"
            )

    @classmethod
    def from_rows(cls, q: int, rows: Sequence[Sequence[int]], cols: int | None = None) -> "MatrixFq":
        rows = [tuple(int(v) % q for v in r) for r in rows]
        if cols is None:
            if not rows:
                raise DimensionMismatch("cols must be given for a matrix with no rows")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise DimensionMismatch("ragged rows")
        return cls(q, len(rows), cols, tuple(v for r in rows for v in r))

    @classmethod
    def identity(cls, q: int, n: int) -> "MatrixFq":
        return cls.from_rows(q, [[int(i == j) for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def zeros(cls, q: int, rows: int, cols: int) -> "MatrixFq":
        return cls(q, rows, cols, (0,) * (rows * cols))

    def entry(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> List[List[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def select_columns(self, cols: Sequence[int]) -> "MatrixFq":
        return MatrixFq.from_rows(self.q, [[self.entry(i, j) for j in cols] for i in range(self.rows)], cols=len(cols))

    def select_rows(self, rows: Sequence[int]) -> "MatrixFq":
        return MatrixFq.from_rows(self.q, [self.row(i) for i in rows], cols=self.cols)

    def stack(self, other: "MatrixFq") -> "MatrixFq":
        if other.q != self.q:
            raise FieldMismatch("cannot stack matrices over different fields")
        if other.cols != self.cols:
            raise DimensionMismatch("column counts differ")
        return MatrixFq(self.q, self.rows + other.rows, self.cols, self.entries + other.entries)

    def apply(self, msgs: Sequence[Message]) -> List[Message]:
        """Return ``self @ msgs`` where each message is one column vector over F_q^m."""
        if len(msgs) != self.cols:
            raise DimensionMismatch(f"matrix has {self.cols} columns, got {len(msgs)} messages")
        return [message_combine(self.row(i), msgs, self.q) for i in range(self.rows)]


def vandermonde(omegas: Sequence[int], num_rows: int, q: int) -> MatrixFq:
    """Matrix with entry (i, j) = omegas[j] ** i for i < num_rows (row 0 all ones)."""
    omegas = [int(w) % q for w in omegas]
    if len(set(omegas)) != len(omegas):
        raise DuplicateEvaluationPoints(f"evaluation points are not distinct mod {q}: {omegas}")
    if not 1 <= num_rows <= len(omegas):
        raise DimensionMismatch(f"num_rows={num_rows} outside [1, {len(omegas)}]")
    return MatrixFq.from_rows(q, [[fpow(w, i, q) for w in omegas] for i in range(num_rows)], cols=len(omegas))


def _echelon(rows: List[List[int]], ncols: int, q: int) -> List[Tuple[int, List[int]]]:
    """Reduced row echelon form as a list of (pivot column, normalized row)."""
    basis: List[Tuple[int, List[int]]] = []
    for r in rows:
        r = _reduce(list(r), basis, q)
        pivot = next((j for j in range(ncols) if r[j]), None)
        if pivot is None:
            continue
        s = inv(r[pivot], q)
        r = [v * s % q for v in r]
        # keep the basis fully reduced so membership is a single pass
        for k, (p, b) in enumerate(basis):
            if b[pivot]:
                c = b[pivot]
                basis[k] = (p, [(x - c * y) % q for x, y in zip(b, r)])
        basis.append((pivot, r))
    return basis


def _reduce(vec: List[int], basis: Iterable[Tuple[int, List[int]]], q: int) -> List[int]:
    for p, b in basis:
        c = vec[p]
        if c:
            vec = [(x - c * y) % q for x, y in zip(vec, b)]
    return vec


def rank(mat: MatrixFq) -> int:
    return len(_echelon(mat.to_rows(), mat.cols, mat.q))


def solve_square(mat: MatrixFq, rhs: Sequence[Message]) -> List[Message]:
    """Solve ``mat @ x = rhs`` for messages x by Gauss-Jordan elimination over F_q."""
    n = mat.rows
    if mat.cols != n:
        raise DimensionMismatch(f"matrix is {mat.rows}x{mat.cols}, not square")
    if len(rhs) != n:
        raise DimensionMismatch(f"{len(rhs)} right-hand sides for {n} equations")
    q = mat.q
    if n == 0:
        return []
    m = len(rhs[0])
    if any(len(b) != m for b in rhs):
        raise DimensionMismatch("right-hand side messages have different lengths")
    # augmented rows [A | b]; the m message coordinates ride along as extra columns
    aug = [list(mat.row(i)) + [v % q for v in rhs[i]] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise SingularSystem(f"matrix is singular over F_{q} (no pivot in column {col})")
        aug[col], aug[piv] = aug[piv], aug[col]
        s = inv(aug[col][col], q)
        aug[col] = [v * s % q for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                c = aug[r][col]
                aug[r] = [(x - c * y) % q for x, y in zip(aug[r], aug[col])]
    return [tuple(aug[i][n:]) for i in range(n)]


def _check_indices(indices, ncols: int):
    for j in indices:
        if not (isinstance(j, int) and 0 <= j < ncols):
            raise DimensionMismatch(f"column index {j!r} outside [0, {ncols})")


def units_in_span(mat: MatrixFq, known, targets) -> bool:
    """True iff every e_j (j in targets) lies in rowspace(mat) + span{e_i : i in known}."""
    known, targets = set(known), set(targets)
    _check_indices(known, mat.cols)
    _check_indices(targets, mat.cols)
    todo = targets - known
    if not todo:
        return True
    rows = mat.to_rows()
    rows.extend([int(j == i) for j in range(mat.cols)] for i in sorted(known))
    basis = _echelon(rows, mat.cols, mat.q)
    for t in sorted(todo):
        unit = [int(j == t) for j in range(mat.cols)]
        if any(_reduce(unit, basis, mat.q)):
            return False
    return True
