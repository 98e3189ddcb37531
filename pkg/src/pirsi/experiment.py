"""Rate experiments: run the planned protocol on random instances and
compare the measured rate D / (downloaded symbols) with the capacity value."""

from __future__ import annotations

import csv
import io
import itertools
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, Sequence, Tuple

from .capacity import capacity_value, plan
from .gf import FieldParams, next_prime
from .gpc import gpc_params
from . import session

COLUMNS = ["K", "D", "M", "protocol", "q", "symbols", "rate", "capacity", "bound", "match", "decode_ok"]


@dataclass
class ExperimentRow:
    K: int
    D: int
    M: int
    protocol: str
    q: int
    symbols: int
    rate: Fraction
    capacity: Fraction
    bound: str
    match: bool
    decode_ok: bool

    def as_strings(self) -> List[str]:
        return [
            str(self.K), str(self.D), str(self.M), self.protocol, str(self.q), str(self.symbols),
            str(self.rate), str(self.capacity), self.bound,
            "match" if self.match else "MISMATCH", "ok" if self.decode_ok else "FAIL",
        ]


@dataclass
class ExperimentReport:
    rows: List[ExperimentRow]

    @property
    def all_match(self) -> bool:
        return all(r.match and r.decode_ok for r in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow(r.as_strings())
        return buf.getvalue()

    def to_text(self) -> str:
        table = [COLUMNS] + [r.as_strings() for r in self.rows]
        widths = [max(len(row[i]) for row in table) for i in range(len(COLUMNS))]
        return "\n".join("  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in table) + "\n"


def _field_for(K: int, D: int, M: int, protocol: str, q: int, m: int) -> FieldParams:
    need = K if protocol == "GRS" else gpc_params(K, D, M).beta
    return FieldParams(q if q >= need else next_prime(need), m)


def run_experiment(grid: Sequence[Tuple[int, int, int]], q: int = 2, m: int = 1, trials: int = 1, seed: int = 0) -> ExperimentReport:
    """Run every (K, D, M) in ``grid`` ``trials`` times.

    If ``q`` is too small for the planned protocol, the next prime that is
    large enough is used and reported in the ``q`` column.
    """
    rng = random.Random(seed)
    rows = []
    for K, D, M in grid:
        p = plan(K, D, M)
        fp = _field_for(K, D, M, p.protocol, q, m)
        symbols = set()
        ok = True
        for _ in range(trials):
            W = sorted(rng.sample(range(1, K + 1), D))
            S = sorted(rng.sample([i for i in range(1, K + 1) if i not in W], M))
            db = [fp.random_message(rng) for _ in range(K)]
            query = session.build_query(K, D, M, W, S, fp, rng, p.protocol)
            answer = session.compute_answer(query, db)
            symbols.add(len(answer.symbols))
            got = session.decode(query, answer, W, S, {s: db[s - 1] for s in S})
            ok &= got == {w: db[w - 1] for w in W}
        # every trial of a protocol downloads the same amount
        assert len(symbols) == 1
        n = symbols.pop()
        rate = Fraction(D, n)
        cap = capacity_value(K, D, M)
        rows.append(ExperimentRow(K, D, M, p.protocol, fp.q, n, rate, cap.value, cap.kind, rate == cap.value, ok))
    return ExperimentReport(rows)


def load_config(path) -> dict:
    """Read a JSON experiment config.

    ``grid`` is either a list of [K, D, M] triples or an object of K/D/M value
    lists whose valid combinations are taken.
    """
    cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    grid = cfg.get("grid", [])
    if isinstance(grid, dict):
        grid = [
            (K, D, M)
            for K, D, M in itertools.product(grid["K"], grid["D"], grid["M"])
            if D >= 1 and 0 <= M <= K - D
        ]
    cfg["grid"] = [tuple(int(v) for v in t) for t in grid]
    return cfg
