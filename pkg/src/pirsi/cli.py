"""Command-line entry point (``pirsi``)."""

from __future__ import annotations

import argparse
import json
import logging
import math
import random
import sys
from pathlib import Path

from .capacity import capacity_value, plan
from .dbfile import read_database
from .errors import PirSiError
from .gf import FieldParams, next_prime
from .gpc import GpcQuery, gpc_params
from . import experiment, net, privacy, session, wire


def _indices(text: str):
    if not text:
        return []
    return sorted(int(v) for v in text.replace(" ", "").split(",") if v)


def _read_input(path):
    if path in (None, "-"):
        return sys.stdin.buffer.read()
    return Path(path).read_bytes()


def _default_q(K, D, M, protocol):
    need = K if protocol == "GRS" else gpc_params(K, D, M).beta
    return next_prime(need)


def cmd_capacity(args):
    cap = capacity_value(args.K, args.D, args.M)
    print(f"{cap.kind} {cap.value}")


def cmd_plan(args):
    p = plan(args.K, args.D, args.M)
    print(f"{p.protocol} {p.download_symbols} {p.rate}")


def cmd_query(args):
    K, D, M = args.K, args.D, args.M
    protocol = (args.protocol or plan(K, D, M).protocol).upper()
    q = args.q or _default_q(K, D, M, protocol)
    fp = FieldParams(q, args.m)
    query = session.build_query(K, D, M, _indices(args.demand), _indices(args.side), fp, random.Random(args.seed), protocol)
    sys.stdout.buffer.write(wire.encode_query(query))


def cmd_answer(args):
    fp, db = read_database(args.db)
    sys.stdout.buffer.write(net.handle_frame(_read_input(args.query), fp, db))


def _side_values(args, S):
    if args.side_db:
        _, db = read_database(args.side_db)
        return {s: db[s - 1] for s in S}
    raw = json.loads(args.side_values or "{}")
    return {int(k): tuple(v) for k, v in raw.items()}


def cmd_decode(args):
    query = wire.decode_query(_read_input(args.query))
    answer = wire.decode_answer(Path(args.answer).read_bytes(), query)
    W, S = _indices(args.demand), _indices(args.side)
    X_S = _side_values(args, S)
    got = session.decode(query, answer, W, S, X_S)
    print(json.dumps({str(k): list(v) for k, v in sorted(got.items())}, separators=(",", ":")))


def cmd_serve(args):
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    net.serve(args.db, args.address)


def cmd_fetch(args):
    query = wire.decode_query(_read_input(args.query))
    answer = net.fetch(args.address, query)
    sys.stdout.buffer.write(wire.encode_answer(answer))


def cmd_privacy_check(args):
    K, D, M = args.K, args.D, args.M
    if D > M:
        print(f"D > M: GRS query is identical for all (W, S); posterior is 1/{math.comb(K, D)} for every W")
        return 0
    params = gpc_params(K, D, M)
    fp = FieldParams(args.q or next_prime(params.beta))
    if args.montecarlo:
        rep = privacy.montecarlo_posterior(K, D, M, fp, args.montecarlo, seed=args.seed)
        print(f"samples={rep.samples} categories={rep.categories} chi2={rep.chi2:.3f} p={rep.p_value:.4f}")
        print("uniform" if rep.looks_uniform() else "NON-UNIFORM")
        return 0 if rep.looks_uniform() else 1
    dist = privacy.enumerate_distribution(K, D, M, fp, bound=args.bound)
    uniform = privacy.is_w_private(dist)
    print(f"queries={len(dist.total)} (expected {privacy.num_partitions(params)})  "
          f"P(Q)={privacy.closed_form_p_q(params)}  posterior uniform={uniform}")
    return 0 if uniform else 1


def cmd_audit(args):
    query = wire.decode_query(_read_input(args.query))
    mat = privacy.linearize(query)
    if args.answer:
        symbols = wire.decode_answer_symbols(Path(args.answer).read_bytes())
        if len(symbols) != mat.rows:
            print(f"answer has {len(symbols)} symbols but the query implies {mat.rows}")
            return 1
    D = args.demand_size or (query.rowsi if isinstance(query, GpcQuery) else 1)
    M = args.side_size if args.side_size is not None else getattr(query, "M", None)
    if M is None:
        print("--side-size is required for GPC queries")
        return 2
    rep = privacy.audit_necessary_condition(mat, D, M)
    print(f"necessary condition: {'PASS' if rep.passed else 'FAIL'} "
          f"({len(rep.witnesses) - len(rep.failures)}/{len(rep.witnesses)} demand sets covered)")
    for w in rep.failures:
        print(f"  no side-information set decodes W*={list(w)}")
    status = 0 if rep.passed else 1
    if args.side:
        S = _indices(args.side)
        full = privacy.audit_full_recovery(mat, S)
        print(f"full recovery from S={S}: {full}")
    return status


def cmd_bench(args):
    cfg = experiment.load_config(args.config)
    rep = experiment.run_experiment(
        cfg["grid"], q=cfg.get("q", 2), m=cfg.get("m", 1), trials=cfg.get("trials", 1), seed=args.seed if args.seed is not None else cfg.get("seed", 0),
    )
    sys.stdout.write(rep.to_text())
    if args.csv:
        Path(args.csv).write_text(rep.to_csv(), encoding="utf-8")
    return 0 if rep.all_match else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pirsi", description="Single-server PIR with side information.")
    sub = p.add_subparsers(dest="command", required=True)

    def kdm(sp):
        sp.add_argument("K", type=int)
        sp.add_argument("D", type=int)
        sp.add_argument("M", type=int)

    sp = sub.add_parser("capacity", help="capacity (D>M) or its lower bound (D<=M)")
    kdm(sp)
    sp.set_defaults(func=cmd_capacity)

    sp = sub.add_parser("plan", help="protocol with the smaller download")
    kdm(sp)
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("query", help="emit a wire query for demand W and side information S")
    kdm(sp)
    sp.add_argument("--demand", "-W", required=True, help="comma-separated demand indices")
    sp.add_argument("--side", "-S", default="", help="comma-separated side-information indices")
    sp.add_argument("--q", type=int)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--protocol", choices=["grs", "gpc", "GRS", "GPC"])
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_query)

    sp = sub.add_parser("answer", help="answer a query (stdin) against a database file")
    sp.add_argument("db")
    sp.add_argument("--query", default="-")
    sp.set_defaults(func=cmd_answer)

    sp = sub.add_parser("decode", help="decode X_W from a query and answer")
    sp.add_argument("--query", required=True)
    sp.add_argument("--answer", required=True)
    sp.add_argument("--demand", "-W", required=True)
    sp.add_argument("--side", "-S", default="")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--side-values", help='JSON object, e.g. {"5":[3],"8":[1]}')
    g.add_argument("--side-db", help="database file to take X_S from")
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("serve", help="serve a database over TCP")
    sp.add_argument("db")
    sp.add_argument("address", help="host:port")
    sp.set_defaults(func=cmd_serve)

    sp = sub.add_parser("fetch", help="send a query (stdin) to a server and print the answer")
    sp.add_argument("address")
    sp.add_argument("--query", default="-")
    sp.set_defaults(func=cmd_fetch)

    sp = sub.add_parser("privacy-check", help="verify the demand posterior is uniform")
    kdm(sp)
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exhaustive enumeration (default)")
    mode.add_argument("--montecarlo", type=int, metavar="N", help="N seeded samples with a chi-square test")
    sp.add_argument("--q", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--bound", type=int, default=privacy.DEFAULT_ENUMERATION_BOUND)
    sp.set_defaults(func=cmd_privacy_check)

    sp = sub.add_parser("audit", help="span audits on the answer map implied by a query")
    sp.add_argument("--query", default="-")
    sp.add_argument("--answer")
    sp.add_argument("--demand-size", "-D", type=int)
    sp.add_argument("--side-size", "-M", type=int)
    sp.add_argument("--side", "-S", help="actual side information, for the full-recovery check")
    sp.set_defaults(func=cmd_audit)

    sp = sub.add_parser("bench", help="run a rate experiment from a JSON config")
    sp.add_argument("config")
    sp.add_argument("--csv")
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except (PirSiError, ValueError, OSError) as exc:
        print(f"pirsi: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
