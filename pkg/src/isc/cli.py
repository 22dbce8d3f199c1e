"""Command line entry point: ``isc <subcommand> ...``.

Negative rationals must be passed with ``=``, e.g. ``--j=-17/2``.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import pipeline
from .arith import is_prime, parse_rational
from .curves import TraceCache
from .galois import certify_surjective
from .modcurve import GENUS_ZERO, enumerate_integral_j, is_cm
from .reduction import integrality_upgrade, reduction_profile


def _cache_path(flag: str | None) -> str:
    if flag:
        return flag
    return os.environ.get(pipeline.TRACE_CACHE_ENV) or pipeline.DEFAULT_TRACE_CACHE


def cmd_enumerate(args) -> int:
    values = enumerate_integral_j(args.r).values
    if args.format == "json":
        print(json.dumps({"r": args.r, "values": [str(v) for v in values]}))
    else:
        for v in values:
            print(v)
    return pipeline.EXIT_OK


def cmd_certify(args) -> int:
    j = parse_rational(args.j)
    if is_cm(j):
        print(f"error: j={j} is a CM j-invariant; witness certification does not apply", file=sys.stderr)
        return pipeline.EXIT_ERROR
    if args.pmin < 5 or args.pmin > args.pmax:
        print("error: need 5 <= pmin <= pmax", file=sys.stderr)
        return pipeline.EXIT_ERROR
    cache = TraceCache(_cache_path(args.trace_cache))
    primes = [p for p in range(args.pmin, args.pmax + 1) if is_prime(p)]
    results = [certify_surjective(j, p, args.lbound, cache, args.bsgs_threshold) for p in primes]
    cache.flush()
    out = {
        "j": str(j),
        "lbound": str(args.lbound),
        "certified": all(s.complete for s in results),
        "primes": [pipeline.witness_summary(s) for s in results],
    }
    print(json.dumps(out, indent=2))
    return pipeline.EXIT_OK if out["certified"] else pipeline.EXIT_INCONCLUSIVE


def cmd_reduction(args) -> int:
    j = parse_rational(args.j)
    out = {"profile": reduction_profile(j).to_dict(), "p": str(args.p)}
    try:
        out["verdict"] = integrality_upgrade(j, args.p).value
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return pipeline.EXIT_ERROR
    print(json.dumps(out, indent=2))
    return pipeline.EXIT_OK


def cmd_verify(args) -> int:
    try:
        cfg = pipeline.RunConfig(
            p_min=args.pmin,
            p_max=args.pmax,
            ell_bound=args.lbound,
            trace_cache_path=_cache_path(args.trace_cache),
            output_path=args.out,
            output_format=args.format,
            bsgs_threshold=args.bsgs_threshold,
            jobs=args.jobs,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return pipeline.EXIT_ERROR
    try:
        cache = TraceCache(cfg.trace_cache_path)
        report = pipeline.verify_theorem(cfg, cache)
        if cfg.output_path:
            pipeline.write_report(report, cfg)
        else:
            sys.stdout.write(report.to_json() if cfg.output_format == "json" else report.to_csv())
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return pipeline.EXIT_ERROR
    non_cm = [rec for rec in report.candidates if not rec.cm]
    bad = [rec for rec in non_cm if rec.inconclusive_primes]
    print(f"{len(report.candidates)} candidates, {len(report.candidates) - len(non_cm)} CM skipped, "
          f"{len(non_cm) - len(bad)} certified, {len(bad)} inconclusive", file=sys.stderr)
    return report.exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-theorem", help="certify all candidate j for 37 < p <= pmax")
    p.add_argument("--pmin", type=int, default=38)
    p.add_argument("--pmax", type=int, default=500)
    p.add_argument("--lbound", type=int, default=10**4)
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--trace-cache", default=None)
    p.add_argument("--bsgs-threshold", type=int, default=4096)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("enumerate", help="integral j on X0(r) for genus-zero r")
    p.add_argument("--r", type=int, required=True, choices=GENUS_ZERO)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("certify", help="witness scan for one j over a range of p")
    p.add_argument("--j", required=True)
    p.add_argument("--pmin", type=int, default=38)
    p.add_argument("--pmax", type=int, default=500)
    p.add_argument("--lbound", type=int, default=10**4)
    p.add_argument("--trace-cache", default=None)
    p.add_argument("--bsgs-threshold", type=int, default=4096)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("reduction", help="denominator profile and integrality verdict")
    p.add_argument("--j", required=True)
    p.add_argument("--p", type=int, required=True)
    p.set_defaults(func=cmd_reduction)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
