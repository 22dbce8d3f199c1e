"""Run the full verification and print one line per candidate j.

    python scripts/headline_summary.py --pmax 500 --lbound 10000
"""
import argparse
import time

from isc.curves import TraceCache
from isc.pipeline import RunConfig, verify_theorem


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pmax", type=int, default=500)
    ap.add_argument("--lbound", type=int, default=10**4)
    ap.add_argument("--trace-cache", default="traces.txt")
    args = ap.parse_args()

    cfg = RunConfig(p_max=args.pmax, ell_bound=args.lbound, trace_cache_path=args.trace_cache)
    start = time.perf_counter()
    cache = TraceCache(cfg.trace_cache_path)
    report = verify_theorem(cfg, cache)
    elapsed = time.perf_counter() - start

    print(f"{'j':>24}  {'r':<6} {'status':<12} {'max l':>6}  small-p evidence (missing)")
    for rec in report.candidates:
        worst = max((max(ells) for ells in rec.witnessing_ell.values()), default="")
        ev = "; ".join(f"p={p}: {','.join(e['missing']) or '-'}" for p, e in rec.small_p_evidence.items())
        print(f"{str(rec.j):>24}  {','.join(map(str, rec.source_r)):<6} {rec.status:<12} {worst!s:>6}  {ev}")
    print(f"\n{len(report.candidates)} candidates, verified={report.verified}, "
          f"{len(cache)} cached traces, {elapsed:.1f} s")


if __name__ == "__main__":
    main()
