"""Missing witness types for every non-CM candidate at each prime 5 <= p <= 37.

A missing type is one-sided evidence of a non-surjective image at that p.
The table shows which primes stay unexcluded, i.e. a lower bound for the
largest non-surjective prime of each j.

    python scripts/small_p_evidence.py --lbound 3000
"""
import argparse

from isc.arith import primes_up_to
from isc.curves import TraceCache
from isc.galois import evidence_profile
from isc.pipeline import collect_candidate_j
from isc.modcurve import is_cm

ap = argparse.ArgumentParser()
ap.add_argument("--lbound", type=int, default=3000)
ap.add_argument("--trace-cache", default="traces.txt")
args = ap.parse_args()

cache = TraceCache(args.trace_cache)
small = [p for p in primes_up_to(37) if p >= 5]
for j, sources in collect_candidate_j():
    if is_cm(j):
        continue
    flagged = []
    for p in small:
        state = evidence_profile(j, p, args.lbound, cache)
        if not state.complete:
            flagged.append(f"{p}:{'/'.join(w.value[:-2] for w in state.missing())}")
    print(f"{str(j):>24}  r={','.join(map(str, sources)):<6} {' '.join(flagged) or '(all certified)'}")
cache.flush()
