"""Brute-force check of the witness criteria over GL2(F_5) and GL2(F_7),
including the weakened criteria that should fail."""
import itertools
import time

from isc.galois import ALL_WITNESSES, verify_witness_lemma

for p in (5, 7):
    start = time.perf_counter()
    full = verify_witness_lemma(p)
    print(f"p={p}: {full.subgroups_tested} subgroups, {len(full.counterexamples)} counterexamples "
          f"({time.perf_counter() - start:.1f} s)")
    for pair in itertools.combinations(ALL_WITNESSES, 2):
        weak = verify_witness_lemma(p, frozenset(pair))
        orders = sorted({c["order"] for c in weak.counterexamples})
        print(f"    only {'+'.join(w.value for w in pair):<26} -> {len(weak.counterexamples):4d} "
              f"counterexamples, orders {orders}")
