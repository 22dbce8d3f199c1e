"""Frobenius-trace witnesses that the mod-p image is all of GL2(F_p).

A proper subgroup of GL2(F_p) with surjective determinant sits inside a
Borel, the normaliser of a split Cartan (N_sp), the normaliser of a non-split
Cartan (N_ns), or a group with projective image A4, S4 or A5.  One Frobenius
element of each of the following kinds rules out every class:

* SplitEv: t != 0 and t^2 - 4d a non-zero square.  Not in any N_ns.
* NonsplitEv: t != 0 and t^2 - 4d a non-square.  Not in any Borel or N_sp.
* ExceptionalEv: u = t^2/d avoids {0, 1, 2, 4} and the roots of u^2 - 3u + 1,
  so its projective order exceeds 5.

The determinant of the global image is the cyclotomic character, which is
onto, so all three together certify surjectivity.  Not finding them proves
nothing.  The criteria are checked against brute-force subgroup enumeration
at p = 5 and 7 by :func:`verify_witness_lemma`.
"""
from __future__ import annotations

import enum
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import FpElem, legendre, primes_up_to
from .curves import BSGS_THRESHOLD, TraceCache, curve_from_j, skip_primes, trace_of_frobenius
from .modcurve import is_cm

log = logging.getLogger(__name__)


class Witness(str, enum.Enum):
    SPLIT = "SplitEv"
    NONSPLIT = "NonsplitEv"
    EXCEPTIONAL = "ExceptionalEv"


ALL_WITNESSES = (Witness.SPLIT, Witness.NONSPLIT, Witness.EXCEPTIONAL)
_BIT = {Witness.SPLIT: 1, Witness.NONSPLIT: 2, Witness.EXCEPTIONAL: 4}


def witness_bits(t: int, d: int, p: int) -> int:
    """Bitmask form of :func:`classify_witness` on bare residues."""
    t %= p
    d %= p
    bits = 0
    if t:
        chi = legendre(t * t - 4 * d, p)
        if chi == 1:
            bits |= 1
        elif chi == -1:
            bits |= 2
    u = t * t * pow(d, -1, p) % p
    if u not in (0, 1, 2, 4) and (u * u - 3 * u + 1) % p:
        bits |= 4
    return bits


def classify_witness(t: FpElem, d: FpElem) -> frozenset[Witness]:
    p = t.modulus
    if d.modulus != p:
        raise ValueError("modulus mismatch")
    if p < 5:
        raise ValueError("p too small for witness criteria")
    if d.residue == 0:
        raise ValueError("degenerate determinant")
    bits = witness_bits(t.residue, d.residue, p)
    return frozenset(w for w in ALL_WITNESSES if bits & _BIT[w])


@dataclass
class WitnessState:
    p: int
    found_split_ev: int | None = None
    found_nonsplit_ev: int | None = None
    found_exceptional_ev: int | None = None
    scanned_bound: int = 0

    @property
    def complete(self) -> bool:
        return None not in (self.found_split_ev, self.found_nonsplit_ev, self.found_exceptional_ev)

    def witnesses(self) -> dict[Witness, int | None]:
        return {
            Witness.SPLIT: self.found_split_ev,
            Witness.NONSPLIT: self.found_nonsplit_ev,
            Witness.EXCEPTIONAL: self.found_exceptional_ev,
        }

    def missing(self) -> list[Witness]:
        return [w for w, ell in self.witnesses().items() if ell is None]

    def record(self, ell: int, bits: int):
        if bits & 1 and self.found_split_ev is None:
            self.found_split_ev = ell
        if bits & 2 and self.found_nonsplit_ev is None:
            self.found_nonsplit_ev = ell
        if bits & 4 and self.found_exceptional_ev is None:
            self.found_exceptional_ev = ell


def _scan(j, p: int, ell_bound: int, cache: TraceCache | None, bsgs_threshold: int) -> WitnessState:
    if p < 5:
        raise ValueError("p too small for witness criteria")
    m = curve_from_j(j)
    skip = skip_primes(m)
    state = WitnessState(p)
    for ell in primes_up_to(ell_bound):
        if ell == p or ell in skip:
            continue
        a_ell = trace_of_frobenius(m, ell, cache, bsgs_threshold)
        state.record(ell, witness_bits(a_ell, ell, p))
        state.scanned_bound = ell
        if state.complete:
            return state
    state.scanned_bound = ell_bound
    return state


def certify_surjective(j, p: int, ell_bound: int = 10**4, cache: TraceCache | None = None,
                       bsgs_threshold: int = BSGS_THRESHOLD) -> WitnessState:
    """Scan l = 2, 3, 5, ... <= ell_bound for the three witnesses at p.

    If the returned state is ``complete`` it certifies that the mod-p image is
    GL2(F_p) for every curve over Q with this j.  Otherwise the scan was
    inconclusive and the state lists what was found.
    """
    if is_cm(Fraction(j)):
        raise ValueError("CM j-invariant; witness certification does not apply")
    return _scan(j, p, ell_bound, cache, bsgs_threshold)


def evidence_profile(j, p: int, ell_bound: int = 10**4, cache: TraceCache | None = None,
                     bsgs_threshold: int = BSGS_THRESHOLD) -> WitnessState:
    """Same scan as :func:`certify_surjective`, read as a diagnostic.

    A witness type still missing after a long scan is one-sided evidence that
    the image lies in the corresponding maximal subgroup (e.g. no NonsplitEv
    suggests a Borel or N_sp image).
    """
    return _scan(j, p, ell_bound, cache, bsgs_threshold)


# -- brute-force oracle over GL2(F_p) -----------------------------------------

ORACLE_PRIMES = (5, 7)

Matrix = tuple[tuple[int, int], tuple[int, int]]


class _GL2:
    """GL2(F_p) as indices 0..n-1 with a full multiplication table."""

    def __init__(self, p: int):
        if p not in ORACLE_PRIMES:
            raise ValueError(f"oracle only runs for p in {ORACLE_PRIMES}")
        self.p = p
        elems = [m for m in itertools.product(range(p), repeat=4) if (m[0] * m[3] - m[1] * m[2]) % p]
        self.n = len(elems)
        E = np.array(elems, dtype=np.int64)
        self.elems = E
        code = ((E[:, 0] * p + E[:, 1]) * p + E[:, 2]) * p + E[:, 3]
        lookup = np.full(p**4, -1, dtype=np.int64)
        lookup[code] = np.arange(self.n)
        self.lookup = lookup
        a, b, c, d = (E[:, i][:, None] for i in range(4))
        a2, b2, c2, d2 = (E[:, i][None, :] for i in range(4))
        prod = (((a * a2 + b * c2) % p * p + (a * b2 + b * d2) % p) * p
                + (c * a2 + d * c2) % p) * p + (c * b2 + d * d2) % p
        self.table = lookup[prod]
        self.identity = int(lookup[((1 * p + 0) * p + 0) * p + 1])
        self.inverse = np.argmax(self.table == self.identity, axis=1)
        self.det = (E[:, 0] * E[:, 3] - E[:, 1] * E[:, 2]) % p
        self.trace = (E[:, 0] + E[:, 3]) % p
        self.bits = np.array([witness_bits(int(t), int(dt), p) for t, dt in zip(self.trace, self.det)])

    def index(self, m: Matrix) -> int:
        p = self.p
        (a, b), (c, d) = m
        i = int(self.lookup[((a % p * p + b % p) * p + c % p) * p + d % p])
        if i < 0:
            raise ValueError(f"{m} is not invertible mod {p}")
        return i

    def matrix(self, i: int) -> Matrix:
        a, b, c, d = (int(x) for x in self.elems[i])
        return ((a, b), (c, d))

    def closure(self, gens, stop_above: int | None = None) -> np.ndarray | None:
        """Membership mask of <gens>; None once it exceeds ``stop_above`` elements."""
        member = np.zeros(self.n, dtype=bool)
        member[self.identity] = True
        frontier = np.array([self.identity])
        gens = np.asarray(list(gens), dtype=np.int64)
        count = 1
        while frontier.size and gens.size:
            nxt = np.unique(self.table[np.ix_(frontier, gens)])
            nxt = nxt[~member[nxt]]
            member[nxt] = True
            count += nxt.size
            if stop_above is not None and count > stop_above:
                return None
            frontier = nxt
        return member

    def class_representatives(self) -> list[int]:
        seen = np.zeros(self.n, dtype=bool)
        reps = []
        xs = np.arange(self.n)
        for g in range(self.n):
            if seen[g]:
                continue
            reps.append(g)
            seen[self.table[self.table[xs, g], self.inverse]] = True
        return reps


_GROUPS: dict[int, _GL2] = {}


def _group(p: int) -> _GL2:
    if p not in _GROUPS:
        _GROUPS[p] = _GL2(p)
    return _GROUPS[p]


def subgroup_closure(gens, p: int) -> frozenset[Matrix]:
    """Subgroup of GL2(F_p) generated by ``gens`` (2x2 integer matrices)."""
    G = _group(p)
    member = G.closure([G.index(g) for g in gens])
    return frozenset(G.matrix(int(i)) for i in np.flatnonzero(member))


def witness_types_in(elements, p: int) -> frozenset[Witness]:
    """Witness kinds realised by some element of the given set of matrices."""
    found = set()
    for (a, b), (c, d) in elements:
        det = (a * d - b * c) % p
        found |= classify_witness(FpElem(a + d, p), FpElem(det, p))
    return frozenset(found)


def borel_subgroup(p: int) -> frozenset[Matrix]:
    return frozenset(((a, b), (0, d)) for a in range(1, p) for b in range(p) for d in range(1, p))


def _nonresidue(p: int) -> int:
    return next(x for x in range(2, p) if legendre(x, p) == -1)


def split_cartan_normaliser(p: int) -> frozenset[Matrix]:
    diag = {((a, 0), (0, d)) for a in range(1, p) for d in range(1, p)}
    anti = {((0, b), (c, 0)) for b in range(1, p) for c in range(1, p)}
    return frozenset(diag | anti)


def nonsplit_cartan_normaliser(p: int) -> frozenset[Matrix]:
    """F_{p^2}^x acting on the basis (1, sqrt(n)), plus Frobenius conjugation."""
    n = _nonresidue(p)
    cartan = {((a, n * b % p), (b, a)) for a in range(p) for b in range(p) if (a * a - n * b * b) % p}
    conj = {((a, -n * b % p), (b, -a % p)) for (a, _), (b, _) in cartan}
    return frozenset(cartan | conj)


@dataclass
class SubgroupOracleResult:
    p: int
    subgroups_tested: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return not self.counterexamples


def verify_witness_lemma(p: int, required: frozenset[Witness] | None = None) -> SubgroupOracleResult:
    """Check that no proper subgroup with full determinant carries all three
    witness kinds.

    Subgroups are the closures of one- and two-element generating sets.  Since
    the witness kinds and the determinant are conjugation invariant, the first
    generator runs over conjugacy-class representatives only, and a second
    generator is skipped when it lies in a double coset <g> h^+-1 <g> already
    tried.

    ``required`` narrows the set of witness kinds a subgroup must carry to be
    flagged; the default is all three.  Weaker sets are negative controls.
    """
    G = _group(p)
    need = sum(_BIT[w] for w in (ALL_WITNESSES if required is None else required))
    full_det = p - 1
    seen: set[bytes] = set()
    result = SubgroupOracleResult(p)

    def check(member, gens):
        key = np.packbits(member).tobytes()
        if key in seen:
            return
        seen.add(key)
        size = int(member.sum())
        if size == G.n:
            return
        if np.unique(G.det[member]).size != full_det:
            return
        if np.bitwise_or.reduce(G.bits[member]) & need == need:
            result.counterexamples.append(
                {"generators": [G.matrix(g) for g in gens], "order": size})

    full_groups = 0
    for g in range(G.n):
        check(G.closure([g]), [g])
    for g in G.class_representatives():
        cyc = np.flatnonzero(G.closure([g]))
        covered = np.zeros(G.n, dtype=bool)
        covered[cyc] = True
        for h in range(G.n):
            if covered[h]:
                continue
            left = G.table[cyc, h]
            for hh in (left, G.inverse[left]):
                covered[G.table[np.ix_(hh, cyc)].ravel()] = True
                covered[G.table[np.ix_(cyc, hh)].ravel()] = True
            member = G.closure([g, h], stop_above=G.n // 2)
            if member is None:
                full_groups += 1
                continue
            check(member, [g, h])
    result.subgroups_tested = len(seen) + (1 if full_groups else 0)
    log.info("p=%d: %d distinct subgroups, %d counterexamples", p, result.subgroups_tested,
             len(result.counterexamples))
    return result
