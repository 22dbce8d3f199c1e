"""Curve models from j-invariants, reduction mod l, and Frobenius traces.

The model attached to a generic j is y^2 = x^3 - 3j(j-1728) x - 2j(j-1728)^2.
Every curve over Q with the same j is a quadratic twist of it, and twisting
only flips the sign of a_l, so the witness predicates downstream do not care
which twist we picked.
"""
from __future__ import annotations

import functools
import logging
import math
import os
import random
import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from .arith import FpElem, canonical_j_id, legendre, reduce_rational_mod, sqrt_mod, trial_factor

log = logging.getLogger(__name__)

BSGS_THRESHOLD = 4096
NAIVE_BOUND = 10**4


class SkippedPrime(ValueError):
    pass


class AmbiguousOrder(RuntimeError):
    pass


@dataclass(frozen=True)
class CurveModel:
    j: Fraction
    a: Fraction
    b: Fraction

    def __post_init__(self):
        disc = 4 * self.a**3 + 27 * self.b**2
        if disc == 0:
            raise ValueError("singular model")
        if 1728 * 4 * self.a**3 / disc != self.j:
            raise ValueError("model does not have the stated j-invariant")

    @property
    def j_id(self) -> str:
        return canonical_j_id(self.j)


@dataclass(frozen=True)
class ReducedCurve:
    ell: int
    a: FpElem
    b: FpElem

    def __post_init__(self):
        if self.a.modulus != self.ell or self.b.modulus != self.ell:
            raise ValueError("coefficients live in the wrong field")
        if 4 * self.a**3 + 27 * self.b**2 == 0:
            raise ValueError("singular reduction")

    @classmethod
    def from_ints(cls, a: int, b: int, ell: int) -> "ReducedCurve":
        return cls(ell, FpElem(a, ell), FpElem(b, ell))


@dataclass(frozen=True)
class TraceRecord:
    j_id: str
    ell: int
    a_ell: int

    def __post_init__(self):
        if self.a_ell * self.a_ell > 4 * self.ell:
            raise ValueError(f"Hasse bound violated: {self}")

    def to_line(self) -> str:
        return f"{self.j_id} {self.ell} {self.a_ell}\n"

    @classmethod
    def from_line(cls, line: str) -> "TraceRecord":
        j_id, ell, a = line.split()
        return cls(j_id, int(ell), int(a))


def curve_from_j(j) -> CurveModel:
    j = Fraction(j)
    if j == 0:
        return CurveModel(j, Fraction(0), Fraction(1))
    if j == 1728:
        return CurveModel(j, Fraction(1), Fraction(0))
    k = j - 1728
    return CurveModel(j, -3 * j * k, -2 * j * k * k)


@functools.lru_cache(maxsize=512)
def _skip_primes_for(j: Fraction) -> frozenset[int]:
    n = 6 * j.denominator
    if j.numerator:
        n *= j.numerator
    if (j - 1728).numerator:
        n *= (j - 1728).numerator
    factors, rest = trial_factor(n)
    if rest > 1:
        factors.update(sympy.factorint(rest))
    return frozenset(factors)


def skip_primes(m: CurveModel) -> frozenset[int]:
    """Primes where the generic model may reduce badly or depend on the model.

    These are the primes of 6 * den(j) * num(j) * num(j - 1728); the zero
    factors at j = 0 and j = 1728 are dropped.
    """
    return _skip_primes_for(m.j)


def reduce_curve(m: CurveModel, ell: int) -> ReducedCurve:
    if ell in skip_primes(m):
        raise SkippedPrime("skipped prime")
    return ReducedCurve(ell, reduce_rational_mod(m.a, ell), reduce_rational_mod(m.b, ell))


def count_points_naive(c: ReducedCurve) -> int:
    """#E(F_l) by checking every (x, y); test oracle only."""
    ell = c.ell
    if ell > NAIVE_BOUND:
        raise ValueError("oracle bound exceeded")
    a, b = c.a.residue, c.b.residue
    count = 1
    for x in range(ell):
        rhs = (x * x * x + a * x + b) % ell
        for y in range(ell):
            if (y * y - rhs) % ell == 0:
                count += 1
    return count


@functools.lru_cache(maxsize=4096)
def _legendre_tables(ell: int):
    x = np.arange(ell, dtype=np.int64)
    sq = x * x % ell
    chi = np.full(ell, -1, dtype=np.int64)
    chi[sq] = 1
    chi[0] = 0
    return x, sq * x % ell, chi


def count_points_legendre(c: ReducedCurve) -> int:
    """l + 1 + sum over x of (x^3 + ax + b | l)."""
    ell = c.ell
    if ell == 2:
        raise ValueError("use naive count")
    if ell >= 2**31:
        raise ValueError("modulus too large for the vectorized sum")
    x, x3, chi = _legendre_tables(ell)
    f = (x3 + c.a.residue * x + c.b.residue) % ell
    return ell + 1 + int(chi[f].sum())


# -- group-order computation -------------------------------------------------

def _ec_add(P, Q, a, p):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return x3, (lam * (x1 - x3) - y1) % p


def _ec_mul(n, P, a, p):
    R = None
    while n:
        if n & 1:
            R = _ec_add(R, P, a, p)
        P = _ec_add(P, P, a, p)
        n >>= 1
    return R


def _neg(P, p):
    return None if P is None else (P[0], -P[1] % p)


def _some_multiple(P, lo, hi, a, p):
    """Some N >= lo with N*P = O, searching N in [lo, hi] by baby-step giant-step."""
    m = math.isqrt(hi - lo) + 1
    baby = {}
    R = None
    for j in range(m):
        baby.setdefault(R, j)
        R = _ec_add(R, P, a, p)
    giant = _ec_mul(m, P, a, p)
    R = _ec_mul(lo, P, a, p)
    for i in range(m + 1):
        j = baby.get(_neg(R, p))
        if j is not None:
            return lo + i * m + j
        R = _ec_add(R, giant, a, p)
    raise ArithmeticError("no multiple of P in the Hasse interval")


def _point_order(P, multiple, a, p):
    order = multiple
    for q in trial_factor(multiple)[0]:
        while order % q == 0 and _ec_mul(order // q, P, a, p) is None:
            order //= q
    return order


def count_points_bsgs(c: ReducedCurve, max_points: int = 24, seed: int | None = None) -> int:
    """#E(F_l) from point orders on E and on its quadratic twist.

    Each random x gives a point either on E or, via x -> n*x, on the twist by
    a non-residue n.  A candidate N in the Hasse interval survives if the
    orders seen on E divide N and those seen on the twist divide 2l + 2 - N.
    Raises AmbiguousOrder if several candidates survive ``max_points`` draws.
    """
    p = c.ell
    if p < 5:
        raise ValueError("use naive count")
    a, b = c.a.residue, c.b.residue
    nr = 2
    while legendre(nr, p) != -1:
        nr += 1
    ta = a * nr * nr % p
    w = math.isqrt(4 * p)
    lo, hi = p + 1 - w, p + 1 + w
    rng = random.Random(p * 1_000_003 + a * 7919 + b if seed is None else seed)
    lcm_e = lcm_t = 1
    candidates = list(range(lo, hi + 1))
    for _ in range(max_points):
        x = rng.randrange(p)
        f = (x * x * x + a * x + b) % p
        if f == 0:
            continue
        if legendre(f, p) == 1:
            P = (x, sqrt_mod(f, p))
            n = _point_order(P, _some_multiple(P, lo, hi, a, p), a, p)
            lcm_e = math.lcm(lcm_e, n)
        else:
            g = nr * nr * nr * f % p
            P = (nr * x % p, sqrt_mod(g, p))
            n = _point_order(P, _some_multiple(P, lo, hi, ta, p), ta, p)
            lcm_t = math.lcm(lcm_t, n)
        candidates = [N for N in candidates if N % lcm_e == 0 and (2 * p + 2 - N) % lcm_t == 0]
        if len(candidates) == 1:
            return candidates[0]
    raise AmbiguousOrder(f"ambiguous order over F_{p}: {candidates}")


# -- traces and the persistent cache ------------------------------------------

class TraceCache:
    """Frobenius traces keyed by (j_id, l), mirrored to an append-only file.

    Lines are ``<j_id> <l> <a_l>``.  Reads are served from memory; new records
    accumulate until :meth:`flush` appends them in insertion order.  Writes go
    through one lock, so a cache may be shared by threads.
    """

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = os.fspath(path) if path is not None else None
        self._data: dict[tuple[str, int], int] = {}
        self._pending: list[TraceRecord] = []
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0
        if self.path and os.path.exists(self.path):
            self._load()

    def _load(self):
        with open(self.path) as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    rec = TraceRecord.from_line(line)
                except ValueError as exc:
                    raise ValueError(f"{self.path}:{lineno}: bad trace record") from exc
                self._data[(rec.j_id, rec.ell)] = rec.a_ell

    def check_writable(self):
        """Fail early, before any work, if the cache file cannot be appended to."""
        if self.path:
            with open(self.path, "a"):
                pass

    def __len__(self):
        return len(self._data)

    def __contains__(self, key):
        return key in self._data

    def get(self, j_id: str, ell: int) -> int | None:
        return self._data.get((j_id, ell))

    def put(self, j_id: str, ell: int, a_ell: int):
        rec = TraceRecord(j_id, ell, a_ell)
        with self._lock:
            old = self._data.get((j_id, ell))
            if old is not None:
                if old != a_ell:
                    raise ValueError(f"conflicting traces for {(j_id, ell)}: {old} vs {a_ell}")
                return
            self._data[(j_id, ell)] = a_ell
            self._pending.append(rec)

    def traces_for(self, j_id: str) -> dict[int, int]:
        return {ell: a for (j, ell), a in self._data.items() if j == j_id}

    def seed(self, j_id: str, traces: dict[int, int]):
        """Preload known traces without marking them for writing."""
        with self._lock:
            for ell, a in traces.items():
                self._data[(j_id, ell)] = TraceRecord(j_id, ell, a).a_ell

    def pending(self) -> list[TraceRecord]:
        return list(self._pending)

    def records(self) -> list[TraceRecord]:
        return [TraceRecord(j, ell, a) for (j, ell), a in self._data.items()]

    def flush(self):
        with self._lock:
            if not self._pending:
                return
            if self.path:
                with open(self.path, "a") as fh:
                    fh.writelines(rec.to_line() for rec in self._pending)
            self._pending.clear()


def compute_trace(m: CurveModel, ell: int, bsgs_threshold: int = BSGS_THRESHOLD) -> int:
    c = reduce_curve(m, ell)
    if ell < bsgs_threshold:
        return ell + 1 - count_points_legendre(c)
    try:
        return ell + 1 - count_points_bsgs(c)
    except AmbiguousOrder:
        log.debug("BSGS ambiguous for %s at l=%d, using the Legendre sum", m.j_id, ell)
        return ell + 1 - count_points_legendre(c)


def trace_of_frobenius(m: CurveModel, ell: int, cache: TraceCache | None = None,
                       bsgs_threshold: int = BSGS_THRESHOLD) -> int:
    """a_l = l + 1 - #E(F_l), through the cache when one is given."""
    if ell in skip_primes(m):
        raise SkippedPrime("skipped prime")
    if cache is not None:
        hit = cache.get(m.j_id, ell)
        if hit is not None:
            cache.hits += 1
            return hit
        cache.misses += 1
    a_ell = compute_trace(m, ell, bsgs_threshold)
    if cache is not None:
        cache.put(m.j_id, ell, a_ell)
    elif a_ell * a_ell > 4 * ell:
        raise ArithmeticError(f"Hasse bound violated at l={ell}")
    return a_ell
