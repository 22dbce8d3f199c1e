"""Denominator primes, the non-split Cartan compatibility test, and the
integrality decision for j under a non-split Cartan hypothesis.

The deep inputs (Mazur's isogeny theorem, the Bilu-Parent-Rebolledo
classification, and the result placing j in Z[1/p]) are assumptions of this
module, not computations.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import trial_factor

MAZUR_DEGREES = (2, 3, 5, 7, 11, 13, 17, 37)
GENUS_ZERO_DEGREES = (2, 3, 5, 7, 13)
POSITIVE_GENUS_DEGREES = (11, 17, 37)

SMOOTH_COFACTOR_LIMIT = 10**12


class Verdict(str, enum.Enum):
    INTEGRAL_ALREADY = "IntegralAlready"
    UPGRADED_TO_INTEGRAL = "UpgradedToIntegral"  # kept for the wire format; never produced
    NOT_IN_Z1_OVER_P = "NotInZ1OverP"
    INCOMPATIBLE_WITH_NNS = "IncompatibleWithNns"


@dataclass(frozen=True)
class ReductionProfile:
    j: Fraction
    denominator_primes: frozenset[int] = field(default_factory=frozenset)

    @property
    def is_integral(self) -> bool:
        return not self.denominator_primes

    @property
    def integral_away_from(self) -> int | None:
        if len(self.denominator_primes) == 1:
            return next(iter(self.denominator_primes))
        return None

    def to_dict(self) -> dict:
        return {
            "j": str(self.j),
            "denominator_primes": [str(q) for q in sorted(self.denominator_primes)],
            "is_integral": self.is_integral,
            "integral_away_from": None if self.integral_away_from is None else str(self.integral_away_from),
        }


def mazur_isogeny_degrees() -> list[int]:
    return list(MAZUR_DEGREES)


def denominator_primes(j) -> frozenset[int]:
    """Primes of potentially multiplicative reduction, i.e. those dividing den(j)."""
    den = Fraction(j).denominator
    if den == 1:
        return frozenset()
    factors, rest = trial_factor(den)
    if rest > SMOOTH_COFACTOR_LIMIT:
        raise ValueError("denominator not smooth")
    if rest > 1:
        factors[rest] = 1
    return frozenset(factors)


def reduction_profile(j) -> ReductionProfile:
    j = Fraction(j)
    return ReductionProfile(j, denominator_primes(j))


def _check_p(p: int):
    if p < 5:
        raise ValueError("criterion requires p >= 5")


def ns_compatible(ell: int, p: int) -> bool:
    """Can potentially multiplicative reduction at ell coexist with mod-p image
    inside the normaliser of a non-split Cartan?

    For ell != p this happens only when ell = +-1 mod p; for ell = p never.
    """
    _check_p(p)
    if ell == p:
        return False
    return ell % p in (1, p - 1)


def integrality_upgrade(j, p: int) -> Verdict:
    _check_p(p)
    if p in GENUS_ZERO_DEGREES:
        raise ValueError(f"p={p} lies in the genus-zero isogeny degrees")
    primes = denominator_primes(j)
    if not primes:
        return Verdict.INTEGRAL_ALREADY
    # any denominator prime outside +-1 mod p (p itself included) contradicts
    # potentially good reduction there
    if any(not ns_compatible(ell, p) for ell in primes):
        return Verdict.INCOMPATIBLE_WITH_NNS
    return Verdict.NOT_IN_Z1_OVER_P
