"""Genus-zero j-maps on X0(r), integral j enumeration, and fixed j-tables."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

GENUS_ZERO = (2, 3, 5, 7, 13)

# Factored forms of f(t), with j = f(t)/t. Each entry is a list of
# (coefficients low -> high, exponent).
_FACTORED = {
    2: [([16, 1], 3)],
    3: [([27, 1], 1), ([3, 1], 3)],
    5: [([5, 10, 1], 3)],
    7: [([1, 5, 1], 3), ([49, 13, 1], 1)],
    13: [([1, 19, 20, 7, 1], 3), ([13, 5, 1], 1)],
}

CM_J_INVARIANTS = (
    0, 1728, -3375, 8000, 54000, 287496, -32768, 16581375, -884736,
    -12288000, -884736000, -147197952000, -262537412640768000,
)
_CM_SET = frozenset(Fraction(j) for j in CM_J_INVARIANTS)

# Rational points of the positive-genus curves X0(11), X0(17), X0(37),
# taken from Cremona's tables.
KNOWN_SETS = {
    11: (Fraction(-11 * 131**3), Fraction(-(2**15)), Fraction(-(11**2))),
    17: (Fraction(-(17**2) * 101**3, 2), Fraction(-17 * 373**3, 2**17)),
    37: (Fraction(-7 * 137**3 * 2083**3), Fraction(-7 * 11**3)),
}


def _polymul(f, g):
    out = [0] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        if x:
            for k, y in enumerate(g):
                out[i + k] += x * y
    return out


def _expand(factors):
    out = [1]
    for coeffs, e in factors:
        for _ in range(e):
            out = _polymul(out, coeffs)
    return tuple(out)


@dataclass(frozen=True)
class JMapPoly:
    r: int
    coeffs: tuple[int, ...]  # low -> high

    def __post_init__(self):
        if self.coeffs[-1] != 1:
            raise ValueError("f must be monic")
        if len(self.coeffs) != self.r + 2:
            raise ValueError("f must have degree r + 1")
        if self.coeffs[0] == 0:
            raise ValueError("f must have non-zero constant term")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def constant_term(self) -> int:
        return self.coeffs[0]

    def __call__(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc


_POLYS = {r: JMapPoly(r, _expand(fac)) for r, fac in _FACTORED.items()}


@dataclass(frozen=True)
class IntegralJSet:
    r: int
    values: tuple[int, ...]

    def __post_init__(self):
        if list(self.values) != sorted(set(self.values)):
            raise ValueError("values must be sorted and distinct")


def f_poly(r: int) -> JMapPoly:
    try:
        return _POLYS[r]
    except KeyError:
        raise ValueError(f"no genus-zero j-map for r={r}") from None


def j_map(r: int, t) -> Fraction:
    t = Fraction(t)
    if t == 0:
        raise ValueError("cusp")
    return Fraction(f_poly(r)(t)) / t


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def integral_t_candidates(r: int) -> list[int]:
    """Every integer t, of either sign, dividing f(0)."""
    pos = _divisors(f_poly(r).constant_term)
    return sorted([-d for d in pos] + pos)


def enumerate_integral_j(r: int) -> IntegralJSet:
    f = f_poly(r)
    values = set()
    for t in integral_t_candidates(r):
        q, rem = divmod(f(t), t)
        assert rem == 0, (r, t)
        values.add(q)
    return IntegralJSet(r, tuple(sorted(values)))


def collisions(r: int) -> dict[int, list[int]]:
    """j-values hit by more than one candidate t, mapped to those t."""
    f = f_poly(r)
    seen: dict[int, list[int]] = {}
    for t in integral_t_candidates(r):
        seen.setdefault(f(t) // t, []).append(t)
    return {j: ts for j, ts in seen.items() if len(ts) > 1}


def known_sets() -> dict[int, list[Fraction]]:
    return {r: list(vals) for r, vals in KNOWN_SETS.items()}


def is_cm(j) -> bool:
    return Fraction(j) in _CM_SET
