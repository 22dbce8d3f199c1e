"""Exact rational arithmetic and prime-field primitives.

Rationals are ``fractions.Fraction`` (always in lowest terms with a positive
denominator).  Prime-field residues are wrapped in :class:`FpElem` at API
boundaries; hot loops work on bare ``int`` residues.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

BigRational = Fraction


@dataclass(frozen=True)
class FpElem:
    residue: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError(f"bad modulus {self.modulus}")
        object.__setattr__(self, "residue", self.residue % self.modulus)

    def __int__(self):
        return self.residue

    def __bool__(self):
        return self.residue != 0

    def _coerce(self, other):
        if isinstance(other, FpElem):
            if other.modulus != self.modulus:
                raise ValueError("modulus mismatch")
            return other.residue
        return other

    def __add__(self, other):
        return FpElem(self.residue + self._coerce(other), self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        return FpElem(self.residue - self._coerce(other), self.modulus)

    def __rsub__(self, other):
        return FpElem(self._coerce(other) - self.residue, self.modulus)

    def __mul__(self, other):
        return FpElem(self.residue * self._coerce(other), self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElem(-self.residue, self.modulus)

    def __truediv__(self, other):
        return self * mod_inverse(FpElem(self._coerce(other), self.modulus))

    def __pow__(self, e):
        if e < 0:
            return mod_inverse(self) ** (-e)
        return FpElem(pow(self.residue, e, self.modulus), self.modulus)

    def __eq__(self, other):
        if isinstance(other, FpElem):
            return self.modulus == other.modulus and self.residue == other.residue
        if isinstance(other, int):
            return self.residue == other % self.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.residue, self.modulus))

    def __repr__(self):
        return f"{self.residue} (mod {self.modulus})"


def legendre_symbol(a: FpElem) -> int:
    """Euler's criterion: 0, 1 or -1."""
    p = a.modulus
    if p == 2:
        raise ValueError("even modulus")
    if a.residue == 0:
        return 0
    return 1 if pow(a.residue, (p - 1) // 2, p) == 1 else -1


def legendre(a: int, p: int) -> int:
    """Bare-int variant of :func:`legendre_symbol` for inner loops."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def mod_inverse(a: FpElem) -> FpElem:
    if a.residue == 0:
        raise ZeroDivisionError("not invertible")
    return FpElem(pow(a.residue, -1, a.modulus), a.modulus)


def sqrt_mod(a: int, p: int) -> int:
    """A square root of ``a`` modulo the odd prime ``p`` (Tonelli-Shanks).

    Raises ValueError if ``a`` is not a square.
    """
    a %= p
    if a == 0:
        return 0
    if legendre(a, p) != 1:
        raise ValueError(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def primes_up_to(bound: int) -> list[int]:
    """Primes <= bound, ascending (sieve of Eratosthenes)."""
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(bound) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytes(len(range(i * i, bound + 1, i)))
    return [i for i, flag in enumerate(sieve) if flag]


def is_prime(n: int) -> bool:
    """Trial division; only meant for the small moduli used here."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def reduce_rational_mod(x: Fraction, ell: int) -> FpElem:
    x = Fraction(x)
    if x.denominator % ell == 0:
        raise ValueError("bad reduction prime")
    return FpElem(x.numerator * pow(x.denominator, -1, ell), ell)


def trial_factor(n: int, limit: int = 10**6) -> tuple[dict[int, int], int]:
    """Strip prime factors <= limit from |n|.

    Returns (factors, cofactor); the cofactor has no prime factor <= limit.
    """
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    factors: dict[int, int] = {}
    for f in (2, 3):
        while n % f == 0:
            factors[f] = factors.get(f, 0) + 1
            n //= f
    f = 5
    step = 2
    while f <= limit and f * f <= n:
        while n % f == 0:
            factors[f] = factors.get(f, 0) + 1
            n //= f
        f += step
        step = 6 - step
    if n > 1 and n <= limit * limit:
        # no factor below sqrt(n), so what is left is prime
        factors[n] = factors.get(n, 0) + 1
        n = 1
    return factors, n


def canonical_j_id(x: Fraction) -> str:
    """``numerator/denominator`` with the denominator always present."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``num`` or ``num/den`` into an exact rational."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(text))
