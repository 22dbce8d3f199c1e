from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isc.arith import primes_up_to
from isc.curves import (
    AmbiguousOrder,
    CurveModel,
    ReducedCurve,
    SkippedPrime,
    TraceCache,
    TraceRecord,
    count_points_bsgs,
    count_points_legendre,
    count_points_naive,
    curve_from_j,
    reduce_curve,
    skip_primes,
    trace_of_frobenius,
)

TEST_COEFFS = [(0, 1), (1, 0), (-1, 0), (2, 3), (5, 7), (-3, 11), (13, -2), (1, 1)]


def j_of(a, b):
    a, b = Fraction(a), Fraction(b)
    return 1728 * 4 * a**3 / (4 * a**3 + 27 * b**2)


def test_curve_from_j_special_values():
    m0 = curve_from_j(0)
    assert (m0.a, m0.b) == (0, 1)
    m1728 = curve_from_j(1728)
    assert (m1728.a, m1728.b) == (1, 0)


def test_curve_from_j_4913():
    m = curve_from_j(4913)
    assert m.a == -3 * 4913 * 3185
    assert m.b == -2 * 4913 * 3185**2
    assert j_of(m.a, m.b) == 4913


@given(st.fractions().filter(lambda x: x not in (0, 1728)))
def test_curve_from_j_has_that_j(j):
    m = curve_from_j(j)
    assert j_of(m.a, m.b) == j


def test_curve_model_rejects_wrong_j():
    with pytest.raises(ValueError):
        CurveModel(Fraction(5), Fraction(0), Fraction(1))


def test_skip_primes_examples():
    assert skip_primes(curve_from_j(4913)) == {2, 3, 5, 7, 13, 17}
    assert 4913 == 17**3 and 3185 == 5 * 7**2 * 13
    assert skip_primes(curve_from_j(1)) == {2, 3, 11, 157}
    assert 1727 == 11 * 157
    assert 2 in skip_primes(curve_from_j(Fraction(-17 * 373**3, 2**17)))
    assert skip_primes(curve_from_j(0)) == {2, 3}
    assert skip_primes(curve_from_j(1728)) == {2, 3}


def test_reduce_curve_examples():
    m = curve_from_j(4913)
    c = reduce_curve(m, 11)
    assert (4 * c.a**3 + 27 * c.b**2) != 0
    assert c.a == int(m.a) % 11 and c.b == int(m.b) % 11
    with pytest.raises(SkippedPrime, match="skipped prime"):
        reduce_curve(m, 17)
    c0 = reduce_curve(curve_from_j(0), 5)
    assert (c0.a.residue, c0.b.residue) == (0, 1)


def test_reduced_curve_rejects_singular():
    with pytest.raises(ValueError):
        ReducedCurve.from_ints(0, 0, 7)


def test_naive_count_examples():
    # x=0 gives y=+-1, x=2 gives y=+-2 (9 = 4), x=4 gives y=0 (65 = 0), plus O
    assert count_points_naive(ReducedCurve.from_ints(0, 1, 5)) == 6
    assert count_points_naive(ReducedCurve.from_ints(1, 0, 3)) == 4
    assert count_points_naive(ReducedCurve.from_ints(-1, 0, 7)) == 8


def test_naive_bound():
    with pytest.raises(ValueError, match="oracle bound exceeded"):
        count_points_naive(ReducedCurve.from_ints(1, 1, 10007))


def test_legendre_count_examples():
    assert count_points_legendre(ReducedCurve.from_ints(0, 1, 5)) == 6
    assert count_points_legendre(ReducedCurve.from_ints(-1, 0, 7)) == 8
    c = ReducedCurve.from_ints(1, 0, 5)
    assert count_points_legendre(c) == count_points_naive(c) == 4
    with pytest.raises(ValueError, match="use naive count"):
        count_points_legendre(ReducedCurve.from_ints(1, 1, 2))


def curve_prime_pairs(max_ell=200):
    for a, b in TEST_COEFFS:
        for ell in primes_up_to(max_ell)[1:]:
            if (4 * a**3 + 27 * b**2) % ell:
                yield ReducedCurve.from_ints(a, b, ell)


@pytest.mark.parametrize("c", list(curve_prime_pairs()), ids=lambda c: f"{c.a.residue},{c.b.residue}@{c.ell}")
def test_counts_agree_and_hasse(c):
    n = count_points_naive(c)
    assert count_points_legendre(c) == n
    ell = c.ell
    assert (ell + 1 - n) ** 2 <= 4 * ell
    if ell >= 5:
        try:
            assert count_points_bsgs(c) == n
        except AmbiguousOrder:
            pass


def test_bsgs_agrees_with_legendre_at_large_primes():
    m = curve_from_j(4913)
    for ell in primes_up_to(20000)[-40:]:
        c = reduce_curve(m, ell)
        assert count_points_bsgs(c) == count_points_legendre(c)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6), st.sampled_from(primes_up_to(3000)[2:]))
def test_bsgs_property(a, b, ell):
    if (4 * a**3 + 27 * b**2) % ell == 0:
        return
    c = ReducedCurve.from_ints(a, b, ell)
    try:
        assert count_points_bsgs(c) == count_points_legendre(c)
    except AmbiguousOrder:
        pass


def test_twist_negates_trace():
    for ell in primes_up_to(50)[2:]:
        nr = next(x for x in range(2, ell) if pow(x, (ell - 1) // 2, ell) == ell - 1)
        for a in range(ell):
            for b in range(ell):
                if (4 * a**3 + 27 * b**2) % ell == 0:
                    continue
                c = ReducedCurve.from_ints(a, b, ell)
                tw = ReducedCurve.from_ints(a * nr * nr, b * nr**3, ell)
                t = ell + 1 - count_points_legendre(c)
                t_tw = ell + 1 - count_points_legendre(tw)
                assert t_tw == -t


def test_trace_of_frobenius_j0_at_5():
    assert trace_of_frobenius(curve_from_j(0), 5) == 0


def test_trace_respects_skip_set():
    with pytest.raises(SkippedPrime):
        trace_of_frobenius(curve_from_j(4913), 13)


def test_trace_matches_naive_count_for_rational_j():
    for j in (Fraction(4913), Fraction(-17**2 * 101**3, 2), Fraction(-121), Fraction(1, 3)):
        m = curve_from_j(j)
        for ell in primes_up_to(200):
            if ell in skip_primes(m):
                continue
            t = trace_of_frobenius(m, ell)
            assert t == ell + 1 - count_points_naive(reduce_curve(m, ell))
            assert t * t <= 4 * ell


def test_trace_threshold_independent():
    m = curve_from_j(Fraction(-7 * 11**3))
    ells = [ell for ell in primes_up_to(400) if ell not in skip_primes(m)]
    low = [trace_of_frobenius(m, ell, bsgs_threshold=10**9) for ell in ells]
    high = [trace_of_frobenius(m, ell, bsgs_threshold=5) for ell in ells]
    assert low == high


def test_cache_hit_returns_same_value(tmp_path):
    cache = TraceCache(tmp_path / "t.txt")
    m = curve_from_j(4913)
    first = trace_of_frobenius(m, 4099, cache)
    assert cache.misses == 1
    assert trace_of_frobenius(m, 4099, cache) == first
    assert cache.hits == 1 and cache.misses == 1


def test_cache_file_roundtrip(tmp_path):
    path = tmp_path / "t.txt"
    cache = TraceCache(path)
    m = curve_from_j(4913)
    values = {ell: trace_of_frobenius(m, ell, cache) for ell in (11, 19, 23)}
    cache.flush()
    assert path.read_text().splitlines() == [f"4913/1 {ell} {a}" for ell, a in values.items()]
    again = TraceCache(path)
    assert len(again) == 3
    assert again.get("4913/1", 23) == values[23]
    # reading back does not queue anything for rewriting
    again.flush()
    assert path.read_text().count("\n") == 3


def test_cache_rejects_hasse_violation():
    with pytest.raises(ValueError, match="Hasse"):
        TraceRecord("1/1", 5, 5)
    cache = TraceCache(None)
    with pytest.raises(ValueError):
        cache.put("1/1", 101, 21)


def test_cache_rejects_conflicts():
    cache = TraceCache(None)
    cache.put("1/1", 101, 3)
    cache.put("1/1", 101, 3)
    with pytest.raises(ValueError, match="conflicting"):
        cache.put("1/1", 101, 4)


def test_cache_deterministic_bytes(tmp_path):
    def run(path):
        cache = TraceCache(path)
        m = curve_from_j(Fraction(-17 * 373**3, 2**17))
        for ell in primes_up_to(6000):
            if ell not in skip_primes(m) and ell % 7 == 3:
                trace_of_frobenius(m, ell, cache)
        cache.flush()
        return path.read_bytes()

    assert run(tmp_path / "a.txt") == run(tmp_path / "b.txt")

