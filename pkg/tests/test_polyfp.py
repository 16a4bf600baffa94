import random

import pytest
from hypothesis import given, settings, strategies as st

from curvesmith.errors import NotSplit, PreconditionError
from curvesmith.modmath import primes_up_to
from curvesmith.polyfp import PolyFp, gcd_poly, reduce_mod_p, roots_of_split

PRIMES = [p for p in primes_up_to(10**6) if p > 2]


def P(p, *coeffs):
    return PolyFp(p, coeffs)


def test_reduce_mod_p_examples():
    assert reduce_mod_p([-1728, 1], 5) == P(5, 2, 1)
    assert reduce_mod_p([0, 1], 7) == P(7, 0, 1)
    # 191025 = 11 * 17366 - 1 and 121287375 = 11 * 11026125
    assert reduce_mod_p([-121287375, 191025, 1], 11) == P(11, 0, 10, 1)


def test_roots_examples():
    assert roots_of_split(P(7, -1, 0, 1)) == [1, 6]
    assert roots_of_split(P(11, 0, 1)) == [0]
    assert roots_of_split(PolyFp.from_roots(13, [2, 5, 9])) == [2, 5, 9]


def test_roots_rejects_non_split():
    with pytest.raises(NotSplit):
        roots_of_split(P(7, 1, 0, 1))  # x^2 + 1, -1 is a nonresidue mod 7
    with pytest.raises(NotSplit):
        roots_of_split(PolyFp.from_roots(13, [2, 2, 5]))
    with pytest.raises(PreconditionError):
        roots_of_split(P(13))


def test_gcd_examples():
    f = P(7, 3, 0, 2)
    assert gcd_poly(f, P(7)) == f.monic()
    assert gcd_poly(P(7, -1, 0, 1), P(7, -1, 1)) == P(7, -1, 1)
    assert gcd_poly(PolyFp.from_roots(11, [3, 4]), PolyFp.from_roots(11, [4, 5])) == P(11, -4, 1)


@pytest.mark.slow
def test_roots_random_split_polynomials():
    rng = random.Random(17)
    for _ in range(1000):
        p = rng.choice(PRIMES)
        roots = sorted({rng.randrange(p) for _ in range(rng.randint(1, 64))})
        f = PolyFp.from_roots(p, roots) * rng.randrange(1, p)
        got = roots_of_split(f, seed=rng.randrange(1000))
        assert got == roots and all(f(r) == 0 for r in got)


def test_roots_independent_of_seed():
    rng = random.Random(23)
    for _ in range(100):
        p = rng.choice(PRIMES[:2000])
        roots = {rng.randrange(p) for _ in range(rng.randint(1, 20))}
        f = PolyFp.from_roots(p, roots)
        results = {tuple(roots_of_split(f, seed=s)) for s in range(5)}
        results.add(tuple(roots_of_split(f, seed=None)))
        assert results == {tuple(sorted(roots))}


def test_gcd_common_factor():
    rng = random.Random(29)
    for _ in range(200):
        p = rng.choice([5, 7, 101, 1009])
        f, g, h = (PolyFp(p, [rng.randrange(p) for _ in range(rng.randint(1, 8))]) for _ in range(3))
        if h.is_zero() or (f.is_zero() and g.is_zero()):
            continue
        assert gcd_poly(f * h, g * h) == h.monic() * gcd_poly(f, g)


poly = st.lists(st.integers(min_value=0, max_value=100), max_size=80)


@settings(max_examples=200, deadline=None)
@given(poly, poly, poly)
def test_ring_axioms(a, b, c):
    p = 101
    f, g, h = PolyFp(p, a), PolyFp(p, b), PolyFp(p, c)
    assert (f + g) * h == f * h + g * h
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f - f == 0


@settings(max_examples=200, deadline=None)
@given(poly, poly)
def test_divmod_identity(a, b):
    p = 101
    f, g = PolyFp(p, a), PolyFp(p, b)
    if g.is_zero():
        return
    q, r = divmod(f, g)
    assert q * g + r == f and r.degree < g.degree


def test_karatsuba_matches_schoolbook():
    rng = random.Random(31)
    p = 1000003
    for n in (31, 32, 33, 64, 100, 257):
        f = PolyFp(p, [rng.randrange(p) for _ in range(n)])
        g = PolyFp(p, [rng.randrange(p) for _ in range(n + 3)])
        expected = [0] * (n + n + 2)
        for i, x in enumerate(f.coeffs):
            for j, y in enumerate(g.coeffs):
                expected[i + j] = (expected[i + j] + x * y) % p
        assert f * g == PolyFp(p, expected)


def test_evaluation_forms_agree():
    import numpy as np

    rng = random.Random(37)
    p = 65537
    f = PolyFp(p, [rng.randrange(p) for _ in range(40)])
    xs = np.arange(0, p, 97, dtype=np.int64)
    assert [int(v) for v in f.eval_many(xs)] == [f(int(x)) for x in xs]
