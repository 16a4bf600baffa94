import random

import pytest

from curvesmith.curve import (
    Curve,
    Point,
    count_points,
    count_points_bsgs,
    count_points_exhaustive,
    curve_from_j,
    division_polynomial,
    group_structure,
    j_invariant,
    mul_by_m_x_map,
    quadratic_twist,
    twist_orbit,
)
from curvesmith.errors import CurveMismatch, NotNonresidue, PreconditionError
from curvesmith.modmath import primes_up_to

from conftest import random_curve

SMALL_PRIMES = [p for p in primes_up_to(100) if p >= 5]


def all_curves(p):
    for a in range(p):
        for b in range(p):
            if (4 * a**3 + 27 * b * b) % p:
                yield Curve(p, a, b)


def brute_points(E):
    """Affine points from a table of every y^2, with no Legendre symbols."""
    p = E.p
    roots = {}
    for y in range(p):
        roots.setdefault(y * y % p, []).append(y)
    return [(x, y) for x in range(p) for y in roots.get((x**3 + E.a * x + E.b) % p, ())]


def brute_structure(E):
    """(n1, n2) from the element orders of an exhaustively listed group."""
    pts = [None] + brute_points(E)
    N = len(pts)

    def order(P):
        k, Q = 1, P
        while Q is not None:
            Q = E.add(Q, P)
            k += 1
        return k

    exponent = max(order(P) for P in pts)
    return N // exponent, exponent


def test_curve_rejects_singular_and_small_p():
    with pytest.raises(PreconditionError):
        Curve(5, 0, 0)
    with pytest.raises(PreconditionError):
        Curve(3, 1, 1)


def test_add_examples():
    E = Curve(5, 1, 1)
    P = Point(E, 0, 1)
    O = Point.infinity(E)
    assert P + O == P and O + P == P
    assert (P + (-P)).is_infinity
    assert P + P == Point(E, 4, 2)


def test_add_mismatch():
    with pytest.raises(CurveMismatch):
        Point(Curve(5, 1, 1), 0, 1) + Point(Curve(7, 0, 1), 0, 1)


def test_point_must_be_on_curve():
    with pytest.raises(PreconditionError):
        Point(Curve(5, 1, 1), 0, 2)


def test_scalar_mul_examples():
    E = Curve(5, 1, 1)
    P = Point(E, 0, 1)
    assert (0 * P).is_infinity
    assert 1 * P == P
    assert (9 * P).is_infinity
    assert all(not (k * P).is_infinity for k in range(1, 9))


def test_group_law_random():
    rng = random.Random(3)
    for _ in range(1000):
        p = rng.choice([101, 1009, 10007, 65537])
        E = random_curve(rng, p)
        P, Q, R = (E.random_point(rng) for _ in range(3))
        assert E.add(E.add(P, Q), R) == E.add(P, E.add(Q, R))
        assert E.add(P, Q) == E.add(Q, P)
        assert E.add(P, E.neg(P)) is None
        assert E.is_on(E.add(P, Q))


@pytest.mark.parametrize("a,b,j", [(0, 1, 0), (1, 0, 3), (1, 1, 2)])
def test_j_invariant_examples(a, b, j):
    assert j_invariant(Curve(5, a, b)) == j


def test_curve_from_j_examples():
    assert curve_from_j(5, 0) == Curve(5, 0, 1)
    assert curve_from_j(5, 3) == Curve(5, 1, 0)
    # 1728 = 1 (mod 11): the closed form degenerates
    assert j_invariant(curve_from_j(11, 1)) == 1


def test_curve_from_j_every_value():
    for p in SMALL_PRIMES:
        for j in range(p):
            assert j_invariant(curve_from_j(p, j)) == j


def test_twist_orbit_examples():
    assert twist_orbit(Curve(5, 1, 1), 2) == [Curve(5, 1, 1), Curve(5, 4, 3)]
    assert twist_orbit(Curve(7, 0, 1)) == [Curve(7, 0, pow(3, n, 7)) for n in range(6)]
    assert twist_orbit(Curve(5, 1, 0), 2) == [Curve(5, pow(2, n, 5), 0) for n in range(4)]
    with pytest.raises(NotNonresidue):
        twist_orbit(Curve(5, 1, 1), 4)


def test_twist_orbit_covers_every_isomorphism_class():
    # every curve with the same j appears in the orbit up to F_p-isomorphism,
    # detected by equal point counts across the full j-fibre
    for p in (7, 11, 13, 19, 37):
        fibres = {}
        for E in all_curves(p):
            fibres.setdefault(j_invariant(E), set()).add(count_points_exhaustive(E).N)
        for j, orders in fibres.items():
            orbit = twist_orbit(curve_from_j(p, j))
            assert {j_invariant(E) for E in orbit} == {j}
            assert {count_points_exhaustive(E).N for E in orbit} == orders


@pytest.mark.parametrize("a,b,N,t", [(1, 1, 9, -3), (0, 1, 6, 0), (4, 3, 3, 3)])
def test_count_points_examples(a, b, N, t):
    order = count_points(Curve(5, a, b))
    assert (order.N, order.t) == (N, t)


def test_count_points_exhaustive_all_small_curves():
    for p in SMALL_PRIMES:
        for E in all_curves(p):
            order = count_points(E)
            assert order.N == len(brute_points(E)) + 1
            assert order.N == p + 1 - order.t and order.t**2 <= 4 * p


@pytest.mark.slow
def test_order_kills_every_point():
    for p in SMALL_PRIMES:
        for E in all_curves(p):
            N = count_points(E).N
            assert all(E.mul(N, P) is None for P in E.affine_points())


def test_twin_order_identity():
    for p in SMALL_PRIMES:
        for E in all_curves(p):
            if j_invariant(E) in (0, 1728 % p):
                continue
            assert count_points(E).N + count_points(quadratic_twist(E)).N == 2 * p + 2


def test_bsgs_matches_exhaustive_sample():
    rng = random.Random(5)
    primes = [p for p in primes_up_to(10**6) if p >= 10**4]
    for _ in range(60):
        p = rng.choice(primes)
        E = random_curve(rng, p)
        assert count_points_bsgs(E, seed=rng.randrange(100)) == count_points_exhaustive(E)


def test_bsgs_large_prime_hasse():
    p = 1000000007
    E = Curve(p, 3, 7)
    order = count_points(E)
    assert order.t**2 <= 4 * p
    P = E.random_point(random.Random(0))
    assert E.mul(order.N, P) is None


@pytest.mark.parametrize("a,b,expected", [(1, 1, (1, 9)), (0, 1, (1, 6))])
def test_group_structure_examples(a, b, expected):
    gs = group_structure(Curve(5, a, b))
    assert (gs.n1, gs.n2) == expected


def test_group_structure_matches_brute_force():
    for p in (5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        for E in all_curves(p):
            gs = group_structure(E)
            assert (gs.n1, gs.n2) == brute_structure(E), E


def test_group_structure_sampled_mode():
    # above the exhaustive limit the Sylow ranks come from random sampling
    rng = random.Random(9)
    checked = 0
    for p in (2003, 2011, 2017, 2029, 2053):
        for _ in range(20):
            E = random_curve(rng, p)
            gs = group_structure(E, seed=1)
            N = count_points(E).N
            assert gs.n1 * gs.n2 == N and gs.n2 % gs.n1 == 0 and (p - 1) % gs.n1 == 0
            # full n1-torsion: the n1 roots of the x-part must all be rational
            if gs.n1 > 1:
                ell = gs.n1
                pts = [P for P in E.affine_points() if E.mul(ell, P) is None]
                assert len(pts) + 1 >= ell * ell
            checked += 1
    assert checked == 100


def test_prime_order_is_cyclic():
    for E in all_curves(101):
        N = count_points(E).N
        if all(N % d for d in range(2, N)):
            gs = group_structure(E)
            assert (gs.n1, gs.n2) == (1, N)
            break


def test_division_polynomial_examples():
    E = Curve(5, 1, 1)
    psi1, flag1 = division_polynomial(E, 1)
    assert psi1 == 1 and not flag1
    psi2, flag2 = division_polynomial(E, 2)
    assert psi2 == 2 and flag2
    psi3, _ = division_polynomial(E, 3)
    assert list(psi3.coeffs) == [4, 2, 1, 0, 3]


def test_division_polynomial_roots_are_torsion():
    for p in (5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
        for E in list(all_curves(p))[:: max(1, p // 5)]:
            pts = list(E.affine_points())
            for m in range(2, 8):
                psi, yflag = division_polynomial(E, m)
                roots = {x for x in range(p) if psi(x) == 0}
                if yflag:
                    # psi_m = y * (x-part); the points with y = 0 are 2-torsion
                    roots |= {x for x, y in pts if y == 0}
                    torsion = {x for x, y in pts if E.mul(m, (x, y)) is None}
                    rhs_roots = {x for x in range(p) if E.rhs(x) == 0}
                    assert torsion == roots & ({x for x, _ in pts} | rhs_roots)
                else:
                    torsion = {x for x, y in pts if E.mul(m, (x, y)) is None}
                    assert torsion == roots & {x for x, _ in pts}


def test_duplication_map_closed_form():
    rng = random.Random(1)
    for p in (5, 101, 1009):
        for _ in range(5):
            E = random_curve(rng, p)
            num, den = mul_by_m_x_map(E, 2)
            a, b = E.a, E.b
            inv4 = pow(4, -1, p)
            # (x^4 - 2a x^2 - 8b x + a^2) / (4 (x^3 + a x + b)), den made monic
            assert list(num.coeffs) == [a * a * inv4 % p, -8 * b * inv4 % p, -2 * a * inv4 % p, 0, inv4]
            assert list(den.coeffs) == [b, a, 0, 1]


def test_mul_by_m_map_example_point():
    E = Curve(5, 1, 1)
    num, den = mul_by_m_x_map(E, 2)
    assert num(0) * pow(den(0), -1, 5) % 5 == 4


def test_mul_by_m_map_identity_random():
    rng = random.Random(2)
    for _ in range(20):
        p = rng.choice([101, 211, 1009, 2003])
        E = random_curve(rng, p)
        m = rng.randrange(2, 9)
        num, den = mul_by_m_x_map(E, m)
        assert num.degree == m * m and den.degree == m * m - 1
        for _ in range(100):
            P = E.random_point(rng)
            Q = E.mul(m, P)
            if Q is None:
                assert den(P[0]) == 0
            else:
                assert num(P[0]) * pow(den(P[0]), -1, p) % p == Q[0]


def _image_samples(count, seed):
    rng = random.Random(seed)
    primes = [q for q in primes_up_to(2000) if q >= 200]
    out = []
    while len(out) < count:
        p = rng.choice(primes)
        E = random_curve(rng, p)
        ms = [m for m in range(2, 13) if count_points(E).N % m == 0]
        if ms:
            out.append((E, rng.choice(ms)))
    return out


def test_mul_by_m_image_is_x_of_multiples():
    for E, m in _image_samples(20, 4):
        p = E.p
        num, den = mul_by_m_x_map(E, m)
        pts = list(E.affine_points())
        image = {num(x) * pow(den(x), -1, p) % p for x in {x for x, _ in pts} if den(x)}
        multiples = {E.mul(m, P) for P in pts} - {None}
        assert image == {Q[0] for Q in multiples}


def test_mul_by_m_image_within_factor_two_of_p_over_m():
    # the image is the x-coordinates of mE(F_p), about N / (2m) for cyclic
    # m-torsion; this checks the literal band [p/(2m), 2p/m]
    misses = []
    for E, m in _image_samples(20, 4):
        p = E.p
        num, den = mul_by_m_x_map(E, m)
        xs = {x for x, _ in E.affine_points()}
        size = len({num(x) * pow(den(x), -1, p) % p for x in xs if den(x)})
        if not p / m / 2 <= size <= 2 * p / m:
            misses.append((E.p, E.a, E.b, m, size))
    assert not misses, f"{len(misses)} of 20 outside [p/(2m), 2p/m]: {misses}"
