"""Short Weierstrass curves y^2 = x^3 + ax + b over a prime field F_p.

Points are handled internally as ``(x, y)`` tuples with ``None`` standing
for the point at infinity; the public :class:`Point` wrapper carries its
curve so that mixing curves can be detected.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional

import numpy as np

from .errors import CurveMismatch, NotNonresidue, PreconditionError, TooLarge
from .modmath import factor_full, jacobi, sqrt_mod_prime
from .polyfp import PolyFp, gcd_poly

EXHAUSTIVE_COUNT_LIMIT = 10**6
EXHAUSTIVE_STRUCTURE_LIMIT = 2000
SQRT_TABLE_LIMIT = 10**5


@dataclass(frozen=True)
class Curve:
    """The curve E_{a,b}: y^2 = x^3 + a x + b over F_p."""

    p: int
    a: int
    b: int

    def __post_init__(self):
        if self.p <= 3:
            raise PreconditionError("characteristic must exceed 3")
        object.__setattr__(self, "a", self.a % self.p)
        object.__setattr__(self, "b", self.b % self.p)
        if self.discriminant_part == 0:
            raise PreconditionError(f"E_{{{self.a},{self.b}}} is singular over F_{self.p}")

    @property
    def discriminant_part(self) -> int:
        return (4 * self.a**3 + 27 * self.b**2) % self.p

    def rhs(self, x: int) -> int:
        return (x * x * x + self.a * x + self.b) % self.p

    def is_on(self, P) -> bool:
        if P is None:
            return True
        x, y = P
        return (y * y - self.rhs(x)) % self.p == 0

    # tuple-level group law; these are the hot paths
    def neg(self, P):
        if P is None:
            return None
        return (P[0], -P[1] % self.p)

    def add(self, P, Q):
        if P is None:
            return Q
        if Q is None:
            return P
        p = self.p
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            if (y1 + y2) % p == 0:
                return None
            lam = (3 * x1 * x1 + self.a) * pow(2 * y1, -1, p) % p
        else:
            lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
        x3 = (lam * lam - x1 - x2) % p
        return (x3, (lam * (x1 - x3) - y1) % p)

    def mul(self, k: int, P):
        if k < 0:
            return self.mul(-k, self.neg(P))
        out = None
        while k:
            if k & 1:
                out = self.add(out, P)
            P = self.add(P, P)
            k >>= 1
        return out

    def random_point(self, rng: random.Random):
        p = self.p
        while True:
            x = rng.randrange(p)
            f = self.rhs(x)
            if f == 0:
                return (x, 0)
            if jacobi(f, p) == 1:
                y = sqrt_mod_prime(f, p)
                return (x, y if rng.random() < 0.5 else p - y)

    def affine_points(self) -> Iterator[tuple[int, int]]:
        """Every affine point, in increasing x then y order."""
        p = self.p
        roots = _sqrt_table(p) if p <= SQRT_TABLE_LIMIT else None
        for x in range(p):
            f = self.rhs(x)
            if f == 0:
                yield (x, 0)
                continue
            if roots is not None:
                y = roots[f]
                if y < 0:
                    continue
            elif jacobi(f, p) == 1:
                y = sqrt_mod_prime(f, p)
            else:
                continue
            yield (x, y)
            yield (x, p - y)

    def __str__(self):
        return f"E_{{{self.a},{self.b}}}/F_{self.p}"


@dataclass(frozen=True)
class Point:
    curve: Curve
    x: Optional[int] = None
    y: Optional[int] = None

    def __post_init__(self):
        if (self.x is None) != (self.y is None):
            raise PreconditionError("a point needs both coordinates or neither")
        if self.x is not None and not self.curve.is_on((self.x, self.y)):
            raise PreconditionError(f"({self.x}, {self.y}) is not on {self.curve}")

    @classmethod
    def infinity(cls, curve):
        return cls(curve)

    @classmethod
    def _wrap(cls, curve, t):
        return cls(curve) if t is None else cls(curve, t[0], t[1])

    @property
    def is_infinity(self):
        return self.x is None

    @property
    def xy(self):
        return None if self.x is None else (self.x, self.y)

    def __add__(self, other):
        return add(self, other)

    def __neg__(self):
        return Point._wrap(self.curve, self.curve.neg(self.xy))

    def __rmul__(self, k):
        return scalar_mul(k, self)


def add(P: Point, Q: Point) -> Point:
    if P.curve != Q.curve:
        raise CurveMismatch("points lie on different curves")
    return Point._wrap(P.curve, P.curve.add(P.xy, Q.xy))


def scalar_mul(k: int, P: Point) -> Point:
    return Point._wrap(P.curve, P.curve.mul(k, P.xy))


@dataclass(frozen=True)
class CurveOrder:
    N: int
    t: int


@dataclass(frozen=True)
class GroupStructure:
    """E(F_p) is isomorphic to Z/n1 x Z/n2 with n1 | n2."""

    n1: int
    n2: int


def j_invariant(E: Curve) -> int:
    p = E.p
    a3 = 4 * pow(E.a, 3, p)
    return 1728 * a3 * pow(a3 + 27 * E.b * E.b, -1, p) % p


def curve_from_j(p: int, j: int) -> Curve:
    j %= p
    if j == 0:
        return Curve(p, 0, 1)
    if j == 1728 % p:
        return Curve(p, 1, 0)
    k = (1728 - j) % p
    a, b = 3 * j * k % p, 2 * j * k * k % p
    if (4 * a**3 + 27 * b * b) % p and j_invariant(Curve(p, a, b)) == j:
        return Curve(p, a, b)
    # the closed form never degenerates for p > 3, but stay safe
    for a in range(1, p):
        for b in range(1, p):
            if (4 * a**3 + 27 * b * b) % p and j_invariant(Curve(p, a, b)) == j:
                return Curve(p, a, b)
    raise PreconditionError(f"no curve with j = {j} over F_{p}")  # pragma: no cover


def smallest_nonresidue(p: int) -> int:
    d = 2
    while jacobi(d, p) != -1:
        d += 1
    return d


def _orbit_generator(p, need_noncube):
    # ascending search for a non-square that is also a non-cube when cubes are proper
    g = 2
    while True:
        if jacobi(g, p) == -1 and (not need_noncube or pow(g, (p - 1) // 3, p) != 1):
            return g
        g += 1


def twist_orbit(E: Curve, d: Optional[int] = None) -> list[Curve]:
    """Representatives of every F_p-isomorphism class with the same j-invariant.

    Entries may repeat up to isomorphism; how many classes are distinct
    depends on p mod 12.
    """
    p = E.p
    if d is not None and (d % p == 0 or jacobi(d, p) != -1):
        raise NotNonresidue(f"{d} is not a quadratic nonresidue mod {p}")
    if E.a == 0:
        need_noncube = p % 3 == 1
        g = d if d is not None and not (need_noncube and pow(d, (p - 1) // 3, p) == 1) else None
        g = g or _orbit_generator(p, need_noncube)
        return [Curve(p, 0, E.b * pow(g, n, p)) for n in range(6)]
    if E.b == 0:
        g = d if d is not None else smallest_nonresidue(p)
        return [Curve(p, E.a * pow(g, n, p), 0) for n in range(4)]
    d = d if d is not None else smallest_nonresidue(p)
    return [E, Curve(p, d * d * E.a, d**3 * E.b)]


def quadratic_twist(E: Curve) -> Curve:
    d = smallest_nonresidue(E.p)
    return Curve(E.p, d * d * E.a, d**3 * E.b)


@lru_cache(maxsize=16)
def _sqrt_table(p):
    """roots[a] = smaller square root of a mod p, or -1 for a nonresidue."""
    roots = [-1] * p
    for y in range(p // 2, -1, -1):
        roots[y * y % p] = y
    return roots


@lru_cache(maxsize=16)
def _square_flags(p):
    flags = np.zeros(p, dtype=bool)
    xs = np.arange(p, dtype=np.int64)
    flags[xs * xs % p] = True
    flags[0] = False
    return flags


def _rhs_values(p, a, b):
    xs = np.arange(p, dtype=np.int64)
    return (xs * xs % p * xs + a * xs + b) % p


def count_points_exhaustive(E: Curve) -> CurveOrder:
    p = E.p
    if p > EXHAUSTIVE_COUNT_LIMIT * 4:
        raise TooLarge(f"exhaustive count refused for p = {p}")
    f = _rhs_values(p, E.a, E.b)
    n = 1 + int(np.count_nonzero(f == 0)) + 2 * int(np.count_nonzero(_square_flags(p)[f]))
    return CurveOrder(n, p + 1 - n)


def _traces_killing(E, P, bound):
    """All t in [-bound, bound] with (p + 1 - t) P = 0, or None for small-order P."""
    s = math.isqrt(2 * bound) + 1
    table = {}
    R = None
    for j in range(s):
        if R is None and j > 0:
            return None
        table[R] = j
        R = E.add(R, P)
    step = E.neg(E.mul(s, P))
    R = E.mul(E.p + 1 + bound, P)
    found = []
    for i in range(2 * bound // s + 1):
        j = table.get(R)
        if j is not None:
            k = i * s + j
            if k <= 2 * bound:
                found.append(k - bound)
        R = E.add(R, step)
    return set(found)


def count_points_bsgs(E: Curve, seed: int = 0, max_points: int = 200) -> CurveOrder:
    """Baby-step giant-step on random points of E and of its quadratic twist.

    Narrows the Hasse interval until a single trace remains; reliable for
    p > 229 where Mestre's argument guarantees a point of large order on
    one of the two curves.
    """
    p = E.p
    rng = random.Random(seed)
    bound = math.isqrt(4 * p)
    twist = quadratic_twist(E)
    candidates = None
    for i in range(max_points):
        use_twist = i % 2 == 1
        curve = twist if use_twist else E
        traces = _traces_killing(curve, curve.random_point(rng), bound)
        if traces is None:
            continue
        if use_twist:
            traces = {-t for t in traces}
        candidates = traces if candidates is None else candidates & traces
        if len(candidates) == 1:
            t = candidates.pop()
            return CurveOrder(p + 1 - t, t)
        if not candidates:  # pragma: no cover - would mean an arithmetic bug
            raise RuntimeError("BSGS eliminated every trace")
    raise TooLarge(f"BSGS did not isolate the trace of {E} after {max_points} points")


def count_points(E: Curve, method: str = "auto", seed: int = 0) -> CurveOrder:
    """Exact #E(F_p) and trace; method is 'auto', 'exhaustive' or 'bsgs'."""
    if method == "exhaustive" or (method == "auto" and E.p <= EXHAUSTIVE_COUNT_LIMIT):
        return count_points_exhaustive(E)
    if method in ("bsgs", "auto"):
        return count_points_bsgs(E, seed)
    raise PreconditionError(f"unknown counting method {method!r}")


def _valuation(n, q):
    k = 0
    while n % q == 0:
        n //= q
        k += 1
    return k


def group_structure(E: Curve, order: Optional[CurveOrder] = None, seed: int = 0) -> GroupStructure:
    """Invariants (n1, n2) of E(F_p).

    Only primes dividing gcd(N, p - 1) can have rank two. For each one the
    largest order of an element of the Sylow subgroup is found by scanning
    every point (p <= 2000) or by seeded random sampling.
    """
    p = E.p
    if p > 2**64:
        raise TooLarge("group structure needs a factored order; p too large")
    N = (order or count_points(E)).N
    g = math.gcd(N, p - 1)
    n1 = 1
    if g > 1:
        for ell, _ in factor_full(g).factors:
            k = _valuation(N, ell)
            # a <= min(v_ell(p - 1), k / 2) forces a lower bound on b
            b_floor = max((k + 1) // 2, k - _valuation(p - 1, ell))
            if b_floor >= k:
                continue
            b = _sylow_exponent(E, N // ell**k, ell, k, b_floor, seed)
            n1 *= ell ** (k - b)
    return GroupStructure(n1, N // n1)


def _sylow_exponent(E, cofactor, ell, k, b, seed):
    if E.p <= EXHAUSTIVE_STRUCTURE_LIMIT:
        source = E.affine_points()
        patience = None
    else:
        rng = random.Random(seed)
        source = iter(lambda: E.random_point(rng), None)
        patience = 60
    quiet = 0
    for P in source:
        Q = E.mul(cofactor, P)
        e = 0
        while Q is not None:
            Q = E.mul(ell, Q)
            e += 1
        if e > b:
            b, quiet = e, 0
            if b == k:
                break
        else:
            quiet += 1
            if patience is not None and quiet >= patience:
                break
    return b


def _div_poly_table(E: Curve, m: int) -> dict[int, PolyFp]:
    """x-parts P_n of psi_n, where psi_n = P_n * y for even n, n <= m + 1."""
    p, a, b = E.p, E.a, E.b
    F = PolyFp(p, [b, a, 0, 1])
    F2 = F * F
    P = {
        0: PolyFp(p, []),
        1: PolyFp(p, [1]),
        2: PolyFp(p, [2]),
        3: PolyFp(p, [-a * a, 12 * b, 6 * a, 0, 3]),
        4: PolyFp(p, [-8 * b * b - a**3, -4 * a * b, -5 * a * a, 20 * b, 5 * a, 0, 1]) * 4,
    }
    top = max(m + 2, 4)
    for n in range(5, top + 1):
        k = n // 2
        if n % 2:
            if k % 2 == 0:
                P[n] = F2 * P[k + 2] * P[k] ** 3 - P[k - 1] * P[k + 1] ** 3
            else:
                P[n] = P[k + 2] * P[k] ** 3 - F2 * P[k - 1] * P[k + 1] ** 3
        else:
            inner = P[k + 2] * P[k - 1] ** 2 - P[k - 2] * P[k + 1] ** 2
            P[n] = P[k] * inner * pow(2, -1, p)
    return P


def division_polynomial(E: Curve, m: int) -> tuple[PolyFp, bool]:
    """psi_m as (x-part, y_flag); psi_m = x-part * y when y_flag is set."""
    if m < 0:
        raise PreconditionError("division polynomial index must be non-negative")
    return _div_poly_table(E, m)[m], m % 2 == 0


def mul_by_m_x_map(E: Curve, m: int) -> tuple[PolyFp, PolyFp]:
    """(num, den) with num/den = x - psi_{m-1} psi_{m+1} / psi_m^2.

    The pair is reduced and ``den`` is monic, so ``num(x)/den(x)`` gives
    x(mP) whenever mP is not the point at infinity.
    """
    if m < 2:
        raise PreconditionError("multiplication map needs m >= 2")
    P = _div_poly_table(E, m)
    F = PolyFp(E.p, [E.b, E.a, 0, 1])
    X = PolyFp.x(E.p)
    if m % 2:
        den = P[m] * P[m]
        num = X * den - F * P[m - 1] * P[m + 1]
    else:
        den = F * P[m] * P[m]
        num = X * den - P[m - 1] * P[m + 1]
    g = gcd_poly(num, den)
    num, den = num // g, den // g
    inv = pow(den.lead, -1, E.p)
    return num * inv, den * inv

