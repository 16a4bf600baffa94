"""Integer and modular arithmetic primitives.

Everything here works on plain Python ints (arbitrary precision). The
functions are pure and keep no global state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import gmpy2

from .errors import NonResidue, NotCoprime, NotDiscriminant, PreconditionError, SingularLift

# Deterministic Miller-Rabin with the first 13 prime bases is correct below this bound.
MR_DETERMINISTIC_LIMIT = 3317044064679887385961981
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_SMALL_PRIMES = _MR_BASES + (43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)


def isqrt(n: int) -> int:
    if n < 0:
        raise PreconditionError("isqrt of a negative number")
    return math.isqrt(n)


def _strong_probable_prime(n, base):
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(base, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Primality test, deterministic below ``MR_DETERMINISTIC_LIMIT``.

    Above the limit a strong Baillie-PSW test is used; see
    :func:`is_probable_prime_only` for the flag telling the two apart.
    """
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n == q:
            return True
        if n % q == 0:
            return False
    if n < MR_DETERMINISTIC_LIMIT:
        return all(_strong_probable_prime(n, b) for b in _MR_BASES)
    return bool(gmpy2.is_strong_bpsw_prp(n))


def is_probable_prime_only(n: int) -> bool:
    """True when ``is_prime(n)`` is a BPSW verdict rather than a proof."""
    return n >= MR_DETERMINISTIC_LIMIT


def next_prime_in(lo: int, hi: int, pred: Optional[Callable[[int], bool]] = None) -> Optional[int]:
    """Smallest prime ``v`` in ``[lo, hi]`` with ``pred(v)``, or None."""
    lo = max(lo, 2)
    for v in range(lo, hi + 1):
        if is_prime(v) and (pred is None or pred(v)):
            return v
    return None


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i, flag in enumerate(sieve) if flag]


def jacobi(a: int, n: int) -> int:
    if n <= 0 or n % 2 == 0:
        raise PreconditionError("Jacobi symbol needs a positive odd modulus")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def legendre(a: int, v: int) -> int:
    """Legendre symbol (a/v) for an odd prime v."""
    if v < 3 or v % 2 == 0 or not is_prime(v):
        raise PreconditionError(f"legendre: modulus {v} is not an odd prime")
    return jacobi(a, v)


def sqrt_mod_prime(a: int, v: int) -> int:
    """Tonelli-Shanks square root of ``a`` modulo an odd prime ``v``.

    Returns the smaller of the two roots so the answer is canonical.
    """
    a %= v
    if a == 0:
        return 0
    if legendre(a, v) != 1:
        raise NonResidue(f"{a} is not a square modulo {v}")
    if v % 4 == 3:
        x = pow(a, (v + 1) // 4, v)
    else:
        q, s = v - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while jacobi(z, v) != -1:
            z += 1
        m, c, t, x = s, pow(z, q, v), pow(a, q, v), pow(a, (q + 1) // 2, v)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % v
                i += 1
            b = pow(c, 1 << (m - i - 1), v)
            m, c = i, b * b % v
            t, x = t * c % v, x * b % v
    return min(x, v - x)


def hensel_lift_sqrt(a: int, v: int, x0: int) -> int:
    """Lift a square root of ``a`` mod ``v`` to one mod ``v**2``."""
    if (x0 * x0 - a) % v:
        raise PreconditionError("x0 is not a square root of a modulo v")
    if x0 % v == 0:
        raise SingularLift("derivative 2*x0 vanishes modulo v")
    v2 = v * v
    # one Newton step doubles the v-adic precision
    k = ((a - x0 * x0) // v) * pow(2 * x0, -1, v) % v
    return (x0 + k * v) % v2


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> int:
    if math.gcd(m1, m2) != 1:
        raise NotCoprime(f"moduli {m1} and {m2} share a factor")
    k = (r2 - r1) * pow(m1, -1, m2) % m2 if m2 > 1 else 0
    return (r1 + m1 * k) % (m1 * m2)


@dataclass(frozen=True)
class Factorization:
    """``value == prod(p**e for p, e in factors) * cofactor``."""

    factors: tuple[tuple[int, int], ...] = ()
    cofactor: int = 1
    trial_bound: int = 0

    @property
    def value(self) -> int:
        return self.smooth_value * self.cofactor

    @property
    def smooth_value(self) -> int:
        out = 1
        for q, e in self.factors:
            out *= q**e
        return out

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.factors)

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)


def _brent_rho(n, c):
    y, r, q, g = 2, 1, 1, 1
    m = 64
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        r *= 2
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g


def _split_fully(n, out):
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    r = math.isqrt(n)
    if r * r == n:
        _split_fully(r, out)
        _split_fully(r, out)
        return
    c = 1
    while True:
        d = _brent_rho(n, c)
        if 1 < d < n:
            break
        c += 1
    _split_fully(d, out)
    _split_fully(n // d, out)


def factor(n: int, trial_bound: int = 1000, full: bool = False) -> Factorization:
    """Trial division by primes up to ``trial_bound``.

    The unfactored remainder goes to ``cofactor``; with ``full=True`` it is
    split completely by Brent-Pollard rho instead.
    """
    if n < 1:
        raise PreconditionError("factor expects n >= 1")
    found: dict[int, int] = {}
    rest = n
    for q in _primes_cached(trial_bound):
        if q * q > rest:
            break
        if rest % q == 0:
            e = 0
            while rest % q == 0:
                rest //= q
                e += 1
            found[q] = e
    if 1 < rest <= trial_bound:
        # no prime below sqrt(rest) divides it
        found[rest] = found.get(rest, 0) + 1
        rest = 1
    if full and rest > 1:
        _split_fully(rest, found)
        rest = 1
    return Factorization(tuple(sorted(found.items())), rest, trial_bound)


def factor_full(n: int) -> Factorization:
    return factor(n, 1000, full=True)


@lru_cache(maxsize=8)
def _primes_cached(bound):
    return tuple(primes_up_to(bound))


def is_fundamental_discriminant(d: int) -> bool:
    if d >= 0:
        return False
    if d % 4 == 1:
        return _squarefree(-d)
    if d % 4 == 0:
        k = d // 4
        return k % 4 in (2, 3) and _squarefree(-k)
    return False


def _squarefree(n):
    return all(e == 1 for _, e in factor_full(n).factors)


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Write a negative discriminant ``n`` as ``u**2 * D`` with D fundamental."""
    if n >= 0 or n % 4 in (2, 3):
        raise NotDiscriminant(f"{n} is not a negative discriminant")
    core, u = -1, 1
    for q, e in factor_full(-n).factors:
        u *= q ** (e // 2)
        if e % 2:
            core *= q
    # core is the squarefree kernel of n, with sign
    if core % 4 == 1:
        return u, core
    # core = 2, 3 (mod 4): the discriminant must absorb a factor 4 from u^2
    assert u % 2 == 0
    return u // 2, 4 * core
