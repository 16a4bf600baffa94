"""Dense univariate polynomials over a prime field and split-root extraction."""

from __future__ import annotations

import random
from typing import Iterable, Sequence

import numpy as np

from .errors import NotSplit, PreconditionError

KARATSUBA_CUTOFF = 32


def _trim(c):
    while c and c[-1] == 0:
        c.pop()
    return c


def _mul_school(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, fi in enumerate(f):
        if fi:
            for j, gj in enumerate(g):
                out[i + j] += fi * gj
    return [c % p for c in out]


def _add_lists(f, g):
    if len(f) < len(g):
        f, g = g, f
    out = list(f)
    for i, c in enumerate(g):
        out[i] += c
    return out


def _mul_kara(f, g, p):
    if len(f) < KARATSUBA_CUTOFF or len(g) < KARATSUBA_CUTOFF:
        return _mul_school(f, g, p)
    h = max(len(f), len(g)) // 2
    f0, f1 = f[:h], f[h:]
    g0, g1 = g[:h], g[h:]
    low = _mul_kara(f0, g0, p)
    high = _mul_kara(f1, g1, p)
    mid = _mul_kara(_add_lists(f0, f1), _add_lists(g0, g1), p)
    out = [0] * (len(f) + len(g) - 1)
    for i, c in enumerate(low):
        out[i] += c
        out[i + h] -= c
    for i, c in enumerate(high):
        out[i + 2 * h] += c
        out[i + h] -= c
    for i, c in enumerate(mid):
        out[i + h] += c
    return [c % p for c in out]


class PolyFp:
    """Polynomial over F_p with coefficients stored lowest degree first."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: Iterable[int] = ()):
        self.p = p
        self.coeffs = tuple(_trim([c % p for c in coeffs]))

    @classmethod
    def from_roots(cls, p, roots):
        f = cls(p, [1])
        for r in roots:
            f = f * cls(p, [-r, 1])
        return f

    @classmethod
    def x(cls, p):
        return cls(p, [0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else 0

    def __repr__(self):
        return f"PolyFp({self.p}, {list(self.coeffs)})"

    def __eq__(self, other):
        if isinstance(other, int):
            other = PolyFp(self.p, [other])
        return isinstance(other, PolyFp) and self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def _coerce(self, other):
        if isinstance(other, int):
            return PolyFp(self.p, [other])
        if other.p != self.p:
            raise PreconditionError("polynomials over different fields")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        return PolyFp(self.p, _add_lists(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return PolyFp(self.p, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return PolyFp(self.p, [c * other for c in self.coeffs])
        other = self._coerce(other)
        return PolyFp(self.p, _mul_kara(list(self.coeffs), list(other.coeffs), self.p))

    __rmul__ = __mul__

    def __pow__(self, e):
        out = PolyFp(self.p, [1])
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def divmod(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        r = list(self.coeffs)
        d = other.degree
        if len(r) <= d:
            return PolyFp(p, []), self
        inv = pow(other.lead, -1, p)
        g = other.coeffs
        q = [0] * (len(r) - d)
        for i in range(len(r) - 1, d - 1, -1):
            c = r[i] * inv % p
            if c:
                q[i - d] = c
                base = i - d
                for k in range(d + 1):
                    r[base + k] = (r[base + k] - c * g[k]) % p
        return PolyFp(p, q), PolyFp(p, r[:d])

    __divmod__ = divmod

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self):
        if self.is_zero():
            return self
        inv = pow(self.lead, -1, self.p)
        return PolyFp(self.p, [c * inv for c in self.coeffs])

    def __call__(self, x: int) -> int:
        acc, x = 0, int(x)
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        """Horner evaluation at many points; needs p < 2**31."""
        xs = np.asarray(xs, dtype=np.int64)
        acc = np.zeros_like(xs)
        for c in reversed(self.coeffs):
            acc = (acc * xs + c) % self.p
        return acc

    def derivative(self):
        return PolyFp(self.p, [i * c for i, c in enumerate(self.coeffs)][1:])

    def powmod(self, e: int, modulus: "PolyFp"):
        out = PolyFp(self.p, [1]) % modulus
        base = self % modulus
        while e:
            if e & 1:
                out = (out * base) % modulus
            base = (base * base) % modulus
            e >>= 1
        return out


def reduce_mod_p(coeffs: Sequence[int], p: int) -> PolyFp:
    """Reduce an integer polynomial (lowest degree first) modulo ``p``."""
    return PolyFp(p, coeffs)


def gcd_poly(f: PolyFp, g: PolyFp) -> PolyFp:
    g = f._coerce(g)
    while not g.is_zero():
        f, g = g, f % g
    return f.monic()


def _split(f, rng_next, out):
    p = f.p
    if f.degree == 0:
        return
    if f.degree == 1:
        out.append((-f.coeffs[0]) * pow(f.coeffs[1], -1, p) % p)
        return
    while True:
        delta = rng_next()
        h = PolyFp(p, [delta, 1]).powmod((p - 1) // 2, f) - 1
        g = gcd_poly(f, h)
        if 0 < g.degree < f.degree:
            break
    _split(g, rng_next, out)
    _split(f // g, rng_next, out)


def roots_of_split(f: PolyFp, seed: int | None = 0) -> list[int]:
    """All roots of a squarefree polynomial that splits into linear factors.

    ``seed=None`` selects the deterministic mode trying shifts 0, 1, 2, ...
    The returned list is sorted, so it never depends on the seed.
    """
    if f.is_zero():
        raise PreconditionError("zero polynomial has no finite root set")
    f = f.monic()
    p = f.p
    if f.degree == 0:
        return []
    if p == 2:
        roots = [x for x in (0, 1) if f(x) == 0]
        if len(roots) != f.degree:
            raise NotSplit("polynomial does not split into distinct linear factors")
        return roots
    xp = PolyFp.x(p).powmod(p, f)
    if (xp - PolyFp.x(p)) % f != PolyFp(p, []):
        raise NotSplit("polynomial does not split into distinct linear factors")
    if gcd_poly(f, f.derivative()).degree > 0:
        raise NotSplit("polynomial has a repeated root")
    if seed is None:
        counter = iter(range(p))
        rng_next = lambda: next(counter)  # noqa: E731
    else:
        rng = random.Random(seed)
        rng_next = lambda: rng.randrange(p)  # noqa: E731
    out: list[int] = []
    # pull out the root 0 first; the splitting step cannot separate it
    if f.coeffs[0] == 0:
        out.append(0)
        f = f // PolyFp.x(p)
    _split(f, rng_next, out)
    return sorted(out)
