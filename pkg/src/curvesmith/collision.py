"""Small-image rational maps from multiplication-by-m on a curve.

If m divides #E(F_p), the x-coordinate map of [m] sends the set X of
x-coordinates of E(F_p) onto a set of roughly p/m elements, so the map has
many collisions. ``measure`` evaluates it exhaustively.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import Curve, _rhs_values, _square_flags, count_points, mul_by_m_x_map
from .errors import NotDivisible, PreconditionError, TooLarge
from .polyfp import PolyFp

EXHAUSTIVE_LIMIT = 10**6
MAX_M = 32


@dataclass(frozen=True)
class CollisionReport:
    p: int
    m: int
    curve: Curve
    domain_size: int
    image_size: int
    degree: int
    collision_count: int
    torsion_hits: int

    @property
    def evaluated(self) -> int:
        """Points of X where the map is finite."""
        return self.domain_size - self.torsion_hits


def build_map(E: Curve, m: int) -> tuple[PolyFp, PolyFp]:
    if m < 2:
        raise PreconditionError("the collision map needs m >= 2")
    if count_points(E).N % m:
        raise NotDivisible(f"{m} does not divide #{E}")
    return mul_by_m_x_map(E, m)


def _powmod_vec(base, e, p):
    out = np.ones_like(base)
    base = base % p
    while e:
        if e & 1:
            out = out * base % p
        base = base * base % p
        e >>= 1
    return out


def domain(E: Curve) -> np.ndarray:
    """Sorted x-coordinates of the affine points of E(F_p)."""
    f = _rhs_values(E.p, E.a, E.b)
    return np.flatnonzero((f == 0) | _square_flags(E.p)[f]).astype(np.int64)


def measure(E: Curve, m: int, limit: int = EXHAUSTIVE_LIMIT, max_m: int = MAX_M) -> CollisionReport:
    """Exact image size and collision count of the [m] x-map on X.

    x-coordinates of m-torsion points are poles of the map; they are left
    out of the image and counted in ``torsion_hits``. ``collision_count``
    is the number of unordered pairs x != x' in X, both finite, with
    f(x) = f(x').
    """
    p = E.p
    if p > limit:
        raise TooLarge(f"p = {p} above the exhaustive limit {limit}")
    if m > max_m:
        raise TooLarge(f"m = {m} above the cap {max_m}")
    num, den = build_map(E, m)
    xs = domain(E)
    dv = den.eval_many(xs)
    finite = dv != 0
    vals = num.eval_many(xs[finite]) * _powmod_vec(dv[finite], p - 2, p) % p
    _, counts = np.unique(vals, return_counts=True)
    counts = counts.astype(np.int64)
    return CollisionReport(
        p=p,
        m=m,
        curve=E,
        domain_size=int(xs.size),
        image_size=int(counts.size),
        degree=num.degree,
        collision_count=int((counts * (counts - 1) // 2).sum()),
        torsion_hits=int(xs.size - finite.sum()),
    )
