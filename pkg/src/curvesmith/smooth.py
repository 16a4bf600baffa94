"""Smooth parts of integers and divisors lying in a dyadic interval."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import PreconditionError
from .modmath import Factorization, factor


@dataclass(frozen=True)
class DivisorSearchResult:
    m: int
    factorization: Factorization
    nodes: int = 0


def choose_y(p: int) -> int:
    """Smoothness bound ceil(exp((ln p)^(3/5))), at most p but never below 7."""
    if p < 5:
        raise PreconditionError("choose_y expects p >= 5")
    y = math.ceil(math.exp(math.log(p) ** 0.6))
    return max(min(y, p), 7)


def smooth_part(N: int, y: int) -> tuple[int, Factorization]:
    """Largest divisor of N with every prime factor <= y, with its factorization."""
    if N < 1:
        raise PreconditionError("smooth_part expects N >= 1")
    fac = factor(N, y)
    smooth = Factorization(fac.factors, 1, y)
    return smooth.value, smooth


def divisor_search(fac: Factorization, M: int) -> DivisorSearchResult | None:
    """Depth-first search for a divisor of ``fac`` in [M, 2M].

    Exponent vectors are explored prime by prime in increasing order, each
    exponent from 0 upward. Branches whose current product already exceeds
    2M, or which cannot reach M even with every remaining prime at full
    power, are cut. The first hit is returned along with the number of
    complete divisors examined.
    """
    items = list(fac.factors)
    # tail[i] = largest value the primes from index i on can still contribute
    tail = [1] * (len(items) + 1)
    for i in range(len(items) - 1, -1, -1):
        q, e = items[i]
        tail[i] = tail[i + 1] * q**e
    lo, hi = M, 2 * M
    nodes = 0

    def dfs(i, cur, exps):
        nonlocal nodes
        if cur > hi or cur * tail[i] < lo:
            return None
        if i == len(items):
            nodes += 1
            return exps if lo <= cur <= hi else None
        q, e = items[i]
        val = cur
        for k in range(e + 1):
            if val > hi:
                break
            hit = dfs(i + 1, val, exps + ((q, k),) if k else exps)
            if hit is not None:
                return hit
            val *= q
        return None

    exps = dfs(0, 1, ())
    if exps is None:
        return None
    fm = Factorization(tuple(exps), 1, fac.trial_bound)
    return DivisorSearchResult(fm.value, fm, nodes)


def divisor_in_interval(fac: Factorization, M: int) -> Optional[int]:
    res = divisor_search(fac, M)
    return None if res is None else res.m


def divisor_count(fac: Factorization) -> int:
    out = 1
    for _, e in fac.factors:
        out *= e + 1
    return out
