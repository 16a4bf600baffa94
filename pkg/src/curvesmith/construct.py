"""Constructing curves E_{a,b}/F_p whose group order is divisible by m.

Four routes are offered:

* :func:`naive_search` draws random Weierstrass equations until one works;
* :func:`smooth_pair` looks for any y-smooth divisor in [M, 2M];
* :func:`cm_construct` and :func:`cm_construct_average` pick a trace t with
  m | p + 1 - t and a large square in t^2 - 4p, then build the curve with
  the CM method;
* :func:`subgroup_construct` does the same for m = r^2 s and checks that
  (Z/rZ) x (Z/rsZ) sits inside E(F_p).
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, replace
from typing import Optional

from .classpoly import hilbert_class_poly
from .curve import (
    Curve,
    CurveOrder,
    GroupStructure,
    count_points,
    count_points_bsgs,
    curve_from_j,
    group_structure,
    j_invariant,
    twist_orbit,
)
from .errors import (
    NoTraceInInterval,
    PreconditionError,
    SubgroupVerificationFailed,
    TooLargeM,
    TrialsExhausted,
)
from .modmath import (
    Factorization,
    crt_pair,
    hensel_lift_sqrt,
    is_fundamental_discriminant,
    is_prime,
    jacobi,
    legendre,
    sqrt_mod_prime,
    squarefree_decompose,
)
from .polyfp import reduce_mod_p, roots_of_split
from .smooth import choose_y, divisor_search, smooth_part

log = logging.getLogger(__name__)

TRIAL_CAP_FACTOR = 64
SMOOTH_EXPECTED_TRIALS = 16
# how many doublings past the first interval the prime search may go
FALLBACK_DOUBLINGS = 4


@dataclass(frozen=True)
class TraceCertificate:
    """Witness for the trace chosen by the CM route.

    ``t**2 - 4p == u**2 * D`` with D fundamental, v | u, and t is congruent
    to ``crt_residue`` modulo ``crt_modulus = m v**2``. ``fallback`` marks
    certificates found outside the first prime interval, where the window
    bound m v^2 <= 4 sqrt(p) need not hold; v = 1 means a plain scan over
    all admissible traces.
    """

    t: int
    v: int
    s_lift: int
    u: int
    D: int
    crt_residue: int
    crt_modulus: int
    fallback: bool = False


@dataclass(frozen=True)
class ConstructionResult:
    curve: Curve
    order: CurveOrder
    j: int
    method: str
    certificate: Optional[TraceCertificate] = None
    trials: int = 0


@dataclass(frozen=True)
class SmoothPair:
    m: int
    result: ConstructionResult
    trials: int
    factorization: Factorization
    y: int


@dataclass(frozen=True)
class SubgroupSpec:
    r: int
    s: int

    def __post_init__(self):
        if self.r < 1 or self.s < 1:
            raise PreconditionError("subgroup parameters must be positive")

    @property
    def m(self) -> int:
        return self.r * self.r * self.s


def require_prime_field(p):
    if p <= 3 or not is_prime(p):
        raise PreconditionError(f"p = {p} must be a prime greater than 3")


def _trial_curve(p, seed, i):
    rng = random.Random(seed + i)
    while True:
        a, b = rng.randrange(p), rng.randrange(p)
        if (4 * a**3 + 27 * b * b) % p:
            return Curve(p, a, b)


def naive_trial(p: int, m: int, seed: int, i: int) -> Optional[ConstructionResult]:
    E = _trial_curve(p, seed, i)
    order = count_points(E, seed=seed + i)
    if order.N % m:
        return None
    return ConstructionResult(E, order, j_invariant(E), "naive", None, i + 1)


def naive_search(p: int, m: int, seed: int = 0, max_trials: Optional[int] = None) -> ConstructionResult:
    """Random curves until m divides the order. Trial i uses seed + i."""
    require_prime_field(p)
    if m < 1:
        raise PreconditionError("m must be positive")
    cap = max_trials if max_trials is not None else TRIAL_CAP_FACTOR * m
    for i in range(cap):
        res = naive_trial(p, m, seed, i)
        if res is not None:
            return res
    raise TrialsExhausted(f"no curve over F_{p} with {m} | N in {cap} trials", cap)


def hasse_bound(p: int) -> int:
    """Largest |t| allowed by Hasse: floor(2 sqrt p)."""
    return math.isqrt(4 * p)


def smooth_trial(p: int, M: int, y: int, seed: int, i: int) -> Optional[SmoothPair]:
    E = _trial_curve(p, seed, i)
    order = count_points(E, seed=seed + i)
    _, fac = smooth_part(order.N, y)
    hit = divisor_search(fac, M)
    if hit is None:
        return None
    res = ConstructionResult(E, order, j_invariant(E), "smooth", None, i + 1)
    return SmoothPair(hit.m, res, i + 1, hit.factorization, y)


def check_smooth_inputs(p: int, M: int) -> None:
    require_prime_field(p)
    if M < 1 or 2 * M > p + 1 + hasse_bound(p):
        raise PreconditionError(f"M = {M} outside [1, (p + 1 + 2 sqrt p) / 2]")


def smooth_pair(
    p: int,
    M: int,
    y: Optional[int] = None,
    seed: int = 0,
    max_trials: Optional[int] = None,
) -> SmoothPair:
    """Find m in [M, 2M], y-smooth, and a curve with m | #E(F_p)."""
    check_smooth_inputs(p, M)
    y = y if y is not None else choose_y(p)
    cap = max_trials if max_trials is not None else TRIAL_CAP_FACTOR * SMOOTH_EXPECTED_TRIALS
    for i in range(cap):
        hit = smooth_trial(p, M, y, seed, i)
        if hit is not None:
            return hit
    raise TrialsExhausted(f"no {y}-smooth divisor in [{M}, {2 * M}] after {cap} trials", cap)


# --- CM route -------------------------------------------------------------


def _qualifies(p, m):
    # the CRT step needs v coprime to m; v = 2 has no Legendre symbol
    return lambda v: v % 2 == 1 and v != p and m % v and legendre(p, v) == 1


def _qualifying_primes(lo, hi, pred):
    for v in range(max(lo, 3), hi + 1):
        if is_prime(v) and pred(v):
            yield v


def _candidate_traces(p, m, v, widen):
    """Traces t in the Hasse interval with t = +-s (mod v^2), t = p + 1 (mod m)."""
    B = hasse_bound(p)
    v2 = v * v
    mod = m * v2
    x = sqrt_mod_prime(4 * p, v)
    s = hensel_lift_sqrt(4 * p, v, x)
    out = []
    for branch in (s, (v2 - s) % v2):
        a = crt_pair(branch, v2, (p + 1) % m, m)
        if widen:
            ts = range(a - ((a + B) // mod) * mod, B + 1, mod)
        else:
            ts = (a, a - mod)
        for t in ts:
            if -B <= t <= B:
                out.append((t, branch, a, mod))
    return out


def _plain_traces(p, m):
    B = hasse_bound(p)
    first = -B + ((p + 1 + B) % m)
    return [(t, 0, t % m, m) for t in range(first, B + 1, m)]


def _pick(p, cands, v, fallback, accept=None):
    best = None
    for t, branch, a, mod in cands:
        if t == 0:
            log.info("skipping supersingular candidate t = 0 for p = %d", p)
            continue
        u, D = squarefree_decompose(t * t - 4 * p)
        cert = TraceCertificate(t, v, branch, u, D, a, mod, fallback)
        if accept is not None and not accept(cert):
            continue
        key = (abs(D), abs(t), -t)
        if best is None or key < best[0]:
            best = (key, cert)
    return None if best is None else best[1]


def choose_trace(p: int, m: int, V: float, width: int, accept=None) -> TraceCertificate:
    """Select the trace and its certificate.

    The smallest qualifying prime v in [V, width*V] is tried first; its
    in-interval candidates, from both square roots of 4p mod v^2, are
    ranked by |D|, then |t|, then sign. When the interval has no usable
    prime, further primes are tried with a full scan of each residue class
    over the Hasse interval, and as a last resort every t with
    m | p + 1 - t is scanned directly (certificate v = 1).
    """
    pred = _qualifies(p, m)
    lo = max(3, math.ceil(V))
    hi = math.floor(width * V)
    for v in _qualifying_primes(lo, hi, pred):
        cert = _pick(p, _candidate_traces(p, m, v, widen=False), v, False, accept)
        if cert is not None:
            return cert
    scanned = max(hi, lo - 1)
    for _ in range(FALLBACK_DOUBLINGS):
        upper = 2 * max(scanned, lo)
        start, scanned = scanned + 1, upper
        for v in _qualifying_primes(start, upper, pred):
            cert = _pick(p, _candidate_traces(p, m, v, widen=True), v, True, accept)
            if cert is not None:
                log.info("p = %d, m = %d: trace from fallback prime v = %d", p, m, v)
                return cert
    cert = _pick(p, _plain_traces(p, m), 1, True, accept)
    if cert is not None:
        log.info("p = %d, m = %d: trace from plain scan", p, m)
        return cert
    raise NoTraceInInterval(f"no admissible trace for p = {p}, m = {m}")


def curve_with_trace(p: int, cert: TraceCertificate, cache_dir: Optional[str] = None) -> ConstructionResult:
    """CM step: a root of H_D mod p, then the twist carrying trace t."""
    H = hilbert_class_poly(cert.D, cache_dir=cache_dir)
    roots = roots_of_split(reduce_mod_p(H.coeffs, p), seed=None)
    for j in roots:
        for E in twist_orbit(curve_from_j(p, j)):
            order = count_points(E)
            if order.t == cert.t:
                return ConstructionResult(E, order, j, "cm", cert)
    raise RuntimeError(f"no curve with trace {cert.t} among the roots of H_{cert.D} mod {p}")


def _check_cm_inputs(p, m):
    require_prime_field(p)
    if m < 1:
        raise PreconditionError("m must be positive")
    if 16 * m * m > p:
        raise TooLargeM(f"m = {m} exceeds sqrt(p)/4 for p = {p}")


def cm_construct(p: int, m: int, cache_dir: Optional[str] = None) -> ConstructionResult:
    """Curve with m | #E(F_p), primes v searched in [V, 4V], V = p^(1/4) / (2 sqrt m)."""
    _check_cm_inputs(p, m)
    V = p**0.25 / (2 * math.sqrt(m))
    return curve_with_trace(p, choose_trace(p, m, V, 4), cache_dir)


def cm_construct_average(p: int, m: int, cache_dir: Optional[str] = None) -> ConstructionResult:
    """Same pipeline with the interval [V, 2V], V = p^(1/4) / sqrt m."""
    _check_cm_inputs(p, m)
    V = p**0.25 / math.sqrt(m)
    return curve_with_trace(p, choose_trace(p, m, V, 2), cache_dir)


def predicted_structure(p: int, cert: TraceCertificate) -> GroupStructure:
    """Group invariants of a curve whose endomorphism ring is the maximal order.

    E(F_p) is then O_K / (pi - 1); writing pi - 1 in the basis
    {1, (D + sqrt D)/2} gives n1 = gcd(u, (t - 2 - u D) / 2).
    """
    N = p + 1 - cert.t
    n1 = math.gcd(cert.u, (cert.t - 2 - cert.u * cert.D) // 2)
    return GroupStructure(n1, N // n1)


def subgroup_construct(
    p: int, spec: SubgroupSpec, cache_dir: Optional[str] = None, select_structure: bool = True
) -> ConstructionResult:
    """Curve whose group contains (Z/rZ) x (Z/rsZ).

    r^2 s | N alone is not enough: at p = 269, (r, s) = (1, 4) the first
    trace gives Z/2 x Z/122. With ``select_structure`` the trace search only
    accepts candidates whose maximal-order group structure already contains
    the target; without it the first admissible trace is used and the check
    below may raise SubgroupVerificationFailed.
    """
    require_prime_field(p)
    r, s = spec.r, spec.s
    if (p - 1) % r:
        raise PreconditionError(f"r = {r} does not divide p - 1 = {p - 1}")
    if (r * s) % p == 0:
        raise PreconditionError("p divides r*s")
    m = spec.m
    if m >= p:
        raise TooLargeM(f"r^2 s = {m} must stay below p = {p}")
    accept = None
    if select_structure:
        def accept(cert):
            gs = predicted_structure(p, cert)
            return gs.n1 % r == 0 and gs.n2 % (r * s) == 0
    V = p**0.25 / (2 * math.sqrt(m))
    cert = choose_trace(p, m, V, 4, accept)
    res = curve_with_trace(p, cert, cache_dir)
    gs = group_structure(res.curve, res.order)
    if gs.n1 % r or gs.n2 % (r * s):
        raise SubgroupVerificationFailed(
            f"{res.curve}: structure Z/{gs.n1} x Z/{gs.n2} does not contain Z/{r} x Z/{r * s}"
        )
    return res


def _recount(E):
    if E.p <= 10**4:
        total = 1
        for x in range(E.p):
            total += 1 + jacobi(E.rhs(x), E.p)
        return total
    return count_points_bsgs(E, seed=1).N


def validate_certificate(p: int, m: int, res: ConstructionResult, cache_dir: Optional[str] = None) -> bool:
    """Recheck every certificate invariant and recount the curve."""
    c = res.certificate
    if c is None or res.curve.p != p:
        return False
    t, v, u, D = c.t, c.v, c.u, c.D
    checks = [
        t * t - 4 * p == u * u * D,
        D < 0 and D % 4 in (0, 1) and is_fundamental_discriminant(D),
        v >= 1 and u % v == 0,
        (p + 1 - t) % m == 0,
        t * t <= 4 * p,
        c.crt_modulus == m * v * v,
        0 <= c.crt_residue < c.crt_modulus,
        (t - c.crt_residue) % c.crt_modulus == 0,
        (t - c.s_lift) % (v * v) == 0,
        (c.s_lift * c.s_lift - 4 * p) % (v * v) == 0,
        c.fallback or (m * v * v) ** 2 <= 16 * p,
        res.order.t == t and res.order.N == p + 1 - t,
    ]
    if not all(checks):
        return False
    H = hilbert_class_poly(D, cache_dir=cache_dir)
    if reduce_mod_p(H.coeffs, p)(j_invariant(res.curve)) != 0:
        return False
    return _recount(res.curve) == res.order.N


def with_tampered_trace(res: ConstructionResult, delta: int = 1) -> ConstructionResult:
    """Copy of ``res`` whose certificate trace is shifted; for negative tests."""
    return replace(res, certificate=replace(res.certificate, t=res.certificate.t + delta))
