"""Reduced binary quadratic forms, class numbers and Hilbert class polynomials.

H_D is assembled from floating-point values of the modular j-function at
the roots of the reduced forms of discriminant D, then rounded to integers.
The j-values come from the eta quotient f = Delta(2 tau) / Delta(tau), with
j = (256 f + 1)^3 / f, and the eta products are summed through Euler's
pentagonal series, which converges very fast for |q| <= exp(-pi sqrt 3).
"""

from __future__ import annotations

import fcntl
import logging
import math
import os
import tempfile
from dataclasses import dataclass
from typing import Optional

import gmpy2
import mpmath

from .errors import PrecisionExhausted, PreconditionError
from .modmath import is_fundamental_discriminant

log = logging.getLogger(__name__)

CACHE_ENV = "CURVESMITH_CACHE"
CACHE_FILENAME = "classpoly.cache"
MAX_RETRIES = 3
ROUNDING_TOLERANCE = 0.25


@dataclass(frozen=True)
class QuadForm:
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (a > 0 and abs(b) <= a <= c):
            return False
        return b >= 0 or (abs(b) != a and a != c)


@dataclass(frozen=True)
class ClassPolynomial:
    """Monic H_D with integer coefficients, lowest degree first."""

    D: int
    coeffs: tuple[int, ...]
    residual: float = 0.0
    precision_bits: int = 0

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def bit_size(self) -> int:
        return sum(abs(c).bit_length() for c in self.coeffs)


def _check_discriminant(D):
    if D >= 0 or D % 4 not in (0, 1):
        raise PreconditionError(f"{D} is not a negative discriminant")


def reduced_forms(D: int) -> list[QuadForm]:
    """Primitive reduced forms of discriminant D, sorted by (a, b)."""
    _check_discriminant(D)
    out = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (b < 0 and a == c):
                continue
            if math.gcd(math.gcd(a, b), c) == 1:
                out.append(QuadForm(a, b, c))
        a += 1
    return out


def class_number(D: int) -> int:
    return len(reduced_forms(D))


def _pentagonal(q, eps):
    """prod_{n>=1} (1 - q^n) via sum_k (-1)^k q^{k(3k-1)/2}."""
    total = gmpy2.mpc(1)
    q2, q3 = q * q, q * q * q
    # term = q^{k(3k-1)/2}, qk = q^k, step = q^{3k+1}
    term, qk, step = q, q, q2 * q2
    k, eps2 = 1, eps * eps
    while gmpy2.norm(term) >= eps2:
        pair = term + term * qk
        total = total - pair if k % 2 else total + pair
        term *= step
        step *= q3
        qk *= q
        k += 1
    return total


def _j_value(form, precision_bits):
    # MPFR/MPC through gmpy2; the caller owns the precision context
    D = form.discriminant
    tau_re = gmpy2.mpfr(-form.b) / (2 * form.a)
    tau_im = gmpy2.sqrt(gmpy2.mpfr(-D)) / (2 * form.a)
    two_pi = 2 * gmpy2.const_pi()
    q = gmpy2.exp(-two_pi * tau_im) * gmpy2.mpc(gmpy2.cos(two_pi * tau_re), gmpy2.sin(two_pi * tau_re))
    eps = gmpy2.mpfr(2) ** (-precision_bits - 8)
    ratio = _pentagonal(q * q, eps) / _pentagonal(q, eps)
    f = q * ratio**24
    return (256 * f + 1) ** 3 / f


def eval_j_at_form(form: QuadForm, precision_bits: int) -> mpmath.mpc:
    """j((-b + sqrt(D)) / 2a) to about ``precision_bits`` bits.

    |q| = exp(-pi sqrt|D| / a) and reducedness gives a <= sqrt(|D|/3), so
    |q| <= exp(-pi sqrt 3) ~ 0.0043.
    """
    if precision_bits < 64:
        raise PreconditionError("precision_bits must be at least 64")
    with gmpy2.context(gmpy2.get_context(), precision=precision_bits + 32):
        j = _j_value(form, precision_bits)
    with mpmath.workprec(precision_bits + 32):
        return mpmath.mpc(mpmath.mpf(j.real), mpmath.mpf(j.imag))


def _fixed(x, F):
    return int(gmpy2.rint(gmpy2.mul_2exp(x, F)))


def initial_precision(D: int, forms: Optional[list[QuadForm]] = None) -> int:
    forms = forms if forms is not None else reduced_forms(D)
    bound = math.pi * math.sqrt(-D) / math.log(2) * sum(1.0 / f.a for f in forms)
    return max(64, math.ceil(bound) + 34 + len(forms))


def _kron_mul(f, g):
    """Product of integer polynomials (lowest degree first) by packing into one integer."""
    if len(f) < 8 or len(g) < 8:
        out = [0] * (len(f) + len(g) - 1)
        for i, x in enumerate(f):
            for j, y in enumerate(g):
                out[i + j] += x * y
        return out
    bound = max(abs(c) for c in f).bit_length() + max(abs(c) for c in g).bit_length()
    width = (bound + min(len(f), len(g)).bit_length() + 8) // 8 + 1
    # split into non-negative halves so every slot packs without borrows
    fp, fn = [max(c, 0) for c in f], [max(-c, 0) for c in f]
    gp, gn = [max(c, 0) for c in g], [max(-c, 0) for c in g]

    def pack(cs):
        return gmpy2.mpz(int.from_bytes(b"".join(c.to_bytes(width, "little") for c in cs), "little"))

    def unpack(z, n):
        raw = int(z).to_bytes(n * width, "little")
        return [int.from_bytes(raw[i * width:(i + 1) * width], "little") for i in range(n)]

    n = len(f) + len(g) - 1
    Fp, Fn, Gp, Gn = pack(fp), pack(fn), pack(gp), pack(gn)
    pos = unpack(Fp * Gp + Fn * Gn, n)
    neg = unpack(Fp * Gn + Fn * Gp, n)
    return [a - b for a, b in zip(pos, neg)]


def _fixed_product(factors, F):
    """Multiply fixed-point polynomials (scale 2^F) pairwise up a balanced tree."""
    half = 1 << (F - 1)
    while len(factors) > 1:
        nxt = []
        for i in range(0, len(factors) - 1, 2):
            nxt.append([(c + half) >> F for c in _kron_mul(factors[i], factors[i + 1])])
        if len(factors) % 2:
            nxt.append(factors[-1])
        factors = nxt
    return factors[0]


def _attempt(D, forms, prec):
    """Coefficients of H_D at ``prec`` bits, the rounding residual and a conjugacy residue.

    Forms (a, b, c) and (a, -b, c) have complex-conjugate j-values, so each
    pair contributes the real quadratic x^2 - 2 Re(j) x + |j|^2 and only one
    member is evaluated. A few mates are evaluated anyway as a spot check.
    """
    F = prec + 16
    scale = 1 << F
    factors = []
    conj_residue = 0.0
    checked = 0
    present = set(forms)
    with gmpy2.context(gmpy2.get_context(), precision=prec + 32):
        for f in forms:
            if f.b < 0 and QuadForm(f.a, -f.b, f.c) in present:
                continue
            j = _j_value(f, prec)
            mate = QuadForm(f.a, -f.b, f.c)
            if f.b > 0 and mate in present:
                if checked < 3:
                    gap = abs(_j_value(mate, prec) - j.conjugate()) / max(1, abs(j))
                    conj_residue = max(conj_residue, float(gap))
                    checked += 1
                factors.append([_fixed(gmpy2.norm(j), F), _fixed(-2 * j.real, F), scale])
            else:
                # the root is real
                factors.append([_fixed(-j.real, F), scale])
    poly = _fixed_product(factors, F)
    coeffs = [(c + (scale >> 1)) >> F for c in poly]
    residual = max(abs(c - k * scale) for c, k in zip(poly, coeffs)) / scale
    return coeffs, float(residual), conj_residue


def _compute(D):
    forms = reduced_forms(D)
    prec = initial_precision(D, forms)
    for attempt in range(MAX_RETRIES + 1):
        coeffs, residual, conj = _attempt(D, forms, prec)
        if residual < ROUNDING_TOLERANCE:
            return ClassPolynomial(D, tuple(coeffs), residual, prec)
        log.warning("H_%d: residual %.3g at %d bits, retrying", D, residual, prec)
        prec *= 2
    raise PrecisionExhausted(f"H_{D}: rounding residual {residual} after {MAX_RETRIES} retries")


_memory_cache: dict[int, ClassPolynomial] = {}


def clear_memory_cache():
    _memory_cache.clear()


def hilbert_class_poly(D: int, cache_dir: Optional[str] = None, use_cache: bool = True) -> ClassPolynomial:
    """Hilbert class polynomial of a fundamental discriminant D.

    ``cache_dir`` defaults to the CURVESMITH_CACHE environment variable;
    without either, only the in-process cache is used.
    """
    _check_discriminant(D)
    if not is_fundamental_discriminant(D):
        raise PreconditionError(f"{D} is not a fundamental discriminant")
    if use_cache and D in _memory_cache:
        return _memory_cache[D]
    cache_dir = cache_dir if cache_dir is not None else os.environ.get(CACHE_ENV)
    H = None
    if use_cache and cache_dir:
        H = ClassPolyCache(cache_dir).get(D)
    if H is None:
        H = _compute(D)
        if use_cache and cache_dir:
            ClassPolyCache(cache_dir).put(H)
    if use_cache:
        _memory_cache[D] = H
    return H


def format_record(H: ClassPolynomial) -> str:
    return " ".join(str(v) for v in (H.D, H.degree, *H.coeffs))


def parse_record(line: str) -> ClassPolynomial:
    fields = [int(tok) for tok in line.split()]
    if len(fields) < 3:
        raise ValueError(f"malformed cache record: {line!r}")
    D, h, coeffs = fields[0], fields[1], tuple(fields[2:])
    if len(coeffs) != h + 1 or coeffs[-1] != 1:
        raise ValueError(f"malformed cache record for D = {D}")
    return ClassPolynomial(D, coeffs)


class ClassPolyCache:
    """On-disk store of H_D, one ``D h coeff_0 ... coeff_{h-1} 1`` line each.

    Readers take a shared lock, the writer an exclusive one, and the file
    is swapped in atomically so readers never see a partial write.
    """

    def __init__(self, directory: str):
        self.directory = directory
        self.path = os.path.join(directory, CACHE_FILENAME)
        self.lock_path = self.path + ".lock"

    def _locked(self, mode):
        os.makedirs(self.directory, exist_ok=True)
        fh = open(self.lock_path, "a+")
        fcntl.flock(fh, mode)
        return fh

    def _read_all(self):
        out = {}
        if not os.path.exists(self.path):
            return out
        with open(self.path) as fh:
            for line in fh:
                if line.strip():
                    H = parse_record(line)
                    out[H.D] = H
        return out

    def load(self) -> dict[int, ClassPolynomial]:
        lock = self._locked(fcntl.LOCK_SH)
        try:
            return self._read_all()
        finally:
            lock.close()

    def get(self, D: int) -> Optional[ClassPolynomial]:
        return self.load().get(D)

    def put(self, H: ClassPolynomial) -> None:
        lock = self._locked(fcntl.LOCK_EX)
        try:
            records = self._read_all()
            records[H.D] = H
            fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".classpoly.")
            with os.fdopen(fd, "w") as fh:
                for D in sorted(records, reverse=True):
                    fh.write(format_record(records[D]) + "\n")
            os.replace(tmp, self.path)
        finally:
            lock.close()
