"""Certified real arithmetic on top of mpmath's interval context.

Every inexact quantity in the package flows through outward-rounded
intervals; a decision (sign, comparison, nearest integer) either resolves
at some precision of a doubling schedule or raises PrecisionExhausted.
Nothing is ever silently rounded.

Conventions: helpers that build interval values must run inside an
``iv_prec(bits)`` block; certified results cross module boundaries as
exact ``Fraction`` endpoint pairs (type alias ``Bounds``).
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import mpmath
from mpmath import iv

from .errors import PrecisionExhausted

Bounds = tuple[Fraction, Fraction]

PREC_START = 64
PREC_CAP = 1 << 20


@contextlib.contextmanager
def iv_prec(bits: int):
    """Temporarily set the working precision of the interval context."""
    old = iv.prec
    iv.prec = int(bits)
    try:
        yield
    finally:
        iv.prec = old


def precisions(start: int = PREC_START, cap: int = PREC_CAP):
    """Doubling precision schedule from start up to (and including) cap."""
    p = int(start)
    cap = int(cap)
    while p < cap:
        yield p
        p *= 2
    yield cap


def from_int(n) -> "iv.mpf":
    return iv.mpf(int(n))


def from_fraction(q) -> "iv.mpf":
    q = Fraction(q)
    if q.denominator == 1:
        return iv.mpf(q.numerator)
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


def endpoints(x) -> Bounds:
    """Exact rational endpoints of an interval value."""
    lo, hi = x._mpi_
    nlo, dlo = mpmath.libmp.to_rational(lo)
    nhi, dhi = mpmath.libmp.to_rational(hi)
    return (Fraction(int(nlo), int(dlo)), Fraction(int(nhi), int(dhi)))


def lower(x) -> Fraction:
    return endpoints(x)[0]


def upper(x) -> Fraction:
    return endpoints(x)[1]


def bounds_to_iv(b: Bounds) -> "iv.mpf":
    """Lift exact endpoint bounds back into the current interval context."""
    return iv.mpf([from_fraction(b[0]).a, from_fraction(b[1]).b])


def is_lt(x, y) -> Optional[bool]:
    """Certified strict x < y; None when the enclosures overlap."""
    xlo, xhi = endpoints(x)
    ylo, yhi = endpoints(y)
    if xhi < ylo:
        return True
    if xlo >= yhi:
        return False
    return None


def is_le(x, y) -> Optional[bool]:
    xlo, xhi = endpoints(x)
    ylo, yhi = endpoints(y)
    if xhi <= ylo:
        return True
    if xlo > yhi:
        return False
    return None


def sign(x) -> Optional[int]:
    lo, hi = endpoints(x)
    if lo > 0:
        return 1
    if hi < 0:
        return -1
    if lo == 0 and hi == 0:
        return 0
    return None


def dist_to_int(x) -> tuple[Fraction, Fraction, Optional[int]]:
    """Bounds for the distance from the (unknown) point in x to the nearest integer.

    Returns (lo, hi, k) where k is the integer nearest to the midpoint, or
    None when the enclosure is too wide to name one.
    """
    lo, hi = endpoints(x)
    if hi - lo >= 1:
        return (Fraction(0), Fraction(1, 2), None)
    k_lo = math.floor(lo)
    k_hi = math.ceil(hi)
    d_lo = None
    d_hi = None
    mid = (lo + hi) / 2
    best_k = None
    best_mid = None
    for k in range(k_lo, k_hi + 1):
        if k < lo:
            seg_lo, seg_hi = lo - k, hi - k
        elif k > hi:
            seg_lo, seg_hi = k - hi, k - lo
        else:
            seg_lo, seg_hi = Fraction(0), max(hi - k, k - lo)
        if d_lo is None or seg_lo < d_lo:
            d_lo = seg_lo
        if d_hi is None or seg_hi < d_hi:
            d_hi = seg_hi
        dm = abs(mid - k)
        if best_mid is None or dm < best_mid:
            best_mid, best_k = dm, k
    return (d_lo, min(d_hi, Fraction(1, 2)), best_k)


@dataclass(frozen=True)
class ComplexBox:
    """Rectangular complex enclosure with interval real and imaginary parts."""

    re: object
    im: object

    def __add__(self, other):
        if isinstance(other, ComplexBox):
            return ComplexBox(self.re + other.re, self.im + other.im)
        return ComplexBox(self.re + other, self.im)

    def __sub__(self, other):
        if isinstance(other, ComplexBox):
            return ComplexBox(self.re - other.re, self.im - other.im)
        return ComplexBox(self.re - other, self.im)

    def __mul__(self, other):
        if isinstance(other, ComplexBox):
            return ComplexBox(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        return ComplexBox(self.re * other, self.im * other)

    def __neg__(self):
        return ComplexBox(-self.re, -self.im)

    def conjugate(self):
        return ComplexBox(self.re, -self.im)

    def abs2(self):
        return isquare(self.re) + isquare(self.im)

    def modulus(self):
        return iv.sqrt(self.abs2())

    def powint(self, n: int) -> "ComplexBox":
        if n < 0:
            raise ValueError("negative exponent not supported for boxes")
        result = ComplexBox(iv.mpf(1), iv.mpf(0))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result


def resolve(compute: Callable[[int], object],
            decide: Callable[[object], Optional[object]],
            *,
            start: int = PREC_START,
            cap: int = PREC_CAP,
            what: str = "certified decision"):
    """Escalate precision until ``decide(compute(prec))`` returns a non-None value.

    ``compute`` runs inside an iv_prec(prec) block; ``decide`` inspects the
    result (typically via exact endpoints) with no context dependence.
    """
    for prec in precisions(start, cap):
        with iv_prec(prec):
            value = compute(prec)
        verdict = decide(value)
        if verdict is not None:
            return verdict
    raise PrecisionExhausted(what)


def certified_sign(compute: Callable[[int], object], *,
                   start: int = PREC_START, cap: int = PREC_CAP,
                   what: str = "sign") -> int:
    """Certified sign of a nonzero real given by an interval builder."""
    def decide(v):
        return sign(v)
    return resolve(compute, decide, start=start, cap=cap, what=what)
