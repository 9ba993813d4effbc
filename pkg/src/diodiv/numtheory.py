"""Exact integer and rational primitives.

Factorization, the unit-exponent multiplier psi, p-adic valuations, gcd
helpers, continued-fraction convergents, and the certified constants that
cap the gcd of a well-approximating triple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import gmpy2
from mpmath import iv

from . import intervals as ivl
from .errors import InvalidInput, PrecisionExhausted

_TRIAL_LIMIT = 10 ** 6
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond 2**64 with the fixed base set."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """One nontrivial factor of an odd composite n (Brent's variant)."""
    if n % 2 == 0:
        return 2
    for c in range(1, 50):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
    raise InvalidInput(f"failed to factor {n}")


@dataclass(frozen=True)
class Factorization:
    """Prime factorization as (prime, exponent) pairs sorted by prime."""

    pairs: tuple[tuple[int, int], ...]

    def value(self) -> int:
        out = 1
        for p, e in self.pairs:
            out *= p ** e
        return out

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)


def factorize(n: int) -> Factorization:
    """Factor a positive integer by trial division plus a deterministic tail test."""
    n = int(n)
    if n <= 0:
        raise InvalidInput(f"factorize expects n >= 1, got {n}")
    if n == 1:
        return Factorization(())
    counts: dict[int, int] = {}
    rem = n
    p = 2
    while p <= _TRIAL_LIMIT and p * p <= rem:
        while rem % p == 0:
            counts[p] = counts.get(p, 0) + 1
            rem //= p
        p += 1 if p == 2 else 2
    stack = [rem] if rem > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.append(d)
        stack.append(m // d)
    pairs = tuple(sorted(counts.items()))
    assert math.prod(p ** e for p, e in pairs) == n
    return Factorization(pairs)


def psi(D: int) -> int:
    """D times the product of (p**6 - 1) over the distinct primes dividing D."""
    D = int(D)
    if D <= 0:
        raise InvalidInput(f"psi expects D >= 1, got {D}")
    out = D
    for p in factorize(D).primes():
        out *= p ** 6 - 1
    return out


def p_adic_valuation(n: int, p: int) -> int:
    """Largest v with p**v dividing n; rejects n = 0 (infinite valuation)."""
    n = int(n)
    if n == 0:
        raise InvalidInput("valuation of 0 is infinite")
    if p < 2 or not is_prime(p):
        raise InvalidInput(f"{p} is not prime")
    return int(gmpy2.remove(gmpy2.mpz(abs(n)), p)[1])


def triple_gcd(q: int, r: int, s: int) -> int:
    if q == 0 and r == 0 and s == 0:
        raise InvalidInput("gcd of (0, 0, 0) is undefined here")
    return math.gcd(math.gcd(abs(int(q)), abs(int(r))), abs(int(s)))


def convergents(x: Fraction) -> Iterator[tuple[int, int]]:
    """Continued-fraction convergents (p, q) of a rational, best first to last."""
    x = Fraction(x)
    num, den = x.numerator, x.denominator
    p_prev, p_cur = 0, 1
    q_prev, q_cur = 1, 0
    while den:
        a = num // den
        num, den = den, num - a * den
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        yield (p_cur, q_cur)


def _exact_cuberoot(q: Fraction) -> Fraction | None:
    """Exact rational cube root, or None when q is not a rational cube."""
    if q < 0:
        r = _exact_cuberoot(-q)
        return -r if r is not None else None
    rn, okn = gmpy2.iroot(gmpy2.mpz(q.numerator), 3)
    rd, okd = gmpy2.iroot(gmpy2.mpz(q.denominator), 3)
    if okn and okd:
        return Fraction(int(rn), int(rd))
    return None


@dataclass(frozen=True)
class GcdBound:
    """Certified enclosure of the gcd cap C**(-2/3) * max(1, C2**(2/3))."""

    lo: Fraction
    hi: Fraction
    ceiling: int


def gcd_bound_constant(C: Fraction, C2: Fraction,
                       prec_cap: int = ivl.PREC_CAP) -> GcdBound:
    """Certified value of the constant bounding the gcd of a reduced triple.

    Equals the cube root of max(1, C2)**2 / C**2, so a single rational cube
    root decides exactness.
    """
    C = Fraction(C)
    C2 = Fraction(C2)
    if C <= 0 or C2 <= 0:
        raise InvalidInput("constants must be positive")
    radicand = max(Fraction(1), C2) ** 2 / C ** 2
    exact = _exact_cuberoot(radicand)
    if exact is not None:
        return GcdBound(exact, exact, math.ceil(exact))
    for prec in ivl.precisions(cap=prec_cap):
        with ivl.iv_prec(prec):
            val = iv.exp(iv.log(ivl.from_fraction(radicand)) / 3)
        lo, hi = ivl.endpoints(val)
        if math.ceil(lo) == math.ceil(hi):
            return GcdBound(lo, hi, math.ceil(hi))
    raise PrecisionExhausted("ceiling of the gcd cap did not stabilize")


def gcd_cover_lcm(ceiling: int) -> int:
    """lcm(1, ..., ceiling); every admissible gcd divides this."""
    ceiling = int(ceiling)
    if ceiling < 1:
        raise InvalidInput("ceiling must be >= 1")
    return math.lcm(*range(1, ceiling + 1))
