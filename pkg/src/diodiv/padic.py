"""p-adic verification tools: Newton polygons over exact characteristic
polynomials, congruence depth of huge unit powers, trace divisibility, and
fast modular trace recurrences used as independent oracles.

Conjugate valuations come from Newton polygons of exact characteristic
polynomials, so no p-adic root finding or precision management is needed.
For huge exponents the power is taken with coordinates reduced modulo a
prime power comfortably above every valuation threshold in play; residue
valuations below the cap are exact, zero residues are reported saturated.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from gmpy2 import mpz

from .cubicfield import (CubicField, CubicPoly, FieldElement, char_poly,
                         elem_mul, elem_pow, norm, trace)
from .errors import InvalidInput
from .numtheory import is_prime, p_adic_valuation, psi

EXACT_EXPONENT_CUTOFF = 1 << 20


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower hull data of (exponent, valuation) points of a monic cubic.

    slopes holds the three root valuations in nondecreasing order; None
    stands for +infinity (a zero root split off the polynomial).
    """

    prime: int
    points: tuple[tuple[int, Optional[int]], ...]
    slopes: tuple[Optional[Fraction], ...]


def _vp_fraction(q: Fraction, p: int) -> Optional[int]:
    if q == 0:
        return None
    v = 0
    num, den = q.numerator, q.denominator
    if num % p == 0:
        v = p_adic_valuation(num, p)
    elif den % p == 0:
        v = -p_adic_valuation(den, p)
    return v


def newton_polygon(cp: CubicPoly, p: int) -> NewtonPolygon:
    """Root valuations of a monic cubic from the lower hull of coefficient valuations."""
    if not is_prime(p):
        raise InvalidInput(f"{p} is not prime")
    coeffs = [cp.a0, cp.a1, cp.a2, Fraction(1)]
    points = tuple((i, _vp_fraction(c, p)) for i, c in enumerate(coeffs))
    # split off zero roots (infinite valuation)
    k = 0
    while coeffs[k] == 0:
        k += 1
    finite = [(i, v) for i, v in points if v is not None]
    hull = _lower_hull(finite)
    slopes: list[Optional[Fraction]] = [None] * k
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        s = Fraction(y1 - y2, x2 - x1)  # root valuation = negated slope
        slopes.extend([s] * (x2 - x1))
    slopes_f = sorted([s for s in slopes if s is not None])
    slopes_all = tuple(slopes_f + [None] * k)
    return NewtonPolygon(prime=p, points=points, slopes=slopes_all)


def _lower_hull(pts):
    pts = sorted(pts)
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            x3, y3 = pt
            if (y2 - y1) * (x3 - x2) >= (y3 - y2) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


# ---------------------------------------------------------------------------
# congruence depth of unit powers


@dataclass(frozen=True)
class PowerCongruenceReport:
    """Outcome of checking that every conjugate of zeta**((p^6-1)p^nu) - 1
    has valuation strictly above nu - 1."""

    ok: bool
    prime: int
    nu: int
    valuations: tuple[Optional[Fraction], ...]
    vacuous: bool
    exact: bool
    saturation_cap: Optional[int]


def _require_p_adic_unit(zeta: FieldElement, p: int):
    np_z = newton_polygon(char_poly(zeta), p)
    if any(s != 0 for s in np_z.slopes):
        raise InvalidInput(
            f"element is not a p-adic unit at p={p}: slopes {np_z.slopes}")


def _mod_pow_coords(field: CubicField, coords, n: int, modulus: int):
    base = tuple(mpz(c) % modulus for c in coords)
    result = (mpz(1), mpz(0), mpz(0))
    t3 = tuple(t % modulus for t in field._t3)
    t4 = tuple(t % modulus for t in field._t4)

    def mul(a, b):
        a0, a1, a2 = a
        b0, b1, b2 = b
        d0 = a0 * b0
        d1 = a0 * b1 + a1 * b0
        d2 = a0 * b2 + a1 * b1 + a2 * b0
        d3 = a1 * b2 + a2 * b1
        d4 = a2 * b2
        return ((d0 + d3 * t3[0] + d4 * t4[0]) % modulus,
                (d1 + d3 * t3[1] + d4 * t4[1]) % modulus,
                (d2 + d3 * t3[2] + d4 * t4[2]) % modulus)

    while n:
        if n & 1:
            result = mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


def _char_poly_coeffs_mod(field: CubicField, coords, modulus: int):
    """Characteristic polynomial coefficients of an integer-coordinate element,
    modulo `modulus`, via the multiplication matrix (no divisions)."""
    c0, c1, c2 = (mpz(c) % modulus for c in coords)
    t3 = field._t3
    t4 = field._t4
    theta = (mpz(0), mpz(1), mpz(0))
    theta2 = (mpz(0), mpz(0), mpz(1))

    def mul(a, b):
        a0, a1, a2 = a
        b0, b1, b2 = b
        d0 = a0 * b0
        d1 = a0 * b1 + a1 * b0
        d2 = a0 * b2 + a1 * b1 + a2 * b0
        d3 = a1 * b2 + a2 * b1
        d4 = a2 * b2
        return ((d0 + d3 * t3[0] + d4 * t4[0]) % modulus,
                (d1 + d3 * t3[1] + d4 * t4[1]) % modulus,
                (d2 + d3 * t3[2] + d4 * t4[2]) % modulus)

    x = (c0, c1, c2)
    cols = (x, mul(x, theta), mul(x, theta2))
    a = [[cols[j][i] for j in range(3)] for i in range(3)]
    tr = (a[0][0] + a[1][1] + a[2][2]) % modulus
    minors = (a[1][1] * a[2][2] - a[1][2] * a[2][1]
              + a[0][0] * a[2][2] - a[0][2] * a[2][0]
              + a[0][0] * a[1][1] - a[0][1] * a[1][0]) % modulus
    det = (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
           - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
           + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])) % modulus
    # char poly x^3 - tr x^2 + minors x - det
    return ((-tr) % modulus, minors % modulus, (-det) % modulus)


def check_power_congruence(field: CubicField, zeta: FieldElement, p: int, nu: int,
                           exact_cutoff: int = EXACT_EXPONENT_CUTOFF) -> PowerCongruenceReport:
    """Verify that all conjugate valuations of zeta**((p^6-1)*p^nu) - 1 exceed nu - 1."""
    if nu < 1:
        raise InvalidInput("nu must be a positive integer")
    if not is_prime(p):
        raise InvalidInput(f"{p} is not prime")
    if not zeta.has_integer_coords():
        raise InvalidInput("zeta must have integer coordinates")
    _require_p_adic_unit(zeta, p)
    exponent = (p ** 6 - 1) * p ** nu
    threshold = Fraction(nu - 1)

    if exponent <= exact_cutoff:
        y = elem_pow(zeta, exponent) - field.one()
        if y.is_zero():
            return PowerCongruenceReport(
                ok=True, prime=p, nu=nu, valuations=(None, None, None),
                vacuous=True, exact=True, saturation_cap=None)
        np_y = newton_polygon(char_poly(y), p)
        ok = all(s is None or s > threshold for s in np_y.slopes)
        return PowerCongruenceReport(
            ok=ok, prime=p, nu=nu, valuations=np_y.slopes,
            vacuous=False, exact=True, saturation_cap=None)

    # modular path: valuations needed are at most nu + 1 per root, 3(nu+1) total
    cap = 3 * (nu + 2)
    modulus = p ** cap
    coords = tuple(int(c) for c in zeta.coords)
    ypow = _mod_pow_coords(field, coords, exponent, modulus)
    y_coords = (int(ypow[0]) - 1, int(ypow[1]), int(ypow[2]))
    cs = _char_poly_coeffs_mod(field, y_coords, modulus)
    pts = []
    saturated = False
    for i, c in enumerate((cs[2], cs[1], cs[0])):  # a0, a1, a2 residues
        r = int(c)
        if r == 0:
            pts.append((i, cap))
            saturated = True
        else:
            pts.append((i, p_adic_valuation(r, p)))
    pts.append((3, 0))
    hull = _lower_hull(pts)
    slopes: list[Fraction] = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slopes.extend([Fraction(y1 - y2, x2 - x1)] * (x2 - x1))
    slopes_t = tuple(sorted(slopes))
    ok = all(s > threshold for s in slopes_t)
    return PowerCongruenceReport(
        ok=ok, prime=p, nu=nu, valuations=slopes_t,
        vacuous=False, exact=not saturated, saturation_cap=cap)


# ---------------------------------------------------------------------------
# trace divisibility


@dataclass(frozen=True)
class TraceDivisibilityReport:
    ok: bool
    modulus: int
    residue: int
    trace_value: int


def check_trace_divisibility(field: CubicField, theta_el: FieldElement,
                             zeta: FieldElement, D: int) -> TraceDivisibilityReport:
    """Exact check that D divides Tr(theta_el * zeta**psi(D)).

    Hypotheses (trace zero, integrality, unit zeta) are enforced up front
    with a distinct error; a False result is an honest counterexample.
    """
    D = int(D)
    if D < 1:
        raise InvalidInput("modulus D must be >= 1")
    if trace(theta_el) != 0:
        raise InvalidInput("hypothesis violated: element has nonzero trace")
    from .cubicfield import is_algebraic_integer
    if not is_algebraic_integer(theta_el):
        raise InvalidInput("hypothesis violated: element is not an algebraic integer")
    if abs(norm(zeta)) != 1:
        raise InvalidInput("hypothesis violated: zeta is not a unit")
    t = trace(elem_mul(theta_el, elem_pow(zeta, psi(D))))
    if t.denominator != 1:
        raise InvalidInput("trace is not an integer; inputs are not integral")
    t = int(t)
    return TraceDivisibilityReport(ok=t % D == 0, modulus=D, residue=t % D, trace_value=t)


def trace_power_mod(field: CubicField, x: FieldElement, n: int, modulus: int) -> int:
    """Tr(c0*theta^n + c1*theta^(n+1) + c2*theta^(n+2)) mod modulus.

    Uses the mod-m power-sum recurrence through a 3x3 matrix power, so the
    cost is O(log n) small-matrix products. Independent of the exact
    big-integer route, which makes it a useful cross-check.
    """
    if modulus < 1:
        raise InvalidInput("modulus must be >= 1")
    if n < 0:
        raise InvalidInput("n must be nonnegative")
    if not x.has_integer_coords():
        raise InvalidInput("x must have integer coordinates")
    a2, a1, a0 = field._int_coeffs
    m = modulus
    # state (p_{k+2}, p_{k+1}, p_k); step matrix from the linear recurrence
    mat = ((-a2 % m, -a1 % m, -a0 % m), (1, 0, 0), (0, 1, 0))
    state = (field.power_sum(2) % m, field.power_sum(1) % m, field.power_sum(0) % m)

    def mat_mul(A, B):
        return tuple(
            tuple(sum(A[i][k] * B[k][j] for k in range(3)) % m for j in range(3))
            for i in range(3))

    def mat_vec(A, v):
        return tuple(sum(A[i][k] * v[k] for k in range(3)) % m for i in range(3))

    power = mat
    k = n
    acc = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    while k:
        if k & 1:
            acc = mat_mul(acc, power)
        k >>= 1
        if k:
            power = mat_mul(power, power)
    p_n2, p_n1, p_n = mat_vec(acc, state)
    c0, c1, c2 = (int(c) % m for c in x.coords)
    return (c0 * p_n + c1 * p_n1 + c2 * p_n2) % m
