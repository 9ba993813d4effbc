"""Exact arithmetic in a cubic number field Q(theta) in the power basis.

Elements carry reduced rational coordinates (c0, c1, c2) meaning
c0 + c1*theta + c2*theta^2. Traces and norms come from the power-sum
recurrence and the multiplication matrix, so they are exact rationals.
Embeddings are certified: real roots are refined to exact dyadic brackets
of prescribed width, the complex pair (when the field has one real
embedding) is derived from the real root by exact interval formulas.
"""

from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import gmpy2
from gmpy2 import mpz
from mpmath import iv, mp, mpf, workprec

from . import intervals as ivl
from .errors import CertificationFailure, InvalidInput, PrecisionExhausted
from .intervals import Bounds, ComplexBox


# ---------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class CubicPoly:
    """Monic cubic x^3 + a2*x^2 + a1*x + a0 with rational coefficients."""

    a2: Fraction
    a1: Fraction
    a0: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a2", Fraction(self.a2))
        object.__setattr__(self, "a1", Fraction(self.a1))
        object.__setattr__(self, "a0", Fraction(self.a0))

    def __call__(self, x: Fraction) -> Fraction:
        x = Fraction(x)
        return ((x + self.a2) * x + self.a1) * x + self.a0

    def derivative(self, x: Fraction) -> Fraction:
        x = Fraction(x)
        return (3 * x + 2 * self.a2) * x + self.a1

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in (self.a2, self.a1, self.a0))

    def discriminant(self) -> Fraction:
        a, b, c = self.a2, self.a1, self.a0
        return 18 * a * b * c - 4 * a ** 3 * c + a ** 2 * b ** 2 - 4 * b ** 3 - 27 * c ** 2

    def has_rational_root(self) -> bool:
        # monic integral cubic: any rational root is an integer dividing a0
        if not self.is_integral():
            raise InvalidInput("rational-root test expects integer coefficients")
        a0 = int(self.a0)
        if a0 == 0:
            return True
        for d in _divisors(abs(a0)):
            if self(d) == 0 or self(-d) == 0:
                return True
        return False


def _divisors(n: int):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return sorted(set(out))


_TERM_RE = re.compile(r"^([+-]?\d*)\*?(x(?:\^(\d))?)?$")


def poly_from_str(text: str) -> CubicPoly:
    """Parse 'x^3 + A*x^2 + B*x + C' (integer A, B, C, '*' optional)."""
    compact = text.replace(" ", "").replace("-", "+-")
    if compact.startswith("+"):
        compact = compact[1:]
    coeffs = {3: 0, 2: 0, 1: 0, 0: 0}
    for term in compact.split("+"):
        if not term:
            continue
        m = _TERM_RE.match(term)
        if not m:
            raise InvalidInput(f"cannot parse polynomial term {term!r} in {text!r}")
        coef_s, xpart = m.group(1), m.group(2)
        if xpart is None:
            if coef_s in ("", "-", "+"):
                raise InvalidInput(f"cannot parse polynomial term {term!r}")
            deg = 0
        else:
            deg = int(m.group(3)) if m.group(3) else 1
        if coef_s in ("", "+"):
            coef = 1
        elif coef_s == "-":
            coef = -1
        else:
            coef = int(coef_s)
        coeffs[deg] += coef
    if coeffs[3] != 1:
        raise InvalidInput(f"polynomial must be monic cubic in x: {text!r}")
    return CubicPoly(Fraction(coeffs[2]), Fraction(coeffs[1]), Fraction(coeffs[0]))


def poly_to_str(poly: CubicPoly) -> str:
    parts = ["x^3"]
    for coef, sym in ((poly.a2, "x^2"), (poly.a1, "x"), (poly.a0, "")):
        if coef == 0:
            continue
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        if sym and mag == 1:
            parts.append(f" {sign} {sym}")
        elif sym:
            parts.append(f" {sign} {mag}*{sym}")
        else:
            parts.append(f" {sign} {mag}")
    return "".join(parts)


# ---------------------------------------------------------------------------
# fields


class CubicField:
    """A cubic field fixed by an irreducible monic integer cubic.

    The identity embedding sends theta to the largest real root; the other
    embeddings are ordered ascending (totally real case) or as the complex
    pair with positive imaginary part first.
    """

    def __init__(self, poly: CubicPoly, discriminant: int, signature: str):
        self.poly = poly
        self.discriminant = discriminant
        self.signature = signature
        a2, a1, a0 = int(poly.a2), int(poly.a1), int(poly.a0)
        self._int_coeffs = (a2, a1, a0)
        # reduction rows: theta^3 and theta^4 in the power basis
        self._t3 = (mpz(-a0), mpz(-a1), mpz(-a2))
        self._t4 = (mpz(a2 * a0), mpz(a2 * a1 - a0), mpz(a2 * a2 - a1))
        self._power_sums = [3, -a2, a2 * a2 - 2 * a1]
        self._ps_lock = threading.Lock()
        self._brackets: Optional[list[tuple[Fraction, Fraction]]] = None
        self._root_lock = threading.Lock()

    # -- basic elements

    def element(self, c0, c1=0, c2=0) -> "FieldElement":
        return FieldElement(self, (Fraction(c0), Fraction(c1), Fraction(c2)))

    def zero(self) -> "FieldElement":
        return self.element(0)

    def one(self) -> "FieldElement":
        return self.element(1)

    def theta(self) -> "FieldElement":
        return self.element(0, 1, 0)

    def __eq__(self, other):
        return isinstance(other, CubicField) and self.poly == other.poly

    def __hash__(self):
        return hash(self.poly)

    def __repr__(self):
        return f"CubicField({poly_to_str(self.poly)})"

    # -- power sums Tr(theta^n)

    def power_sum(self, n: int) -> int:
        """Tr(theta^n), grown on demand through the integer linear recurrence."""
        if n < 0:
            raise InvalidInput("power sums are indexed by n >= 0")
        if n >= len(self._power_sums):
            with self._ps_lock:
                a2, a1, a0 = self._int_coeffs
                ps = self._power_sums
                while len(ps) <= n:
                    ps.append(-(a2 * ps[-1] + a1 * ps[-2] + a0 * ps[-3]))
        return self._power_sums[n]

    # -- real root brackets

    def _initial_brackets(self) -> list[tuple[Fraction, Fraction]]:
        poly = self.poly
        bound = Fraction(1) + max(abs(poly.a2), abs(poly.a1), abs(poly.a0))
        lo, hi = -bound, bound
        n_roots = 1 if self.signature == "one-real" else 3
        # subdivide until every sign change is isolated
        grid = [lo, hi]
        while True:
            changes = []
            for a, b in zip(grid, grid[1:]):
                fa, fb = poly(a), poly(b)
                if fa == 0:
                    # nudge the grid point off the root
                    return self._initial_brackets_shifted(grid, a)
                if fa * fb < 0:
                    changes.append((a, b))
            if len(changes) == n_roots:
                return changes
            grid = _refine_grid(grid)
            if len(grid) > 4096:
                raise CertificationFailure("failed to isolate real roots")

    def _initial_brackets_shifted(self, grid, bad_point):
        eps = Fraction(1, 1 << 20)
        new_grid = [g + eps if g == bad_point else g for g in grid]
        poly = self.poly
        changes = []
        for a, b in zip(new_grid, new_grid[1:]):
            if poly(a) * poly(b) < 0:
                changes.append((a, b))
        return changes

    def root_brackets(self, prec: int) -> list[tuple[Fraction, Fraction]]:
        """Exact dyadic brackets of width <= 2**-prec, ascending, one per real root."""
        with self._root_lock:
            if self._brackets is None:
                self._brackets = sorted(self._initial_brackets())
            tol = Fraction(1, 1 << prec)
            self._brackets = [
                _refine_bracket(self.poly, lo, hi, prec) if hi - lo > tol else (lo, hi)
                for lo, hi in self._brackets
            ]
            return list(self._brackets)


def _refine_grid(grid):
    out = [grid[0]]
    for a, b in zip(grid, grid[1:]):
        out.append((a + b) / 2)
        out.append(b)
    return out


def _sign_at(poly: CubicPoly, x: Fraction) -> int:
    # exact sign of a rational cubic at a rational point, via integers
    num, den = x.numerator, x.denominator
    a2, a1, a0 = poly.a2, poly.a1, poly.a0
    scale = math.lcm(a2.denominator, a1.denominator, a0.denominator)
    n = mpz(num)
    d = mpz(den)
    v = (scale * n * n * n
         + mpz(int(a2 * scale)) * n * n * d
         + mpz(int(a1 * scale)) * n * d * d
         + mpz(int(a0 * scale)) * d * d * d)
    return (v > 0) - (v < 0)


def _refine_bracket(poly: CubicPoly, lo: Fraction, hi: Fraction,
                    prec: int) -> tuple[Fraction, Fraction]:
    """Shrink a sign-change bracket to width <= 2**-prec (Newton with exact check)."""
    tol = Fraction(1, 1 << prec)
    sign_lo = _sign_at(poly, lo)
    if sign_lo == 0:
        return (lo, lo)
    # fast path: float/mpf Newton at generous precision, then exact verification
    guard = 32
    with workprec(prec + guard):
        mid0 = (lo + hi) / 2
        r = mpf(mid0.numerator) / mpf(mid0.denominator)
        c2, c1, c0 = [mpf(c.numerator) / mpf(c.denominator)
                      for c in (poly.a2, poly.a1, poly.a0)]
        for _ in range(prec.bit_length() + 64):
            f = ((r + c2) * r + c1) * r + c0
            fp = (3 * r + 2 * c2) * r + c1
            if fp == 0:
                break
            step = f / fp
            r = r - step
            if abs(step) < mpf(2) ** (-(prec + guard // 2)):
                break
        r_frac = Fraction(*mpmath_to_rational(r))
    d = tol / 4
    for _ in range(10):
        a, b = r_frac - d, r_frac + d
        if max(lo, a) < min(hi, b):
            a, b = max(lo, a), min(hi, b)
            if _sign_at(poly, a) == sign_lo and _sign_at(poly, b) == -sign_lo:
                return (a, b)
        d *= 16
    # guaranteed fallback: exact bisection
    while hi - lo > tol:
        mid = (lo + hi) / 2
        s = _sign_at(poly, mid)
        if s == 0:
            return (mid, mid)
        if s == sign_lo:
            lo = mid
        else:
            hi = mid
    return (lo, hi)


def mpmath_to_rational(x) -> tuple[int, int]:
    import mpmath
    return mpmath.libmp.to_rational(x._mpf_)


def field_create(poly: CubicPoly) -> CubicField:
    """Verify irreducibility, compute discriminant and signature exactly."""
    if not poly.is_integral():
        raise InvalidInput("field polynomial must have integer coefficients")
    if poly.has_rational_root():
        raise InvalidInput(f"{poly_to_str(poly)} is reducible over Q")
    disc = poly.discriminant()
    assert disc.denominator == 1
    disc = int(disc)
    if disc == 0:
        raise InvalidInput("zero discriminant")
    signature = "totally-real" if disc > 0 else "one-real"
    return CubicField(poly, disc, signature)


# ---------------------------------------------------------------------------
# elements


class FieldElement:
    __slots__ = ("field", "coords")

    def __init__(self, field: CubicField, coords):
        self.field = field
        self.coords = tuple(Fraction(c) for c in coords)

    # -- helpers

    def _check_same_field(self, other: "FieldElement"):
        if self.field != other.field:
            raise InvalidInput("elements belong to different fields")

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_rational(self) -> bool:
        return self.coords[1] == 0 and self.coords[2] == 0

    def has_integer_coords(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def __eq__(self, other):
        return (isinstance(other, FieldElement)
                and self.field == other.field and self.coords == other.coords)

    def __hash__(self):
        return hash((self.field.poly, self.coords))

    def __repr__(self):
        return f"FieldElement{self.coords}"

    # -- ring operations

    def __add__(self, other):
        if isinstance(other, FieldElement):
            self._check_same_field(other)
            return FieldElement(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))
        return FieldElement(self.field, (self.coords[0] + Fraction(other),) + self.coords[1:])

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return FieldElement(self.field, tuple(-c for c in self.coords))

    def __mul__(self, other):
        if isinstance(other, FieldElement):
            self._check_same_field(other)
            return elem_mul(self, other)
        q = Fraction(other)
        return FieldElement(self.field, tuple(c * q for c in self.coords))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise InvalidInput("zero is not invertible")
        cols = _mul_matrix_columns(self)
        det = _det3(cols)
        e1 = (Fraction(1), Fraction(0), Fraction(0))
        coords = []
        for i in range(3):
            m = [[cols[j][r] for j in range(3)] for r in range(3)]
            for r in range(3):
                m[r][i] = e1[r]
            coords.append(_det3_rows(m) / det)
        return FieldElement(self.field, coords)


def elem_mul(x: FieldElement, y: FieldElement) -> FieldElement:
    """Exact product reduced modulo the defining polynomial."""
    x._check_same_field(y)
    field = x.field
    if x.has_integer_coords() and y.has_integer_coords():
        a = tuple(mpz(c.numerator) for c in x.coords)
        b = tuple(mpz(c.numerator) for c in y.coords)
        r0, r1, r2 = _imul(field, a, b)
        return FieldElement(field, (Fraction(int(r0)), Fraction(int(r1)), Fraction(int(r2))))
    a0, a1, a2 = x.coords
    b0, b1, b2 = y.coords
    d0 = a0 * b0
    d1 = a0 * b1 + a1 * b0
    d2 = a0 * b2 + a1 * b1 + a2 * b0
    d3 = a1 * b2 + a2 * b1
    d4 = a2 * b2
    t3 = tuple(Fraction(int(t)) for t in field._t3)
    t4 = tuple(Fraction(int(t)) for t in field._t4)
    return FieldElement(field, (
        d0 + d3 * t3[0] + d4 * t4[0],
        d1 + d3 * t3[1] + d4 * t4[1],
        d2 + d3 * t3[2] + d4 * t4[2],
    ))


def _imul(field: CubicField, a, b):
    a0, a1, a2 = a
    b0, b1, b2 = b
    d0 = a0 * b0
    d1 = a0 * b1 + a1 * b0
    d2 = a0 * b2 + a1 * b1 + a2 * b0
    d3 = a1 * b2 + a2 * b1
    d4 = a2 * b2
    t3 = field._t3
    t4 = field._t4
    return (d0 + d3 * t3[0] + d4 * t4[0],
            d1 + d3 * t3[1] + d4 * t4[1],
            d2 + d3 * t3[2] + d4 * t4[2])


def elem_pow(x: FieldElement, n: int) -> FieldElement:
    """x**n by repeated squaring; negative n goes through the inverse."""
    n = int(n)
    if n < 0:
        return elem_pow(x.inverse(), -n)
    field = x.field
    if x.has_integer_coords():
        base = tuple(mpz(c.numerator) for c in x.coords)
        result = (mpz(1), mpz(0), mpz(0))
        while n:
            if n & 1:
                result = _imul(field, result, base)
            n >>= 1
            if n:
                base = _imul(field, base, base)
        return FieldElement(field, tuple(Fraction(int(c)) for c in result))
    result = field.one()
    base = x
    while n:
        if n & 1:
            result = elem_mul(result, base)
        n >>= 1
        if n:
            base = elem_mul(base, base)
    return result


def trace(x: FieldElement) -> Fraction:
    """Sum of the three embeddings, exact via the power sums."""
    f = x.field
    return (x.coords[0] * f.power_sum(0)
            + x.coords[1] * f.power_sum(1)
            + x.coords[2] * f.power_sum(2))


def _mul_matrix_columns(x: FieldElement):
    f = x.field
    theta = f.theta()
    col0 = x.coords
    col1 = elem_mul(x, theta).coords
    col2 = elem_mul(x, elem_mul(theta, theta)).coords
    return (col0, col1, col2)


def _det3(cols) -> Fraction:
    (a, d, g), (b, e, h), (c, f, i) = cols
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def _det3_rows(rows) -> Fraction:
    a, b, c = rows[0]
    d, e, f = rows[1]
    g, h, i = rows[2]
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def norm(x: FieldElement) -> Fraction:
    """Determinant of the multiplication matrix, exact."""
    return _det3(_mul_matrix_columns(x))


def char_poly(x: FieldElement) -> CubicPoly:
    """Monic cubic whose roots are the three embeddings of x."""
    e1 = trace(x)
    tr_sq = trace(elem_mul(x, x))
    e2 = (e1 * e1 - tr_sq) / 2
    e3 = norm(x)
    return CubicPoly(-e1, e2, -e3)


def is_algebraic_integer(x: FieldElement) -> bool:
    return char_poly(x).is_integral()


# ---------------------------------------------------------------------------
# embeddings


@dataclass(frozen=True)
class EmbeddingValues:
    """Certified enclosures of the three embeddings of an element.

    conj boxes are (re_bounds, im_bounds) pairs; in the totally real case the
    imaginary bounds are exactly (0, 0).
    """

    precision: int
    id_value: Bounds
    conj1: tuple[Bounds, Bounds]
    conj2: tuple[Bounds, Bounds]


def _eval_real(coords, root_iv):
    c0, c1, c2 = (ivl.from_fraction(c) for c in coords)
    return c0 + root_iv * (c1 + root_iv * c2)


def _eval_box(coords, box: ComplexBox) -> ComplexBox:
    c0, c1, c2 = (ivl.from_fraction(c) for c in coords)
    out = box * c2
    out = ComplexBox(out.re + c1, out.im)
    out = box * out
    return ComplexBox(out.re + c0, out.im)


def _coord_bits(x: FieldElement) -> int:
    return max(
        c.numerator.bit_length() + c.denominator.bit_length() for c in x.coords
    )


class FieldEmbedder:
    """Certified embedding evaluation for a fixed field.

    All builders must run inside an iv_prec block at the intended precision;
    the underlying root brackets are refined as far as the request needs.
    """

    def __init__(self, field: CubicField):
        self.field = field

    def theta_id(self, prec: int):
        brackets = self.field.root_brackets(prec)
        lo, hi = brackets[-1]
        return ivl.bounds_to_iv((lo, hi))

    def theta_conjugates(self, prec: int) -> tuple[ComplexBox, ComplexBox]:
        field = self.field
        brackets = field.root_brackets(prec)
        if field.signature == "totally-real":
            b1 = ivl.bounds_to_iv(brackets[0])
            b2 = ivl.bounds_to_iv(brackets[1])
            z = iv.mpf(0)
            return (ComplexBox(b1, z), ComplexBox(b2, z))
        rho = ivl.bounds_to_iv(brackets[0])
        a2 = ivl.from_fraction(field.poly.a2)
        a0 = ivl.from_fraction(field.poly.a0)
        re = (-a2 - rho) / 2
        mod2 = -a0 / rho
        im2 = mod2 - re * re
        im = iv.sqrt(im2)
        return (ComplexBox(re, im), ComplexBox(re, -im))

    def id_value(self, x: FieldElement, prec: int):
        return _eval_real(x.coords, self.theta_id(prec))

    def conj_boxes(self, x: FieldElement, prec: int) -> tuple[ComplexBox, ComplexBox]:
        b1, b2 = self.theta_conjugates(prec)
        return (_eval_box(x.coords, b1), _eval_box(x.coords, b2))


def embed(x: FieldElement, precision: int = 64,
          prec_cap: int = ivl.PREC_CAP) -> EmbeddingValues:
    """Certified boxes for the three embeddings of x at the requested precision."""
    if precision < 32:
        raise InvalidInput("precision must be at least 32 bits")
    if precision > prec_cap:
        raise PrecisionExhausted("requested precision above the configured cap")
    emb = FieldEmbedder(x.field)
    work = precision + _coord_bits(x) + 24
    with ivl.iv_prec(work):
        idv = ivl.endpoints(emb.id_value(x, work))
        c1, c2 = emb.conj_boxes(x, work)
        conj1 = (ivl.endpoints(c1.re), ivl.endpoints(c1.im))
        conj2 = (ivl.endpoints(c2.re), ivl.endpoints(c2.im))
    return EmbeddingValues(precision=precision, id_value=idv, conj1=conj1, conj2=conj2)


# ---------------------------------------------------------------------------
# the trace-orthogonal element


@dataclass(frozen=True)
class GammaData:
    """Trace-orthogonal element and its bookkeeping.

    element satisfies Tr(element) = Tr(element*alpha) = 0 exactly, is a
    positive algebraic integer together with element*alpha and element*beta,
    and Tr(element*beta) = tr_beta = +-scale. content is the gcd of
    Tr(element * theta^j) for j = 0, 1, 2 when alpha and beta have integer
    coordinates (it then divides every trace the witness pipeline takes),
    else 1.
    """

    element: FieldElement
    scale: int
    tr_beta: int
    content: int
    negated: bool


def gamma_construct(field: CubicField, alpha: FieldElement, beta: FieldElement,
                    prec_cap: int = ivl.PREC_CAP) -> GammaData:
    """Solve the trace conditions, scale minimally to integrality, certify sign."""
    basis = (field.one(), alpha, beta)
    rows = []
    theta_pows = (field.one(), field.theta(), elem_mul(field.theta(), field.theta()))
    for b in basis:
        rows.append([trace(elem_mul(b, tp)) for tp in theta_pows])
    det = _det3_rows(rows)
    if det == 0:
        raise InvalidInput("(1, alpha, beta) is not a basis: trace Gram matrix is singular")
    rhs = (Fraction(0), Fraction(0), Fraction(1))
    coords = []
    for i in range(3):
        m = [row[:] for row in rows]
        for r in range(3):
            m[r][i] = rhs[r]
        coords.append(_det3_rows(m) / det)
    gamma0 = FieldElement(field, coords)

    # minimal positive integer scale making gamma, gamma*alpha, gamma*beta integral
    prime_exp: dict[int, int] = {}
    for el in (gamma0, elem_mul(gamma0, alpha), elem_mul(gamma0, beta)):
        cp = char_poly(el)
        for coeff, weight in ((cp.a2, 1), (cp.a1, 2), (cp.a0, 3)):
            den = coeff.denominator
            if den == 1:
                continue
            from .numtheory import factorize
            for p, e in factorize(den).pairs:
                need = -(-e // weight)  # ceil(e / weight)
                if prime_exp.get(p, 0) < need:
                    prime_exp[p] = need
    scale = 1
    for p, e in prime_exp.items():
        scale *= p ** e
    gamma = scale * gamma0

    for el in (gamma, elem_mul(gamma, alpha), elem_mul(gamma, beta)):
        if not is_algebraic_integer(el):
            raise CertificationFailure("integrality scaling failed")
    assert trace(gamma) == 0 and trace(elem_mul(gamma, alpha)) == 0
    tr_beta = trace(elem_mul(gamma, beta))
    assert tr_beta.denominator == 1 and abs(int(tr_beta)) == scale

    emb = FieldEmbedder(field)

    def compute(prec):
        return emb.id_value(gamma, prec)

    try:
        sgn = ivl.certified_sign(compute, cap=prec_cap, what="sign of the trace-orthogonal element")
    except PrecisionExhausted:
        raise CertificationFailure("could not certify the sign of the trace-orthogonal element")
    negated = sgn < 0
    if negated:
        gamma = -gamma
        tr_beta = -tr_beta

    if alpha.has_integer_coords() and beta.has_integer_coords():
        traces = [trace(elem_mul(gamma, tp)) for tp in theta_pows]
        assert all(t.denominator == 1 for t in traces)
        content = math.gcd(*[abs(int(t)) for t in traces])
    else:
        content = 1
    return GammaData(element=gamma, scale=scale, tr_beta=int(tr_beta),
                     content=max(content, 1), negated=negated)


# ---------------------------------------------------------------------------
# element parsing / formatting (CLI surface)


def element_from_str(field: CubicField, text: str) -> FieldElement:
    """Parse 't', 't^2', or '(c0, c1, c2) / d' with 'num/den' components."""
    s = text.strip().replace(" ", "")
    if s in ("t", "theta", "x"):
        return field.theta()
    if s in ("t^2", "theta^2", "x^2"):
        return field.element(0, 0, 1)
    if s in ("t^3", "theta^3", "x^3"):
        return elem_pow(field.theta(), 3)
    m = re.match(r"^\(([^()]*)\)(?:/(\-?\d+))?$", s)
    if not m:
        try:
            return field.element(Fraction(s))
        except ValueError:
            raise InvalidInput(f"cannot parse element {text!r}")
    comps = m.group(1).split(",")
    if len(comps) != 3:
        raise InvalidInput(f"element needs three coordinates: {text!r}")
    try:
        coords = [Fraction(c) for c in comps]
    except ValueError:
        raise InvalidInput(f"cannot parse element coordinates in {text!r}")
    if m.group(2):
        d = int(m.group(2))
        if d == 0:
            raise InvalidInput("zero denominator")
        coords = [c / d for c in coords]
    return field.element(*coords)


def element_to_str(x: FieldElement) -> str:
    den = math.lcm(*[c.denominator for c in x.coords])
    nums = [int(c * den) for c in x.coords]
    body = "(" + ", ".join(str(n) for n in nums) + ")"
    return body if den == 1 else f"{body}/{den}"
