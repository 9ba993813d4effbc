"""Construction and certification of divisibility-constrained approximation
triples (Q, R, S) = traces of gamma * zeta**psi(M) against a basis (1, alpha,
beta) of a cubic field.

Q, R, S are always computed exactly in the field (power-basis exponentiation
by repeated squaring, then exact traces); floating point never touches them.
The inequality side (domination of the conjugate terms, the approximation
bounds, log Q) is certified with adaptive-precision interval arithmetic.

The only inexact inputs are the unit angles fed to the Dirichlet steps, and
those are certified too: an angle is accepted only when the strict
inequality resolves at some precision of the doubling schedule.
"""

from __future__ import annotations

import hashlib
import math
import time
from dataclasses import dataclass, replace
from decimal import Decimal, ROUND_CEILING, ROUND_FLOOR, localcontext
from fractions import Fraction
from typing import Callable, Optional

import gmpy2
from mpmath import iv

from . import intervals as ivl
from .cubicfield import (CubicField, FieldElement, FieldEmbedder, GammaData,
                         elem_mul, elem_pow, element_to_str, poly_to_str, trace)
from .errors import (CertificationFailure, InvalidInput, PrecisionExhausted,
                     WindowExhausted)
from .intervals import Bounds, ComplexBox
from .numtheory import convergents, psi, p_adic_valuation, triple_gcd
from .units import Unit

SCAN_LIMIT = 4096
ENLARGE_CAP = 64

PROV_ONE_REAL = "trace-a"
PROV_TOTALLY_REAL = "trace-b"
PROV_SEARCH = "recurrence-search"


# ---------------------------------------------------------------------------
# records


@dataclass(frozen=True)
class DirichletSolution:
    """Outcome of a Dirichlet approximation step.

    Exactly one of m / m_pair is set; target_norm holds certified bounds for
    the achieved distance (angle case) or linear-form value (pair case).
    """

    m: Optional[int]
    m_pair: Optional[tuple[int, int]]
    target_norm: Bounds


@dataclass(frozen=True)
class WitnessCertificate:
    q_positive: bool
    div_ok: bool
    gcd_value: int
    alpha_bound: Optional[Bounds]
    beta_bound: Optional[Bounds]
    log_q: Optional[Bounds]
    sandwich_ok: bool = True
    spread_ok: bool = True


@dataclass(frozen=True)
class Witness:
    """A triple (Q, R, S) with divisibility modulus D and certified bounds.

    D_factor is modulus/D: the construction works modulo D * D_factor, so
    divisibility by D survives the gcd reduction. provenance is one of
    trace-a, trace-b, recurrence-search.
    """

    Q: int
    R: int
    S: int
    D: int
    D_factor: int
    epsilon: Fraction
    provenance: str
    cert: WitnessCertificate
    precision_bits: int
    field_poly: str
    alpha: str
    beta: str
    gamma: str
    dirichlet: Optional[DirichletSolution] = None
    wall_time: float = 0.0

    def modulus(self) -> int:
        return self.D * self.D_factor


class _DivisibilityShortfall(Exception):
    def __init__(self, prime: int, deficit: int):
        self.prime = prime
        self.deficit = deficit
        super().__init__(f"divisibility shortfall at prime {prime} (deficit {deficit})")


# ---------------------------------------------------------------------------
# Dirichlet steps

CReal = Callable[[int], object]  # prec -> interval, called inside iv_prec(prec)


def dirichlet_angle(x_fn: CReal, eps: Fraction,
                    prec_cap: int = ivl.PREC_CAP) -> DirichletSolution:
    """Find m with 1 <= m <= 1/eps and certified ||m*x|| < eps.

    Small ranges are scanned exhaustively and the best multiplier wins;
    large ranges go through continued-fraction convergents of x.
    """
    eps = Fraction(eps)
    if not (0 < eps <= 1) or (1 / eps).denominator != 1:
        raise InvalidInput("eps must lie in (0, 1] with integer 1/eps")
    n = int(1 / eps)
    if n <= SCAN_LIMIT:
        for prec in ivl.precisions(cap=prec_cap):
            with ivl.iv_prec(prec):
                xv = x_fn(prec)
                cands = []
                for m in range(1, n + 1):
                    lo, hi, _ = ivl.dist_to_int(xv * m)
                    cands.append((hi, m, lo))
            hi, m, lo = min(cands)
            if hi < eps:
                return DirichletSolution(m=m, m_pair=None, target_norm=(lo, hi))
        raise PrecisionExhausted("could not certify the Dirichlet angle inequality")
    for prec in ivl.precisions(start=128, cap=prec_cap):
        with ivl.iv_prec(prec):
            xv = x_fn(prec)
            lo, hi = ivl.endpoints(xv)
            if hi - lo > Fraction(1, 1 << 64):
                continue
            approx = (lo + hi) / 2
            qs = [q for _, q in convergents(approx) if q <= n]
            for q in sorted(set(qs), reverse=True):
                d_lo, d_hi, _ = ivl.dist_to_int(xv * q)
                if d_hi < eps:
                    return DirichletSolution(m=q, m_pair=None, target_norm=(d_lo, d_hi))
    raise PrecisionExhausted("could not certify the Dirichlet angle inequality")


def dirichlet_pair(l1_fn: CReal, l2_fn: CReal, bound: Fraction,
                   prec_cap: int = ivl.PREC_CAP) -> DirichletSolution:
    """Integers (m1, m2), 0 < |m1| < bound, with |m1*L1 + m2*L2| <= |L2|/bound."""
    bound = Fraction(bound)
    if bound <= 1:
        raise InvalidInput("pair bound must exceed 1")
    n_max = math.ceil(bound) - 1
    for prec in ivl.precisions(start=128, cap=prec_cap):
        with ivl.iv_prec(prec):
            l1 = l1_fn(prec)
            l2 = l2_fn(prec)
            if ivl.sign(l2) is None:
                continue
            t = l1 / l2
            tlo, thi = ivl.endpoints(t)
            if thi - tlo > Fraction(1, 1 << 64):
                continue
            approx = (tlo + thi) / 2
            cands = [(p, q) for p, q in convergents(approx) if 1 <= q <= n_max]
            target = abs(l2) * ivl.from_fraction(1 / bound)
            for p, q in sorted(cands, key=lambda pq: -pq[1]):
                form = abs(l1 * q - l2 * p)
                if ivl.upper(form) <= ivl.lower(target):
                    return DirichletSolution(
                        m=None, m_pair=(q, -p), target_norm=ivl.endpoints(form))
    raise PrecisionExhausted("could not certify the Dirichlet pair inequality")


# ---------------------------------------------------------------------------
# shared certification helpers


def _exact_integer_trace(x: FieldElement) -> int:
    t = trace(x)
    if t.denominator != 1:
        raise CertificationFailure("trace expected to be an integer")
    return int(t)


def _decide_all(checks: list[Optional[bool]]) -> Optional[bool]:
    if any(c is False for c in checks):
        return False
    if all(c is True for c in checks):
        return True
    return None


def _tight(bounds: Bounds, rel: Fraction = Fraction(1, 1 << 12)) -> bool:
    lo, hi = bounds
    if hi <= 0:
        return True
    return (hi - lo) <= rel * abs(hi)


def _sqrt_int(n: int):
    return iv.sqrt(ivl.from_int(n))


# ---------------------------------------------------------------------------
# case a: unique real embedding


def construct_one_real(field: CubicField, alpha: FieldElement, beta: FieldElement,
                       gdata: GammaData, eta: Unit, D: int, eps: Fraction,
                       prec_cap: int = ivl.PREC_CAP,
                       enlarge_cap: int = ENLARGE_CAP) -> Witness:
    """Unreduced witness for a field with one real embedding.

    The modulus may be enlarged by a bounded integer factor when the
    conjugate-domination hypotheses need a larger modulus; the factor is
    recorded in D_factor.
    """
    t_start = time.time()
    if field.signature != "one-real":
        raise InvalidInput("construction requires a field with one real embedding")
    D = int(D)
    if D < 1:
        raise InvalidInput("D must be >= 1")
    eps = Fraction(eps)
    emb = FieldEmbedder(field)
    gamma = gdata.element
    eta_el = eta.element

    for factor in range(1, enlarge_cap + 1):
        modulus = factor * D
        psi_m = psi(modulus)

        def x_fn(prec, _psi=psi_m):
            box = emb.conj_boxes(eta_el, prec)[0]
            tau = iv.atan2(box.im, box.re)
            return ivl.from_int(_psi) * tau / iv.pi

        dsol = dirichlet_angle(x_fn, eps, prec_cap)
        m = dsol.m
        N = m * psi_m

        verdict = _certify_domination(emb, gamma, eta_el, N, prec_cap)
        if verdict is False:
            continue

        power = elem_pow(eta_el, N)
        Q = _exact_integer_trace(elem_mul(gamma, power))
        R = _exact_integer_trace(elem_mul(elem_mul(gamma, alpha), power))
        S = _exact_integer_trace(elem_mul(elem_mul(gamma, beta), power))
        if Q <= 0:
            raise CertificationFailure("Q must be positive once domination holds")
        if Q % modulus or R % modulus:
            raise CertificationFailure("trace divisibility failed: implementation bug")

        cert, prec_used = _certify_witness_bounds(
            field, emb, alpha, beta, gamma, eta_el, None, N, psi_m,
            Q, R, S, eps, prec_cap, case="a")
        return Witness(
            Q=Q, R=R, S=S, D=D, D_factor=factor, epsilon=eps,
            provenance=PROV_ONE_REAL, cert=cert, precision_bits=prec_used,
            field_poly=poly_to_str(field.poly), alpha=element_to_str(alpha),
            beta=element_to_str(beta), gamma=element_to_str(gamma),
            dirichlet=dsol, wall_time=time.time() - t_start)
    raise CertificationFailure("modulus enlargement cap exceeded")


def _certify_domination(emb: FieldEmbedder, gamma: FieldElement,
                        zeta: FieldElement, N: int,
                        prec_cap: int) -> Optional[bool]:
    """Certified |conj_j(gamma)| * |conj_j(zeta)|**N <= gamma * zeta**N / 4."""
    for prec in ivl.precisions(cap=prec_cap):
        with ivl.iv_prec(prec):
            g_id = iv.log(emb.id_value(gamma, prec))
            z_id = iv.log(abs(emb.id_value(zeta, prec)))
            rhs = g_id + N * z_id - iv.log(iv.mpf(4))
            checks = []
            gb = emb.conj_boxes(gamma, prec)
            zb = emb.conj_boxes(zeta, prec)
            for j in (0, 1):
                lhs = iv.log(gb[j].modulus()) + N * iv.log(zb[j].modulus())
                checks.append(ivl.is_le(lhs, rhs))
        verdict = _decide_all(checks)
        if verdict is not None:
            return verdict
    raise PrecisionExhausted("conjugate domination undecided")


def _certify_witness_bounds(field, emb, alpha, beta, gamma, base_el, zeta_el,
                            N, psi_m, Q, R, S, eps, prec_cap, case):
    """Certified alpha/beta bounds, log Q, the sandwich, and box containment.

    case 'a': conjugate values are the complex pair of base_el**N.
    case 'b': zeta_el**psi_m with positive real conjugates.
    """
    for prec in ivl.precisions(start=128, cap=prec_cap):
        with ivl.iv_prec(prec):
            if case == "a":
                zbox = emb.conj_boxes(base_el, prec)[0].powint(N)
                zconj = (zbox, zbox.conjugate())
                id_pow = abs(emb.id_value(base_el, prec)) ** N
            else:
                zb = emb.conj_boxes(zeta_el, prec)
                z1 = iv.exp(psi_m * iv.log(zb[0].re))
                z2 = iv.exp(psi_m * iv.log(zb[1].re))
                zconj = (ComplexBox(z1, iv.mpf(0)), ComplexBox(z2, iv.mpf(0)))
                id_pow = iv.exp(psi_m * iv.log(emb.id_value(zeta_el, prec)))

            g_id = emb.id_value(gamma, prec)
            gb = emb.conj_boxes(gamma, prec)
            a_id = emb.id_value(alpha, prec)
            ab = emb.conj_boxes(alpha, prec)
            b_id = emb.id_value(beta, prec)
            bb = emb.conj_boxes(beta, prec)

            def residual(x_id, xb):
                total = iv.mpf(0)
                for j in (0, 1):
                    diff = ComplexBox(x_id - xb[j].re, -xb[j].im)
                    term = gb[j] * diff * zconj[j]
                    total = total + term.re
                return total

            alpha_res = residual(a_id, ab)
            beta_res = residual(b_id, bb)
            sq = _sqrt_int(Q)
            alpha_bound = ivl.endpoints(sq * abs(alpha_res))
            beta_bound = ivl.endpoints(sq * abs(beta_res))
            log_q = ivl.endpoints(iv.log(ivl.from_int(Q)))

            # sandwich: lower(gamma * zeta^N)/2 <= Q <= 3*upper/2
            main = g_id * id_pow
            mlo, mhi = ivl.endpoints(main)
            sandwich = (mlo / 2 <= Q <= 3 * mhi / 2)

            # containment: Q inside the sum of the three embedding boxes
            conj_sum = (gb[0] * zconj[0] + gb[1] * zconj[1])
            total = main + conj_sum.re
            tlo, thi = ivl.endpoints(total)
            containment = (tlo <= Q <= thi)

            # conjugate spread: |s1 - s2| <= 1/2 |s1| (totally real diagnostics)
            if case == "b":
                spread = abs(zconj[0].re - zconj[1].re)
                spread_ok = ivl.is_le(spread, abs(zconj[0].re) / 2)
            else:
                spread_ok = True
        if not containment:
            raise CertificationFailure("exact trace escaped its embedding enclosure")
        if not sandwich:
            continue
        if spread_ok is False:
            raise CertificationFailure("conjugate spread check failed after Dirichlet step")
        if spread_ok is None:
            continue
        if _tight(alpha_bound) and _tight(beta_bound):
            cert = WitnessCertificate(
                q_positive=Q > 0, div_ok=True, gcd_value=triple_gcd(Q, R, S),
                alpha_bound=alpha_bound, beta_bound=beta_bound, log_q=log_q,
                sandwich_ok=sandwich, spread_ok=bool(spread_ok))
            return cert, prec
    raise PrecisionExhausted("witness bound certification did not converge")


# ---------------------------------------------------------------------------
# case b: totally real


def _conjugate_log_spread(emb: FieldEmbedder, x: FieldElement, prec: int):
    zb = emb.conj_boxes(x, prec)
    return abs(iv.log(zb[0].re) - iv.log(zb[1].re))


def _order_by_spread(emb: FieldEmbedder, e1: Unit, e2: Unit,
                     cap: int = 4096) -> tuple[Unit, Unit]:
    """Label the pair so the second unit has the larger conjugate-log spread.

    The Dirichlet target scales with the reciprocal of that spread, so this
    keeps the multiplier m1, and with it log Q, as small as the pair allows.
    """
    for prec in ivl.precisions(cap=cap):
        with ivl.iv_prec(prec):
            s1 = _conjugate_log_spread(emb, e1.element, prec)
            s2 = _conjugate_log_spread(emb, e2.element, prec)
            v = ivl.is_lt(s1, s2)
        if v is True:
            return (e1, e2)
        if v is False:
            return (e2, e1)
    return (e1, e2)


def construct_totally_real(field: CubicField, alpha: FieldElement,
                           beta: FieldElement, gdata: GammaData,
                           e1: Unit, e2: Unit, D: int, eps: Fraction,
                           prec_cap: int = ivl.PREC_CAP,
                           enlarge_cap: int = ENLARGE_CAP) -> Witness:
    """Unreduced witness for a totally real field.

    The unit pair must be normalized (both > 1, positive conjugates) and
    multiplicatively independent.
    """
    t_start = time.time()
    if field.signature != "totally-real":
        raise InvalidInput("construction requires a totally real field")
    D = int(D)
    if D < 1:
        raise InvalidInput("D must be >= 1")
    eps = Fraction(eps)
    emb = FieldEmbedder(field)
    gamma = gdata.element

    from .units import independence_check
    eps1, eps2 = _order_by_spread(emb, e1, e2)
    m_const = independence_check(eps1, eps2, prec_cap)
    u1, u2 = eps1.element, eps2.element

    for factor in range(1, enlarge_cap + 1):
        modulus = factor * D
        psi_m = psi(modulus)
        bound = Fraction(psi_m) / eps
        if bound <= 1:
            continue

        def l_fn(u):
            def fn(prec):
                zb = emb.conj_boxes(u, prec)
                return iv.log(zb[0].re) - iv.log(zb[1].re)
            return fn

        dsol = dirichlet_pair(l_fn(u1), l_fn(u2), bound, prec_cap)
        m1, m2 = dsol.m_pair

        # orient the pair so the leading term of log zeta is positive
        def coeff_fn(prec):
            l1 = iv.log(emb.id_value(u1, prec))
            l2 = iv.log(emb.id_value(u2, prec))
            s1 = iv.log(emb.conj_boxes(u1, prec)[0].re)
            s2 = iv.log(emb.conj_boxes(u2, prec)[0].re)
            return (l1 * s2 - l2 * s1) / (2 * s2 + l2) * m1

        sgn = ivl.certified_sign(coeff_fn, cap=prec_cap, what="orientation of the unit exponents")
        if sgn < 0:
            m1, m2 = -m1, -m2
            dsol = replace(dsol, m_pair=(m1, m2))

        # modulus must be large enough for log(eps2)/psi <= independence constant
        with ivl.iv_prec(256):
            le2 = iv.log(emb.id_value(u2, 256))
        if ivl.upper(le2) / psi_m > m_const[0]:
            continue

        # certified log zeta > 0 and the sandwich against the independence constant
        def logz_fn(prec):
            return m1 * iv.log(emb.id_value(u1, prec)) + m2 * iv.log(emb.id_value(u2, prec))

        try:
            if ivl.certified_sign(logz_fn, cap=prec_cap, what="log zeta sign") <= 0:
                continue
        except PrecisionExhausted:
            continue
        with ivl.iv_prec(256):
            lz = logz_fn(256)
        lz_lo, lz_hi = ivl.endpoints(lz)
        sandwich_317 = (m_const[0] * max(1, abs(m1)) <= lz_hi
                        and lz_lo <= 3 * m_const[1] * abs(m1))
        if not sandwich_317:
            continue

        zeta = elem_mul(elem_pow(u1, m1), elem_pow(u2, m2))
        verdict = _certify_domination(emb, gamma, zeta, psi_m, prec_cap)
        if verdict is False:
            continue

        power = elem_pow(zeta, psi_m)
        Q = _exact_integer_trace(elem_mul(gamma, power))
        R = _exact_integer_trace(elem_mul(elem_mul(gamma, alpha), power))
        S = _exact_integer_trace(elem_mul(elem_mul(gamma, beta), power))
        if Q <= 0:
            raise CertificationFailure("Q must be positive once domination holds")
        if Q % modulus or R % modulus:
            raise CertificationFailure("trace divisibility failed: implementation bug")

        cert, prec_used = _certify_witness_bounds(
            field, emb, alpha, beta, gamma, None, zeta, None, psi_m,
            Q, R, S, eps, prec_cap, case="b")
        return Witness(
            Q=Q, R=R, S=S, D=D, D_factor=factor, epsilon=eps,
            provenance=PROV_TOTALLY_REAL, cert=cert, precision_bits=prec_used,
            field_poly=poly_to_str(field.poly), alpha=element_to_str(alpha),
            beta=element_to_str(beta), gamma=element_to_str(gamma),
            dirichlet=dsol, wall_time=time.time() - t_start)
    raise CertificationFailure("modulus enlargement cap exceeded")


# ---------------------------------------------------------------------------
# gcd reduction


def gcd_reduce(w: Witness, G: Optional[int], content: int = 1,
               target_D: Optional[int] = None) -> Witness:
    """Divide the triple by its gcd and re-verify divisibility by target_D.

    The reduced gcd (after stripping the structural content of gamma) must
    divide G when G is given; a violation means the calibrated constants
    were not honest bounds. Bounds only improve under the division and are
    rescaled accordingly.
    """
    if target_D is None:
        target_D = w.D
    g = triple_gcd(w.Q, w.R, w.S)
    g_reduced = g // math.gcd(g, content)
    if G is not None and G % g_reduced != 0:
        raise CertificationFailure(
            f"gcd {g} (content-normalized {g_reduced}) does not divide the cover {G}; "
            "the badly-approximable constant used for calibration was not a true lower bound")
    Q, R, S = w.Q // g, w.R // g, w.S // g
    if triple_gcd(Q, R, S) != 1:
        raise CertificationFailure("gcd reduction left a common factor")
    for p, e in _prime_powers(target_D):
        if Q % p ** e or R % p ** e:
            have = min(p_adic_valuation(Q, p) if Q else e,
                       p_adic_valuation(R, p) if R else e)
            raise _DivisibilityShortfall(p, e - have)
    modulus = w.modulus()
    if modulus % target_D:
        raise CertificationFailure("modulus is not a multiple of the target divisor")
    alpha_bound = w.cert.alpha_bound
    beta_bound = w.cert.beta_bound
    log_q = w.cert.log_q
    if g > 1 and alpha_bound is not None:
        with ivl.iv_prec(128):
            scale_iv = 1 / (_sqrt_int(g) * ivl.from_int(g))
            alpha_bound = ivl.endpoints(ivl.bounds_to_iv(alpha_bound) * scale_iv)
            beta_bound = ivl.endpoints(ivl.bounds_to_iv(beta_bound) * scale_iv)
            log_q = ivl.endpoints(iv.log(ivl.from_int(Q)))
    cert = WitnessCertificate(
        q_positive=Q > 0, div_ok=True, gcd_value=g,
        alpha_bound=alpha_bound, beta_bound=beta_bound, log_q=log_q,
        sandwich_ok=w.cert.sandwich_ok, spread_ok=w.cert.spread_ok)
    return replace(w, Q=Q, R=R, S=S, D=target_D, D_factor=modulus // target_D, cert=cert)


def _prime_powers(n: int):
    from .numtheory import factorize
    return factorize(n).pairs


# ---------------------------------------------------------------------------
# unit selection and full pipeline


def select_dominant_unit(field: CubicField, height_bound: int = 3,
                         prec_cap: int = ivl.PREC_CAP) -> Unit:
    """Deterministic unit choice: the candidate whose dominant normalization
    has the smallest log, ties broken by height then coordinates."""
    from .units import dominant_unit, unit_search
    cands = unit_search(field, height_bound)
    if not cands:
        raise CertificationFailure("no units found under the height bound")
    best = None
    for u in cands[:12]:
        d = dominant_unit(u, prec_cap)
        key = (d.log_embedding[0][1], u.height(),
               tuple(int(c) for c in u.element.coords))
        if best is None or key < best[0]:
            best = (key, d)
    return best[1]


def select_unit_pair(field: CubicField, height_bound: int = 3,
                     prec_cap: int = ivl.PREC_CAP) -> tuple[Unit, Unit]:
    """First multiplicatively independent normalized pair in search order."""
    from .units import independence_check, positive_pair, unit_search
    cands = unit_search(field, height_bound)
    for i in range(len(cands)):
        for j in range(i + 1, len(cands)):
            try:
                pair = positive_pair(cands[i], cands[j], prec_cap)
                independence_check(pair[0], pair[1], prec_cap)
                return pair
            except CertificationFailure:
                continue
    raise CertificationFailure("no independent unit pair under the height bound")


def build_witness(field: CubicField, alpha: FieldElement, beta: FieldElement,
                  D: int, eps: Fraction, *, gdata: Optional[GammaData] = None,
                  g_cover: Optional[int] = None,
                  units: Optional[tuple] = None,
                  prec_cap: int = ivl.PREC_CAP,
                  retries: int = 5) -> Witness:
    """Full pipeline: construct at a modulus covering the gcd reduction,
    reduce, and return a witness with gcd 1 and divisibility by D.

    For the one-real case the construction modulus starts at g_cover * D so
    the reduction provably lands on D. In the totally real case log Q grows
    with psi(modulus)**2, which makes a g_cover premultiplier prohibitively
    expensive; there the modulus starts at D and is raised by exactly the
    deficient prime power if the reduction ever falls short (the reduced gcd
    is capped by the badly-approximable constant, so bounded retries
    suffice).
    """
    from .cubicfield import gamma_construct
    if gdata is None:
        gdata = gamma_construct(field, alpha, beta)
    case_a = field.signature == "one-real"
    if units is None:
        units = (select_dominant_unit(field, prec_cap=prec_cap),) if case_a \
            else select_unit_pair(field, prec_cap=prec_cap)
    base = (g_cover or 1) * D if case_a else D
    extra = 1
    for _ in range(retries):
        modulus = base * extra
        if case_a:
            raw = construct_one_real(field, alpha, beta, gdata, units[0],
                                     modulus, eps, prec_cap)
        else:
            raw = construct_totally_real(field, alpha, beta, gdata, units[0],
                                         units[1], modulus, eps, prec_cap)
        try:
            return gcd_reduce(raw, g_cover, gdata.content, target_D=D)
        except _DivisibilityShortfall as short:
            extra *= short.prime ** short.deficit
    raise CertificationFailure("divisibility retries exhausted")


@dataclass(frozen=True)
class PadicProductRow:
    nu: int
    valuation: int
    log_q: Bounds
    product_upper: Fraction


def padic_product_table(field: CubicField, alpha: FieldElement,
                        beta: FieldElement, p: int, nu_max: int,
                        g_cover: Optional[int] = None,
                        prec_cap: int = ivl.PREC_CAP) -> list[PadicProductRow]:
    """Rows (nu, v_p(Q), log Q, upper bound of |Q|_p * log Q) for D = p**nu."""
    if nu_max < 1:
        raise InvalidInput("nu must be positive")
    from .numtheory import is_prime
    if not is_prime(p):
        raise InvalidInput(f"{p} is not prime")
    if field.signature != "one-real":
        raise InvalidInput("the product table is defined for the one-real case")
    rows = []
    for nu in range(1, nu_max + 1):
        w = build_witness(field, alpha, beta, p ** nu, Fraction(1),
                          g_cover=g_cover, prec_cap=prec_cap)
        v = p_adic_valuation(w.Q, p)
        if v < nu:
            raise CertificationFailure(f"valuation {v} below the target {nu}")
        product_upper = w.cert.log_q[1] / p ** v
        rows.append(PadicProductRow(nu=nu, valuation=v, log_q=w.cert.log_q,
                                    product_upper=product_upper))
    return rows


# ---------------------------------------------------------------------------
# serialization


def fraction_to_decimal(fr: Fraction, sig: int = 24, rounding=ROUND_FLOOR) -> str:
    with localcontext() as ctx:
        ctx.prec = sig
        ctx.rounding = rounding
        ctx.Emax = 10 ** 12
        ctx.Emin = -10 ** 12
        return str(Decimal(int(fr.numerator)) / Decimal(int(fr.denominator)))


def bounds_to_strings(b: Optional[Bounds]) -> Optional[list[str]]:
    if b is None:
        return None
    return [fraction_to_decimal(b[0], rounding=ROUND_FLOOR),
            fraction_to_decimal(b[1], rounding=ROUND_CEILING)]


def _int_str(n: int) -> str:
    return gmpy2.mpz(n).digits()


def witness_to_json(w: Witness) -> dict:
    return {
        "field": w.field_poly,
        "alpha": w.alpha,
        "beta": w.beta,
        "gamma": w.gamma,
        "D": w.D,
        "D_factor": w.D_factor,
        "eps": str(w.epsilon),
        "Q": _int_str(w.Q),
        "R": _int_str(w.R),
        "S": _int_str(w.S),
        "gcd_before_reduction": w.cert.gcd_value,
        "bounds": {
            "alpha": bounds_to_strings(w.cert.alpha_bound),
            "beta": bounds_to_strings(w.cert.beta_bound),
            "logQ": bounds_to_strings(w.cert.log_q),
        },
        "provenance": w.provenance,
        "precision_bits": w.precision_bits,
        "wall_time": round(w.wall_time, 3),
    }


def triple_digest(w: Witness) -> str:
    payload = f"{_int_str(w.Q)}|{_int_str(w.R)}|{_int_str(w.S)}".encode()
    return hashlib.sha256(payload).hexdigest()
