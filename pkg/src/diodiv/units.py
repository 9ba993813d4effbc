"""Units of a cubic field: bounded search, normalization, independence.

The search is an exhaustive scan over bounded integer coordinates; the
construction downstream only needs some units, not fundamental ones.
Normalization follows a fixed repertoire (invert if the identity embedding
is inside the unit circle, then square if a required sign fails), so the
output is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import iv

from . import intervals as ivl
from .cubicfield import CubicField, FieldElement, FieldEmbedder, elem_mul, elem_pow, norm
from .errors import CertificationFailure, InvalidInput, PrecisionExhausted
from .intervals import Bounds

DEFAULT_HEIGHT_BOUND = 12
_LOG_PREC = 64


@dataclass(frozen=True)
class Unit:
    """A field element of norm +-1 with certified log-embedding data."""

    element: FieldElement
    norm_sign: int
    log_embedding: tuple[Bounds, Bounds, Bounds]

    def height(self) -> int:
        return max(abs(int(c)) for c in self.element.coords)


def log_embedding(x: FieldElement, prec: int = _LOG_PREC) -> tuple[Bounds, Bounds, Bounds]:
    """Certified (log|x|, log|conj1(x)|, log|conj2(x)|)."""
    emb = FieldEmbedder(x.field)
    with ivl.iv_prec(prec + 32):
        idv = abs(emb.id_value(x, prec + 32))
        c1, c2 = emb.conj_boxes(x, prec + 32)
        return (
            ivl.endpoints(iv.log(idv)),
            ivl.endpoints(iv.log(c1.modulus())),
            ivl.endpoints(iv.log(c2.modulus())),
        )


def unit_from_element(x: FieldElement) -> Unit:
    n = norm(x)
    if abs(n) != 1:
        raise InvalidInput("element is not a unit")
    return Unit(element=x, norm_sign=int(n), log_embedding=log_embedding(x))


_make_unit = unit_from_element


def unit_search(field: CubicField, height_bound: int) -> list[Unit]:
    """All irrational units with integer coordinates bounded by height_bound.

    Deduplicated up to sign (the representative has its first nonzero
    coordinate positive), sorted by height then lexicographic coordinates.
    """
    if height_bound < 0:
        raise InvalidInput("height bound must be nonnegative")
    found = []
    seen = set()
    B = int(height_bound)
    for c0 in range(-B, B + 1):
        for c1 in range(-B, B + 1):
            for c2 in range(-B, B + 1):
                if c1 == 0 and c2 == 0:
                    continue  # rational, covers (0,0,0) and +-1
                coords = (c0, c1, c2)
                rep = coords
                for c in coords:
                    if c != 0:
                        if c < 0:
                            rep = tuple(-v for v in coords)
                        break
                if rep in seen:
                    continue
                x = field.element(*rep)
                n = norm(x)
                if abs(n) == 1:
                    seen.add(rep)
                    found.append(_make_unit(x))
    found.sort(key=lambda u: (u.height(), tuple(int(c) for c in u.element.coords)))
    return found


def _certified_abs_above_one(u: FieldElement, prec_cap: int) -> bool:
    """Certified |u| > 1 under the identity embedding (False means |u| < 1)."""
    emb = FieldEmbedder(u.field)

    def compute(prec):
        return abs(emb.id_value(u, prec)) - 1

    try:
        return ivl.certified_sign(compute, cap=prec_cap, what="|unit| vs 1") > 0
    except PrecisionExhausted:
        raise CertificationFailure(
            "identity embedding of the unit cannot be separated from 1; "
            "the input is not an infinite-order unit")


def _certified_id_sign(u: FieldElement, prec_cap: int) -> int:
    emb = FieldEmbedder(u.field)

    def compute(prec):
        return emb.id_value(u, prec)

    try:
        return ivl.certified_sign(compute, cap=prec_cap, what="sign of unit embedding")
    except PrecisionExhausted:
        raise CertificationFailure("could not certify the sign of a unit embedding")


def dominant_unit(u: Unit, prec_cap: int = ivl.PREC_CAP) -> Unit:
    """Return u, u**-1, or the square of either, certified > 1."""
    x = u.element
    if x.coords[1] == 0 and x.coords[2] == 0:
        raise InvalidInput("dominant normalization needs an irrational unit")
    if not _certified_abs_above_one(x, prec_cap):
        x = x.inverse()
    if _certified_id_sign(x, prec_cap) < 0:
        x = elem_mul(x, x)
    out = _make_unit(x)
    assert _certified_abs_above_one(out.element, prec_cap)
    return out


def _conj_signs_positive(x: FieldElement, prec_cap: int) -> bool:
    emb = FieldEmbedder(x.field)

    def compute_j(j):
        def compute(prec):
            return emb.conj_boxes(x, prec)[j].re
        return compute

    for j in (0, 1):
        s = ivl.certified_sign(compute_j(j), cap=prec_cap, what="conjugate sign")
        if s < 0:
            return False
    return True


def positive_pair(u1: Unit, u2: Unit,
                  prec_cap: int = ivl.PREC_CAP) -> tuple[Unit, Unit]:
    """Normalize a pair in a totally real field: both > 1 with positive conjugates."""
    if u1.element.field.signature != "totally-real":
        raise InvalidInput("positive normalization applies to totally real fields")
    out = []
    for u in (u1, u2):
        x = u.element
        if x.coords[1] == 0 and x.coords[2] == 0:
            raise InvalidInput("positive normalization needs irrational units")
        if not _certified_abs_above_one(x, prec_cap):
            x = x.inverse()
        if _certified_id_sign(x, prec_cap) < 0 or not _conj_signs_positive(x, prec_cap):
            x = elem_mul(x, x)
        out.append(_make_unit(x))
    return (out[0], out[1])


def independence_check(e1: Unit, e2: Unit,
                       prec_cap: int = ivl.PREC_CAP) -> Bounds:
    """Certified positive lower bound for the independence constant.

    The constant is |log e1 * log s1(e2) - log e2 * log s1(e1)| divided by
    |2 log s1(e2) + log e2|; it is labeling-independent, and a zero numerator
    means the pair is multiplicatively dependent.
    """
    x1, x2 = e1.element, e2.element
    if x1.field.signature != "totally-real":
        raise InvalidInput("independence constant is defined in the totally real case")
    emb = FieldEmbedder(x1.field)

    def compute(prec):
        l1 = iv.log(emb.id_value(x1, prec))
        l2 = iv.log(emb.id_value(x2, prec))
        s1 = iv.log(emb.conj_boxes(x1, prec)[0].re)
        s2 = iv.log(emb.conj_boxes(x2, prec)[0].re)
        num = l1 * s2 - l2 * s1
        den = 2 * s2 + l2
        return abs(num) / abs(den)

    for prec in ivl.precisions(cap=prec_cap):
        with ivl.iv_prec(prec):
            val = compute(prec)
        lo, hi = ivl.endpoints(val)
        if lo > 0:
            return (lo, hi)
    raise CertificationFailure(
        "independence constant cannot be certified nonzero; the units appear dependent")
