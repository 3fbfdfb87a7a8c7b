"""Search for and certify Pisot units that generate a totally real field."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional

from mpmath import mp

from .balls import Ball, ball_prod
from .errors import Rejection
from .numberfield import (
    DEFAULT_PRECISION,
    GUARD_BITS,
    FieldElement,
    NumberField,
    embed,
    isolate_roots,
    minimal_polynomial,
    norm,
)
from .polynomial import IntPolynomial, cauchy_bound, isolate_real_root, sturm_count

REASONS = ("not-a-unit", "not-generating", "root-on-boundary", "wrong-root-distribution")


@dataclass(frozen=True)
class PisotCertificate:
    alpha: FieldElement
    minimal_poly: IntPolynomial
    norm: int
    sturm_evidence: dict
    dominant_lower_bound: Fraction
    dominant_upper_bound: Fraction
    dominant_root: Ball
    conjugates: tuple
    precision_bits: int = DEFAULT_PRECISION

    @property
    def degree(self) -> int:
        return self.minimal_poly.degree


class NotPisot(Rejection):
    pass


def generates_field(a: FieldElement) -> bool:
    return minimal_polynomial(a).degree == a.field.degree


def _require_totally_real(fld: NumberField):
    if not fld.is_totally_real:
        raise Rejection("not-totally-real", f"{fld} has signature {fld.signature}")


def is_pisot_unit(a: FieldElement, precision_bits: int = DEFAULT_PRECISION) -> PisotCertificate:
    """Certify ``a`` as a Pisot unit generating its field, or raise ``NotPisot``.

    Every decision is exact: the norm from the multiplication matrix, the root
    distribution from Sturm counts of the minimal polynomial.
    """
    fld = a.field
    _require_totally_real(fld)
    m = fld.degree
    mu = minimal_polynomial(a)
    if not mu.is_monic:
        raise NotPisot("not-a-unit", f"{a} is not integral (minimal polynomial {mu})")
    n = norm(a)
    if abs(n) != 1:
        raise NotPisot("not-a-unit", f"norm of {a} is {n}")
    if mu.degree != m:
        raise NotPisot("not-generating", f"minimal polynomial {mu} has degree {mu.degree} < {m}")
    if mu(1) == 0 or mu(-1) == 0:
        raise NotPisot("root-on-boundary", f"{mu} vanishes at ±1")
    above = sturm_count(mu, (1, None))
    inside = sturm_count(mu, (-1, 1))
    if above != 1 or inside != m - 1:
        raise NotPisot(
            "wrong-root-distribution",
            f"{mu}: {above} root(s) in (1, inf), {inside} in (-1, 1)",
        )
    return _certificate(a, mu, int(n), above, inside, precision_bits)


def _certificate(a, mu, n, above, inside, precision_bits):
    lo, hi = isolate_real_root(mu, Fraction(1), Fraction(cauchy_bound(mu)), Fraction(1, 2**20))
    while lo <= 1:
        lo, hi = isolate_real_root(mu, lo, hi, (hi - lo) / 2)
    roots = isolate_roots(mu.coefficients, precision_bits)
    dominant = roots[-1]
    return PisotCertificate(
        alpha=a,
        minimal_poly=mu,
        norm=n,
        sturm_evidence={"(1, inf)": above, "(-1, 1)": inside},
        dominant_lower_bound=lo,
        dominant_upper_bound=hi,
        dominant_root=dominant,
        conjugates=roots,
        precision_bits=precision_bits,
    )


def check_pisot_unit(a: FieldElement, precision_bits: int = DEFAULT_PRECISION):
    """Return ``(certificate, None)`` or ``(None, reason)``."""
    try:
        return is_pisot_unit(a, precision_bits), None
    except NotPisot as exc:
        return None, exc.reason


def dominant_in_distinguished_embedding(cert: PisotCertificate) -> bool:
    """True when alpha is the dominant conjugate under theta -> largest real root."""
    with mp.workprec(cert.precision_bits + GUARD_BITS):
        value = embed(cert.alpha, cert.precision_bits)[-1]
        return value.lower > 1


def _order_key(cert: PisotCertificate):
    return (
        cert.dominant_root.mid,
        0 if dominant_in_distinguished_embedding(cert) else 1,
        cert.alpha.coords,
    )


def find_pisot_unit(
    fld: NumberField,
    height: int,
    max_results: Optional[int] = None,
    precision_bits: int = DEFAULT_PRECISION,
) -> list:
    """Exhaustive scan of integer power-basis coordinates in ``[-height, height]^m``.

    Candidates pass a norm pre-filter before full certification. Results are
    ordered by dominant root, then by whether alpha itself is the dominant
    conjugate under the embedding sending theta to the largest root, then by
    coordinates.
    """
    _require_totally_real(fld)
    if fld.degree < 2:
        raise Rejection("bad-degree", "Pisot search needs a field of degree >= 2")
    if height < 0:
        raise ValueError("height must be non-negative")
    found = []
    rng = range(-height, height + 1)
    for coords in product(rng, repeat=fld.degree):
        if all(c == 0 for c in coords[1:]):
            continue
        a = FieldElement(fld, coords)
        if abs(norm(a)) != 1:
            continue
        cert, _ = check_pisot_unit(a, precision_bits)
        if cert is not None:
            found.append(cert)
    found.sort(key=_order_key)
    if max_results is not None:
        found = found[:max_results]
    return found


def conjugate_product(cert: PisotCertificate) -> Ball:
    with mp.workprec(cert.precision_bits + GUARD_BITS):
        return ball_prod(cert.conjugates)


def advisory_pisot_check(poly: IntPolynomial, precision_bits: int = DEFAULT_PRECISION) -> Optional[bool]:
    """Enclosure-based Pisot test for arbitrary signatures (not used in certificates).

    Returns ``None`` when some enclosure straddles the unit circle.
    """
    roots = isolate_roots(poly.coefficients, precision_bits)
    with mp.workprec(precision_bits + GUARD_BITS):
        above, inside = [], 0
        for r in roots:
            mod = abs(r)
            if mod.lower > 1:
                above.append(r)
            elif mod.upper < 1:
                inside += 1
            else:
                return None
        return len(above) == 1 and above[0].is_real and above[0].lower > 1 and inside == len(roots) - 1
