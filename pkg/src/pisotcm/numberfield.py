"""Number fields Q[x]/(g) with exact elements and certified complex embeddings."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

import mpmath
from mpmath import mp, mpc, mpf

from . import linalg
from .balls import Ball
from .errors import FieldMismatchError, PrecisionExhausted, Rejection
from .polynomial import (
    IntPolynomial,
    irreducibility,
    is_squarefree,
    qdivmod,
    qgcd,
    qderiv,
    qmul,
    qxgcd,
    sturm_count,
)

log = logging.getLogger(__name__)

DEFAULT_PRECISION = 128
GUARD_BITS = 24
MAX_REFINEMENTS = 5


# ---- certified root isolation ----------------------------------------------

def _horner(coeffs, z: Ball) -> Ball:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) <= 1:
        # constants embed exactly
        return Ball.exact(coeffs[0] if coeffs else 0)
    acc = Ball(0)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _inclusion_radius(coeffs, deriv, z) -> mpf:
    """Radius of a disk around ``z`` certain to contain a root: deg * |p(z)| / |p'(z)|."""
    zb = Ball(z)
    num = _horner(coeffs, zb).abs_upper()
    den = _horner(deriv, zb).abs_lower()
    if den <= 0:
        return mpmath.inf
    n = len(coeffs) - 1
    return mpmath.fmul(n, mpmath.fdiv(num, den, rounding="u"), rounding="u")


def _newton(coeffs, deriv, z, steps=6):
    for _ in range(steps):
        dp = mpmath.polyval(deriv[::-1], z)
        if dp == 0:
            break
        z = z - mpmath.polyval(coeffs[::-1], z) / dp
    return z


def _approximate_roots(coeffs, extra):
    desc = [mpf(c) for c in reversed(coeffs)]
    if len(desc) == 2:
        return [-desc[1] / desc[0]]
    try:
        return mpmath.polyroots(desc, maxsteps=200 + 50 * len(desc), extraprec=extra)
    except mpmath.libmp.NoConvergence as exc:
        raise PrecisionExhausted(f"root approximation did not converge: {exc}") from None


def _isolate_at(coeffs, n_real, target):
    deriv = [k * c for k, c in enumerate(coeffs) if k]
    approx = _approximate_roots(coeffs, mp.prec)
    approx = sorted((mpc(z) for z in approx), key=lambda z: abs(z.imag))
    reals = sorted(_newton(coeffs, deriv, mpf(z.real)) for z in approx[:n_real])
    uppers = [z for z in approx[n_real:] if z.imag > 0]
    if 2 * len(uppers) != len(approx) - n_real:
        return None
    uppers = sorted((_newton(coeffs, deriv, z) for z in uppers), key=lambda z: (z.real, z.imag))
    centers = list(reals)
    for z in uppers:
        centers.extend([z, mpmath.conj(z)])
    if len(centers) != len(coeffs) - 1:
        return None
    balls = []
    for z in centers:
        r = _inclusion_radius(coeffs, deriv, z)
        if not r < target:
            return None
        balls.append(Ball(z, r))
    for i in range(len(balls)):
        for j in range(i + 1, len(balls)):
            if balls[i].overlaps(balls[j]):
                return None
    return tuple(balls)


@lru_cache(maxsize=256)
def isolate_roots(coeffs: tuple, precision_bits: int = DEFAULT_PRECISION) -> tuple:
    """Certified, pairwise disjoint enclosures of all complex roots of a squarefree integer polynomial.

    Real roots come first in ascending order, followed by conjugate pairs
    (upper half-plane member first). ``n`` disjoint disks that each contain
    at least one root of a degree-``n`` polynomial contain exactly one each;
    a disk centred on the real axis then holds a real root by symmetry.
    """
    poly = IntPolynomial(coeffs)
    if poly.degree < 1:
        return ()
    if not is_squarefree(poly):
        raise ValueError(f"{poly} is not squarefree")
    n_real = sturm_count(poly)
    target = mpmath.ldexp(1, -(precision_bits // 2) - 8)
    guard = GUARD_BITS
    for _ in range(MAX_REFINEMENTS):
        with mp.workprec(precision_bits + guard):
            balls = _isolate_at(list(coeffs), n_real, target)
        if balls is not None:
            return balls
        guard *= 2
    raise PrecisionExhausted(f"could not isolate the roots of {poly} at {precision_bits} bits")


# ---- fields and elements ---------------------------------------------------

@dataclass(frozen=True)
class NumberField:
    defining_poly: IntPolynomial
    signature: tuple
    irreducibility: str
    irreducibility_evidence: str = ""
    precision_bits: int = DEFAULT_PRECISION

    @property
    def degree(self) -> int:
        return self.defining_poly.degree

    @property
    def is_totally_real(self) -> bool:
        return self.signature[1] == 0

    def root_enclosures(self, precision_bits=None) -> tuple:
        return isolate_roots(self.defining_poly.coefficients, precision_bits or self.precision_bits)

    def element(self, coords: Sequence) -> "FieldElement":
        return FieldElement(self, coords)

    def generator(self) -> "FieldElement":
        if self.degree == 1:
            return self.element([-self.defining_poly.coefficients[0]])
        return self.element([0, 1])

    def one(self) -> "FieldElement":
        return self.element([1])

    def __eq__(self, other):
        return isinstance(other, NumberField) and other.defining_poly == self.defining_poly

    def __hash__(self):
        return hash(self.defining_poly)

    def __str__(self):
        return f"Q[x]/({self.defining_poly})"


def make_field(poly: IntPolynomial, precision_bits: int = DEFAULT_PRECISION) -> NumberField:
    if poly.degree < 1:
        raise Rejection("bad-degree", f"defining polynomial {poly} has degree < 1")
    if not poly.is_monic:
        raise Rejection("non-monic", f"defining polynomial {poly} is not monic")
    report = irreducibility(poly)
    if report.status == "reducible":
        raise Rejection("reducible", f"{poly}: {report.evidence}")
    if report.status == "unverified":
        log.warning("irreducibility of %s unverified (%s)", poly, report.evidence)
    r1 = sturm_count(poly)
    r2 = (poly.degree - r1) // 2
    fld = NumberField(poly, (r1, r2), report.status, report.evidence, precision_bits)
    fld.root_enclosures()
    return fld


class FieldElement:
    """Exact element of a number field, stored on the power basis."""

    __slots__ = ("field", "coords")

    def __init__(self, field: NumberField, coords: Sequence):
        m = field.degree
        coords = [Fraction(c) for c in coords]
        if len(coords) > m:
            coords = _reduce(coords, field)
        coords = coords + [Fraction(0)] * (m - len(coords))
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coords", tuple(coords))

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _check(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.field, [other])
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, [-a for a in self.coords])

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, _reduce(qmul(self.coords, other.coords), self.field))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        g, s, _ = qxgcd(list(self.coords), self.field.defining_poly.as_fractions())
        if len(g) != 1:
            raise ZeroDivisionError("element shares a factor with the defining polynomial")
        return FieldElement(self.field, _reduce(s, self.field))

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._check(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.coords == FieldElement(self.field, [other]).coords
        return isinstance(other, FieldElement) and self.field == other.field and self.coords == other.coords

    def __hash__(self):
        return hash((self.field, self.coords))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coords[1:])

    def has_integer_coords(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def multiplication_matrix(self) -> tuple:
        """Column k holds the coordinates of self * theta^k."""
        m = self.field.degree
        theta = self.field.generator()
        cols = []
        cur = self
        for _ in range(m):
            cols.append(cur.coords)
            cur = cur * theta
        rows = tuple(tuple(cols[k][i] for k in range(m)) for i in range(m))
        return tuple(tuple(int(x) if x.denominator == 1 else x for x in r) for r in rows)

    def __repr__(self):
        return f"FieldElement({format_element(self)} in {self.field})"

    def __str__(self):
        return format_element(self)


def _reduce(coeffs, fld: NumberField):
    g = fld.defining_poly.as_fractions()
    _, r = qdivmod(list(coeffs), g)
    return r


def format_element(a: FieldElement, var="θ") -> str:
    parts = []
    for k, c in enumerate(a.coords):
        if c == 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if mono and abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}{'*' + mono if mono else ''}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def element_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    if not isinstance(a, FieldElement) or not isinstance(b, FieldElement):
        raise TypeError("field elements required")
    if a.field != b.field:
        raise FieldMismatchError(f"{a.field} vs {b.field}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b.is_zero():
            raise ZeroDivisionError("division by zero field element")
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def characteristic_polynomial(a: FieldElement) -> list:
    return linalg.charpoly(a.multiplication_matrix())


def minimal_polynomial(a: FieldElement) -> IntPolynomial:
    """Squarefree part of the characteristic polynomial, content cleared.

    The result is monic exactly when ``a`` is integral.
    """
    chi = [Fraction(c) for c in characteristic_polynomial(a)]
    g = qgcd(chi, qderiv(chi))
    mu = qdivmod(chi, g)[0] if len(g) > 1 else chi
    return IntPolynomial.from_rationals(mu)


def is_integral(a: FieldElement) -> bool:
    return minimal_polynomial(a).is_monic


def norm_and_trace(a: FieldElement) -> tuple:
    mat = a.multiplication_matrix()
    return Fraction(linalg.det(mat)), Fraction(linalg.trace(mat))


def norm(a: FieldElement) -> Fraction:
    if a.has_integer_coords():
        mat = tuple(tuple(int(x) for x in row) for row in a.multiplication_matrix())
        return Fraction(linalg.det(mat))
    return norm_and_trace(a)[0]


def embed(a: FieldElement, precision_bits: int = DEFAULT_PRECISION) -> list:
    """Certified images of ``a`` under every complex embedding, in root-enclosure order."""
    target = mpmath.ldexp(1, -(precision_bits // 2))
    bits = precision_bits
    for _ in range(MAX_REFINEMENTS):
        roots = a.field.root_enclosures(bits)
        with mp.workprec(bits + GUARD_BITS):
            values = [_horner(a.coords, r) for r in roots]
        if all(v.rad <= target for v in values):
            return values
        bits *= 2
    raise PrecisionExhausted(f"embedding radius above 2^-{precision_bits // 2} after refinement")


def embedding_value(a: FieldElement, index: int, precision_bits: int = DEFAULT_PRECISION) -> Ball:
    return embed(a, precision_bits)[index]
