"""Exact univariate polynomials over the integers and rationals.

Coefficient lists are ascending (constant term first) everywhere in this
module. ``IntPolynomial`` is the public immutable type; the ``q*`` helpers act
on plain lists of ``Fraction`` and back the Sturm machinery.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Optional, Sequence, Union

from .errors import PolynomialSyntaxError

Rational = Union[int, Fraction]


def _strip(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


@dataclass(frozen=True)
class IntPolynomial:
    coefficients: tuple

    def __post_init__(self):
        coeffs = _strip(self.coefficients)
        for c in coeffs:
            if isinstance(c, bool) or not isinstance(c, int):
                raise TypeError(f"integer coefficients required, got {c!r}")
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @classmethod
    def from_rationals(cls, coeffs: Sequence[Rational]) -> "IntPolynomial":
        """Primitive integer multiple of a rational polynomial, positive leading coefficient."""
        coeffs = _strip(Fraction(c) for c in coeffs)
        if not coeffs:
            return cls(())
        den = reduce(math.lcm, (c.denominator for c in coeffs), 1)
        ints = [int(c * den) for c in coeffs]
        g = reduce(math.gcd, ints, 0)
        sign = -1 if ints[-1] < 0 else 1
        return cls(tuple(sign * c // g for c in ints))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1 if self.coefficients else -1

    @property
    def leading_coefficient(self) -> int:
        return self.coefficients[-1] if self.coefficients else 0

    @property
    def is_monic(self) -> bool:
        return self.leading_coefficient == 1

    def is_zero(self) -> bool:
        return not self.coefficients

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(tuple(k * c for k, c in enumerate(self.coefficients) if k))

    def as_fractions(self) -> list:
        return [Fraction(c) for c in self.coefficients]

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        return IntPolynomial(tuple(int(c) for c in qmul(self.coefficients, other.coefficients)))

    def __pow__(self, k: int) -> "IntPolynomial":
        result = IntPolynomial((1,))
        for _ in range(k):
            result = result * self
        return result

    def __str__(self):
        return format_polynomial(self.coefficients)

    def __repr__(self):
        return f"IntPolynomial({format_polynomial(self.coefficients)!r})"


# ---- parsing and printing -------------------------------------------------

_MINUS_CHARS = "−–"
_TERM = re.compile(r"\s*([+-]?)\s*(\d+)?\s*(\*?\s*x(?:\s*\^\s*(\d+))?)?\s*")


def format_polynomial(coeffs: Sequence[int], var: str = "x") -> str:
    coeffs = _strip(coeffs)
    if not coeffs:
        return "0"
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if k == 0:
            body = str(a)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if a == 1 else f"{a}{mono}"
        if not parts:
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


def parse_polynomial(text: str) -> IntPolynomial:
    """Parse ``"x^3 - x - 1"`` or an ascending coefficient list ``"[-1, -1, 0, 1]"``."""
    if not isinstance(text, str):
        return IntPolynomial(tuple(int(c) for c in text))
    src = text
    for ch in _MINUS_CHARS:
        text = text.replace(ch, "-")
    stripped = text.strip()
    if not stripped:
        raise PolynomialSyntaxError("empty polynomial", src, 0)
    if stripped.startswith("["):
        return _parse_list(text, src)
    return _parse_terms(text, src)


def _parse_list(text, src):
    start = text.index("[")
    end = text.rfind("]")
    if end < 0:
        raise PolynomialSyntaxError("missing ']'", src, len(text))
    if text[end + 1:].strip():
        raise PolynomialSyntaxError("trailing characters", src, end + 1)
    body = text[start + 1:end]
    coeffs = []
    pos = start + 1
    for item in body.split(","):
        token = item.strip()
        offset = pos + (len(item) - len(item.lstrip()))
        if not re.fullmatch(r"[+-]?\d+", token):
            raise PolynomialSyntaxError(f"non-integer coefficient {token!r}", src, offset)
        coeffs.append(int(token))
        pos += len(item) + 1
    return IntPolynomial(tuple(coeffs))


def _parse_terms(text, src):
    coeffs: dict[int, int] = {}
    pos = 0
    first = True
    n = len(text)
    while pos < n:
        m = _TERM.match(text, pos)
        sign, digits, xpart, power = m.groups()
        if not digits and not xpart:
            raise PolynomialSyntaxError("expected a term", src, m.end())
        if not sign and not first:
            raise PolynomialSyntaxError("expected '+' or '-'", src, pos)
        if xpart and xpart.lstrip().startswith("*") and not digits:
            raise PolynomialSyntaxError("dangling '*'", src, pos)
        coeff = int(digits) if digits else 1
        if sign == "-":
            coeff = -coeff
        k = 0 if not xpart else (int(power) if power else 1)
        coeffs[k] = coeffs.get(k, 0) + coeff
        first = False
        pos = m.end()
        if pos < n and text[pos] not in "+-":
            raise PolynomialSyntaxError(f"unexpected character {text[pos]!r}", src, pos)
    if not coeffs:
        raise PolynomialSyntaxError("empty polynomial", src, 0)
    top = max(coeffs)
    return IntPolynomial(tuple(coeffs.get(k, 0) for k in range(top + 1)))


# ---- rational polynomial arithmetic ---------------------------------------

def qadd(a, b):
    n = max(len(a), len(b))
    return _strip((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def qsub(a, b):
    return qadd(a, [-c for c in b])


def qmul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _strip(out)


def qdivmod(a, b):
    a = [Fraction(c) for c in _strip(a)]
    b = _strip(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    lc = Fraction(b[-1])
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        f = a[-1] / lc
        q[shift] = f
        for i, c in enumerate(b):
            a[i + shift] -= f * c
        a = _strip(a)
    return _strip(q), a


def qrem(a, b):
    return qdivmod(a, b)[1]


def qmonic(a):
    a = _strip(a)
    lc = Fraction(a[-1])
    return [Fraction(c) / lc for c in a]


def qgcd(a, b):
    a, b = _strip(a), _strip(b)
    while b:
        a, b = b, qrem(a, b)
    return qmonic(a) if a else []


def qxgcd(a, b):
    """Return ``(g, s, t)`` with ``s*a + t*b = g`` monic."""
    r0, r1 = [Fraction(c) for c in _strip(a)], [Fraction(c) for c in _strip(b)]
    s0, s1 = [Fraction(1)], []
    t0, t1 = [], [Fraction(1)]
    while r1:
        q, r = qdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, qsub(s0, qmul(q, s1))
        t0, t1 = t1, qsub(t0, qmul(q, t1))
    lc = r0[-1]
    return [c / lc for c in r0], [c / lc for c in s0], [c / lc for c in t0]


def qderiv(a):
    return _strip(k * c for k, c in enumerate(a) if k)


def qeval(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def squarefree_part(poly: IntPolynomial) -> IntPolynomial:
    f = poly.as_fractions()
    if len(f) <= 1:
        return poly
    g = qgcd(f, qderiv(f))
    if len(g) <= 1:
        return IntPolynomial.from_rationals(f)
    return IntPolynomial.from_rationals(qdivmod(f, g)[0])


def is_squarefree(poly: IntPolynomial) -> bool:
    f = poly.as_fractions()
    return len(qgcd(f, qderiv(f))) <= 1


# ---- Sturm sequences -------------------------------------------------------

def sturm_sequence(poly: IntPolynomial) -> list:
    """Sturm chain of the squarefree part, each member scaled to a primitive integer polynomial.

    Scaling by positive constants leaves every sign pattern unchanged.
    """
    p = squarefree_part(poly)
    chain = [list(p.coefficients), list(p.derivative().coefficients)]
    while chain[-1] and len(chain[-1]) > 1:
        r = qrem(chain[-2], chain[-1])
        if not r:
            break
        r = [-c for c in r]
        den = reduce(math.lcm, (c.denominator for c in r), 1)
        ints = [int(c * den) for c in r]
        g = reduce(math.gcd, ints, 0)
        chain.append([c // g for c in ints])
    return [c for c in chain if c]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _sign_at(coeffs, x) -> int:
    if x is None:
        raise ValueError
    return _sign(qeval(coeffs, x))


def _sign_at_infinity(coeffs, positive: bool) -> int:
    lc = _sign(coeffs[-1])
    if positive or (len(coeffs) - 1) % 2 == 0:
        return lc
    return -lc


def _variations(signs) -> int:
    signs = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sign_variations(chain, x: Optional[Rational], at: str = "finite") -> int:
    if at == "-inf":
        return _variations(_sign_at_infinity(c, False) for c in chain)
    if at == "+inf":
        return _variations(_sign_at_infinity(c, True) for c in chain)
    return _variations(_sign_at(c, x) for c in chain)


def sturm_count(poly: IntPolynomial, interval=(None, None)) -> int:
    """Number of distinct real roots in ``(lo, hi]``; ``None`` stands for an infinite endpoint."""
    if poly.degree <= 0:
        return 0
    lo, hi = interval
    chain = sturm_sequence(poly)
    v_lo = sign_variations(chain, None, "-inf") if lo is None else sign_variations(chain, Fraction(lo))
    v_hi = sign_variations(chain, None, "+inf") if hi is None else sign_variations(chain, Fraction(hi))
    return v_lo - v_hi


def cauchy_bound(poly: IntPolynomial) -> int:
    """Integer B with every complex root of modulus < B."""
    lc = abs(poly.leading_coefficient)
    return 1 + max((abs(c) for c in poly.coefficients[:-1]), default=0) // lc + 1


def isolate_real_root(poly: IntPolynomial, lo: Fraction, hi: Fraction, width: Fraction):
    """Shrink ``(lo, hi]`` (holding exactly one root) by exact bisection to at most ``width``."""
    chain = sturm_sequence(poly)
    lo, hi = Fraction(lo), Fraction(hi)
    v_lo = sign_variations(chain, lo)
    if v_lo - sign_variations(chain, hi) != 1:
        raise ValueError("interval does not isolate exactly one root")
    while hi - lo > width:
        mid = (lo + hi) / 2
        v_mid = sign_variations(chain, mid)
        if v_lo - v_mid == 1:
            hi = mid
        else:
            lo, v_lo = mid, v_mid
    return lo, hi


# ---- arithmetic modulo a prime --------------------------------------------

def _pstrip(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, b, p):
    a = [c % p for c in a]
    _pstrip(a)
    inv = pow(b[-1], -1, p)
    while len(a) >= len(b):
        f = a[-1] * inv % p
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[i + shift] = (a[i + shift] - f * c) % p
        _pstrip(a)
    return a


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return _pstrip(out)


def _pgcd(a, b, p):
    a = _pstrip([c % p for c in a])
    b = _pstrip([c % p for c in b])
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def _ppowmod(base, e, f, p):
    result = [1]
    base = _pmod(base, f, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), f, p)
        base = _pmod(_pmul(base, base, p), f, p)
        e >>= 1
    return result


def factor_degrees_mod_p(poly: IntPolynomial, p: int) -> Optional[list]:
    """Degrees of the irreducible factors of ``poly`` mod ``p`` (distinct-degree factorization).

    Returns ``None`` when ``p`` divides the leading coefficient or the reduction is not squarefree.
    """
    f = [c % p for c in poly.coefficients]
    if f[-1] == 0:
        return None
    deriv = [c % p for c in poly.derivative().coefficients]
    if len(_pgcd(f, deriv, p)) > 1:
        return None
    inv = pow(f[-1], -1, p)
    f = [c * inv % p for c in f]
    degrees = []
    h = [0, 1]
    i = 0
    while len(f) - 1 >= 2 * (i + 1):
        i += 1
        h = _ppowmod(h, p, f, p)
        g = _pgcd(f, _psub(h, [0, 1], p), p)
        d = len(g) - 1
        if d > 0:
            degrees.extend([i] * (d // i))
            f = _pdiv_exact(f, g, p)
            h = _pmod(h, f, p)
    if len(f) > 1:
        degrees.append(len(f) - 1)
    return sorted(degrees)


def _psub(a, b, p):
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _pstrip(out)


def _pdiv_exact(a, b, p):
    a = list(a)
    inv = pow(b[-1], -1, p)
    q = [0] * (len(a) - len(b) + 1)
    while len(a) >= len(b) and a:
        f = a[-1] * inv % p
        shift = len(a) - len(b)
        q[shift] = f
        for i, c in enumerate(b):
            a[i + shift] = (a[i + shift] - f * c) % p
        _pstrip(a)
    return _pstrip(q)


def _subset_sums(degrees):
    sums = {0}
    for d in degrees:
        sums |= {s + d for s in sums}
    return sums


SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)


def integer_roots(poly: IntPolynomial) -> list:
    """Integer roots of a monic integer polynomial (divisors of the constant term)."""
    coeffs = poly.coefficients
    if not coeffs:
        return []
    if coeffs[0] == 0:
        return [0] + [r for r in integer_roots(IntPolynomial(coeffs[1:])) if r != 0]
    c = abs(coeffs[0])
    roots = []
    for d in range(1, math.isqrt(c) + 1):
        if c % d == 0:
            for q in {d, c // d}:
                for r in (q, -q):
                    if poly(r) == 0 and r not in roots:
                        roots.append(r)
    return sorted(roots)


@dataclass(frozen=True)
class IrreducibilityReport:
    status: str  # "verified" | "unverified" | "reducible"
    evidence: str


def irreducibility(poly: IntPolynomial, primes=SMALL_PRIMES) -> IrreducibilityReport:
    """Sufficient irreducibility test for a monic integer polynomial.

    Any proper factor over the rationals must have a degree that is a subset
    sum of the factor degrees modulo every good prime; an empty intersection
    certifies irreducibility. Degrees 2 and 3 fall back to the rational root
    test.
    """
    n = poly.degree
    if n <= 0:
        return IrreducibilityReport("reducible", "constant polynomial")
    if n == 1:
        return IrreducibilityReport("verified", "degree 1")
    if not is_squarefree(poly):
        return IrreducibilityReport("reducible", "repeated factor (gcd with derivative is non-constant)")
    if poly.is_monic:
        roots = integer_roots(poly)
        if roots:
            return IrreducibilityReport("reducible", f"rational root {roots[0]}")
    possible = set(range(1, n))
    for p in primes:
        degrees = factor_degrees_mod_p(poly, p)
        if degrees is None:
            continue
        if degrees == [n]:
            return IrreducibilityReport("verified", f"irreducible modulo {p}")
        possible &= _subset_sums(degrees)
        if not possible:
            return IrreducibilityReport("verified", "factor-degree patterns modulo small primes are incompatible")
    if n <= 3 and poly.is_monic:
        return IrreducibilityReport("verified", "degree <= 3 without rational root")
    return IrreducibilityReport("unverified", f"possible factor degrees {sorted(possible)}")
