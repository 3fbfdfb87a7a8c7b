"""Midpoint-radius (ball) arithmetic on top of mpmath.

A ``Ball`` holds a midpoint (``mpf`` or ``mpc``) and a non-negative ``mpf``
radius; the true value lies in the closed disk around the midpoint. Every
operation is evaluated at the current ``mpmath.mp.prec`` and the radius is
inflated by a rounding term so enclosures stay valid. Radii are accumulated
with upward rounding.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

import mpmath
from mpmath import mp, mpc, mpf

Number = Union[int, Fraction, mpf, mpc]


def _ulp_slack(x) -> mpf:
    # a few ulps of |x| at the working precision
    return mpmath.fmul(abs(x), mpmath.ldexp(1, 3 - mp.prec), rounding="u")


def _up_add(*terms) -> mpf:
    total = mpf(0)
    for t in terms:
        total = mpmath.fadd(total, t, rounding="u")
    return total


def _up_mul(a, b) -> mpf:
    return mpmath.fmul(a, b, rounding="u")


def _fraction_of_mpf(x: mpf) -> Fraction:
    man, exp = x.man_exp
    if exp >= 0:
        return Fraction(man << exp)
    return Fraction(man, 1 << -exp)


class Ball:
    __slots__ = ("mid", "rad")

    def __init__(self, mid, rad=0):
        if isinstance(mid, (mpc, complex)):
            mid = mpc(mid)
        else:
            mid = mpf(mid)
        rad = mpf(rad)
        if rad < 0:
            raise ValueError("negative radius")
        object.__setattr__(self, "mid", mid)
        object.__setattr__(self, "rad", rad)

    def __setattr__(self, name, value):
        raise AttributeError("Ball is immutable")

    @classmethod
    def exact(cls, value: Number) -> "Ball":
        """Enclose an exact integer or rational at the working precision."""
        if isinstance(value, (mpf, mpc)):
            return cls(value)
        q = Fraction(value)
        mid = mpf(q.numerator) / q.denominator
        if _fraction_of_mpf(mid) == q:
            return cls(mid)
        return cls(mid, _ulp_slack(mid))

    @property
    def is_real(self) -> bool:
        return isinstance(self.mid, mpf)

    @property
    def real(self) -> "Ball":
        if self.is_real:
            return self
        return Ball(self.mid.real, self.rad)

    @property
    def imag(self) -> "Ball":
        if self.is_real:
            return Ball(0)
        return Ball(self.mid.imag, self.rad)

    def conjugate(self) -> "Ball":
        if self.is_real:
            return self
        return Ball(mpmath.conj(self.mid), self.rad)

    # ---- arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Ball":
        if isinstance(other, Ball):
            return other
        if isinstance(other, (int, Fraction, mpf, mpc)):
            return Ball.exact(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        mid = self.mid + other.mid
        return Ball(mid, _up_add(self.rad, other.rad, _ulp_slack(mid)))

    __radd__ = __add__

    def __neg__(self):
        return Ball(-self.mid, self.rad)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        mid = self.mid * other.mid
        rad = _up_add(
            _up_mul(abs(self.mid), other.rad),
            _up_mul(abs(other.mid), self.rad),
            _up_mul(self.rad, other.rad),
            _ulp_slack(mid),
        )
        return Ball(mid, rad)

    __rmul__ = __mul__

    def inverse(self) -> "Ball":
        m = abs(self.mid)
        gap = mpmath.fsub(m, self.rad, rounding="d")
        if gap <= 0:
            raise ZeroDivisionError("ball contains zero")
        mid = 1 / self.mid
        denom = mpmath.fmul(m, gap, rounding="d")
        rad = _up_add(mpmath.fdiv(self.rad, denom, rounding="u"), _ulp_slack(mid))
        return Ball(mid, rad)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = Ball(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __abs__(self) -> "Ball":
        mid = abs(self.mid)
        return Ball(mid, _up_add(self.rad, _ulp_slack(mid)))

    # ---- real-only functions ---------------------------------------------

    def _require_real(self):
        if not self.is_real:
            raise TypeError("operation defined for real balls only")

    @property
    def lower(self) -> mpf:
        self._require_real()
        return mpmath.fsub(self.mid, self.rad, rounding="d")

    @property
    def upper(self) -> mpf:
        self._require_real()
        return mpmath.fadd(self.mid, self.rad, rounding="u")

    def abs_upper(self) -> mpf:
        return mpmath.fadd(abs(self.mid), self.rad, rounding="u")

    def abs_lower(self) -> mpf:
        lo = mpmath.fsub(abs(self.mid), self.rad, rounding="d")
        return lo if lo > 0 else mpf(0)

    def sqrt(self) -> "Ball":
        lo = self.lower
        if lo <= 0:
            raise ValueError("sqrt of a ball that is not certainly positive")
        mid = mpmath.sqrt(self.mid)
        denom = mpmath.fadd(mpmath.sqrt(lo), mid, rounding="d")
        rad = _up_add(mpmath.fdiv(self.rad, denom, rounding="u"), _ulp_slack(mid))
        return Ball(mid, rad)

    def log(self) -> "Ball":
        lo = self.lower
        if lo <= 0:
            raise ValueError("log of a ball that is not certainly positive")
        mid = mpmath.log(self.mid)
        rad = _up_add(mpmath.fdiv(self.rad, lo, rounding="u"), _ulp_slack(mid))
        return Ball(mid, rad)

    # ---- predicates --------------------------------------------------------

    def contains(self, value) -> bool:
        if isinstance(value, Ball):
            return abs(value.mid - self.mid) + value.rad <= self.rad
        if isinstance(value, (int, Fraction)):
            value = Ball.exact(value)
            return abs(value.mid - self.mid) <= _up_add(self.rad, value.rad)
        return abs(mpmath.mpmathify(value) - self.mid) <= self.rad

    def overlaps(self, other: "Ball") -> bool:
        return abs(self.mid - other.mid) <= _up_add(self.rad, other.rad)

    def contains_zero(self) -> bool:
        return abs(self.mid) <= self.rad

    def certainly_positive(self) -> bool:
        return self.lower > 0

    def certainly_negative(self) -> bool:
        return self.upper < 0

    def width(self) -> mpf:
        return 2 * self.rad

    def __repr__(self):
        return f"Ball({mpmath.nstr(self.mid, 20)} ± {mpmath.nstr(self.rad, 3)})"


def ball_max(balls: Iterable[Ball]) -> Ball:
    """Enclosure of the maximum of real balls."""
    balls = list(balls)
    if not balls:
        raise ValueError("empty")
    lo = max(b.lower for b in balls)
    hi = max(b.upper for b in balls)
    for b in balls:
        if b.lower == lo and b.upper == hi:
            return b
    mid = (lo + hi) / 2
    rad = _up_add(mpmath.fsub(hi, mid, rounding="u"), _ulp_slack(mid))
    return Ball(mid, rad)


def ball_prod(balls: Iterable[Ball]) -> Ball:
    result = Ball(1)
    for b in balls:
        result = result * b
    return result


def to_decimal(x: mpf, digits: int) -> tuple[str, mpf]:
    """Decimal string for ``x`` plus an upper bound on the conversion error."""
    text = mpmath.nstr(x, digits)
    err = abs(mpmath.mpf(text) - x)
    return text, mpmath.fadd(err, mpmath.ldexp(abs(x), -mp.prec + 2), rounding="u")


def digits_for(bits: int) -> int:
    return int(bits * 0.30103) + 3
