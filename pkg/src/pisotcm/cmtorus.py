"""CM fields E = K(sqrt(delta)), CM types, period matrices and lattice automorphisms.

The lattice is spanned by the order Z[theta][sqrt(delta)] with basis
``1, theta, ..., theta^(m-1), sqrt(delta), theta*sqrt(delta), ...``; lattice
coordinates of a point of C^m refer to this basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from itertools import permutations, product
from typing import Optional

import mpmath
from mpmath import mp

from . import linalg
from .balls import Ball
from .errors import Rejection
from .numberfield import (
    DEFAULT_PRECISION,
    GUARD_BITS,
    FieldElement,
    NumberField,
    embed,
    format_element,
    minimal_polynomial,
    norm,
)
from .polynomial import sturm_count

ORDER_CAVEAT = (
    "lattice is the order Z[theta][sqrt(delta)], not the maximal order O_E; "
    "the resulting torus is isogenous to C^m/phi_I(O_E)"
)


@dataclass(frozen=True)
class CMField:
    base: NumberField
    delta: FieldElement

    @property
    def m(self) -> int:
        return self.base.degree

    @property
    def order_basis(self) -> tuple:
        """Labels of the 2m lattice generators."""
        theta = ["1", "θ"] + [f"θ^{k}" for k in range(2, self.m)]
        theta = theta[: self.m]
        return tuple(theta) + tuple(f"{t}·√δ" if t != "1" else "√δ" for t in theta)

    def sqrt_delta_moduli(self, precision_bits=DEFAULT_PRECISION) -> list:
        """sqrt(-sigma_j(delta)) for each real embedding sigma_j of K."""
        with mp.workprec(precision_bits + GUARD_BITS):
            return [(-d).sqrt() for d in embed(self.delta, precision_bits)]


def make_cm_field(base: NumberField, delta: FieldElement, precision_bits: int = DEFAULT_PRECISION) -> CMField:
    if not base.is_totally_real:
        raise Rejection("not-totally-real", f"{base} has signature {base.signature}")
    if delta.field != base:
        raise Rejection("field-mismatch", "delta does not lie in the base field")
    if not minimal_polynomial(delta).is_monic:
        raise Rejection("not-integral", f"delta = {delta} is not integral")
    values = embed(delta, precision_bits)
    uncertain = []
    for j, v in enumerate(values):
        if v.certainly_negative():
            continue
        if v.certainly_positive():
            raise Rejection(
                "delta-not-totally-negative",
                f"embedding {j} of delta = {format_element(delta)} is {mpmath.nstr(v.mid, 12)} > 0",
            )
        uncertain.append(j)
    if uncertain:
        mu = minimal_polynomial(delta)
        if mu(0) == 0 or sturm_count(mu, (0, None)) > 0:
            raise Rejection("delta-not-totally-negative", f"embedding {uncertain[0]} of delta is not < 0")
    return CMField(base, delta)


@dataclass(frozen=True)
class CMType:
    """A numbering: row j of the period matrix uses real embedding ``ordering[j]`` of K
    and the branch ``signs[j] * i * sqrt(-sigma(delta))`` of sqrt(delta)."""

    ordering: tuple
    signs: tuple

    def __post_init__(self):
        if sorted(self.ordering) != list(range(len(self.ordering))):
            raise ValueError(f"ordering {self.ordering} is not a permutation")
        if len(self.signs) != len(self.ordering) or any(s not in (1, -1) for s in self.signs):
            raise ValueError(f"bad branch signs {self.signs}")

    @property
    def m(self) -> int:
        return len(self.ordering)

    def to_dict(self) -> dict:
        return {"ordering": list(self.ordering), "signs": list(self.signs)}


def canonical_cm_type(m: int) -> CMType:
    return CMType(tuple(range(m)), (1,) * m)


def enumerate_cm_types(E, mode: str = "canonical"):
    """``canonical`` gives one CMType; ``all`` gives the 2^m * m! numberings in lexicographic order."""
    m = E.m if isinstance(E, CMField) else int(E)
    if mode == "canonical":
        return canonical_cm_type(m)
    if mode == "all":
        return [
            CMType(perm, signs)
            for perm in permutations(range(m))
            for signs in product((1, -1), repeat=m)
        ]
    raise ValueError(f"unknown mode {mode!r}")


def _sqrt_delta_images(E: CMField, I: CMType, precision_bits):
    moduli = E.sqrt_delta_moduli(precision_bits)
    return [Ball(mpmath.mpc(0, 1)) * moduli[I.ordering[j]] * I.signs[j] for j in range(I.m)]


@dataclass(frozen=True)
class CMTorus:
    cm_field: CMField
    cm_type: CMType
    period_matrix: tuple
    real_determinant: Ball
    precision_bits: int

    @property
    def m(self) -> int:
        return self.cm_field.m


def period_matrix(E: CMField, I: CMType, precision_bits: int = DEFAULT_PRECISION) -> CMTorus:
    """Rows are phi_1..phi_m, columns the images of the 2m order basis elements."""
    m = E.m
    if I.m != m:
        raise ValueError(f"CM type for degree {I.m} used with degree {m}")
    theta = E.base.generator()
    roots = embed(theta, precision_bits)
    with mp.workprec(precision_bits + GUARD_BITS):
        sq = _sqrt_delta_images(E, I, precision_bits)
        rows = []
        for j in range(m):
            t = roots[I.ordering[j]]
            powers = [Ball(1)]
            for _ in range(m - 1):
                powers.append(powers[-1] * t)
            rows.append(tuple(powers) + tuple(p * sq[j] for p in powers))
        stacked = [[entry.real for entry in row] for row in rows] + [[entry.imag for entry in row] for row in rows]
        d = ball_det(stacked)
    if d.contains_zero():
        raise Rejection("degenerate-lattice", "real-stacked period matrix determinant not certified nonzero")
    return CMTorus(E, I, tuple(rows), d, precision_bits)


def ball_det(rows) -> Ball:
    """Determinant of a small ball matrix by Gaussian elimination with partial pivoting."""
    a = [list(r) for r in rows]
    n = len(a)
    result = Ball(1)
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: a[r][col].abs_lower())
        if a[pivot][col].abs_lower() == 0:
            return Ball(0, mpmath.inf)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            result = -result
        p = a[col][col]
        result = result * p
        inv = p.inverse()
        for r in range(col + 1, n):
            f = a[r][col] * inv
            for c in range(col + 1, n):
                a[r][c] = a[r][c] - f * a[col][c]
    return result


@dataclass(frozen=True)
class LatticeAutomorphism:
    matrix: tuple
    alpha: FieldElement
    embeddings: tuple  # sigma_i(alpha) in base-field root order

    @property
    def dimension(self) -> int:
        return len(self.matrix)

    def diagonal(self, I: CMType) -> list:
        return [self.embeddings[I.ordering[j]] for j in range(I.m)]


def multiplication_matrix(E: CMField, alpha: FieldElement, precision_bits: int = DEFAULT_PRECISION) -> LatticeAutomorphism:
    """Integer matrix of z -> alpha*z on the order basis (two equal blocks for alpha in K)."""
    if alpha.field != E.base:
        raise Rejection("field-mismatch", "alpha must lie in the totally real base field")
    if not minimal_polynomial(alpha).is_monic:
        raise Rejection("not-integral", f"{alpha} is not integral; the lattice is not preserved")
    if abs(norm(alpha)) != 1:
        raise Rejection("not-a-unit", f"{alpha} has norm {norm(alpha)}; the lattice is not preserved")
    block = alpha.multiplication_matrix()
    if any(isinstance(x, Fraction) for row in block for x in row):
        raise Rejection("not-integral", f"{alpha} has non-integral coordinates; the order is not preserved")
    matrix = linalg.block_diag(block, block)
    return LatticeAutomorphism(matrix, alpha, tuple(embed(alpha, precision_bits)))


def verify_descent(T: CMTorus, L: LatticeAutomorphism):
    """Upper bound for max |(Pi M - D Pi)_{jk}| over all entries.

    ``M`` maps lattice coordinates to lattice coordinates, so the linear map
    ``D`` on C^m preserves the lattice exactly when ``Pi M = D Pi``.
    """
    m = T.m
    if L.dimension != 2 * m or any(len(row) != 2 * m for row in L.matrix):
        raise ValueError(f"matrix of size {L.dimension} incompatible with a torus of dimension {m}")
    diag = L.diagonal(T.cm_type)
    worst = mpmath.mpf(0)
    with mp.workprec(T.precision_bits + GUARD_BITS):
        for j in range(m):
            row = T.period_matrix[j]
            for k in range(2 * m):
                acc = Ball(0)
                for t in range(2 * m):
                    if L.matrix[t][k]:
                        acc = acc + row[t] * L.matrix[t][k]
                diff = acc - diag[j] * row[k]
                worst = max(worst, diff.abs_upper())
    return worst


def descent_tolerance(precision_bits: int):
    return mpmath.ldexp(1, -(precision_bits // 2))


# ---- simplicity -------------------------------------------------------------

@dataclass(frozen=True)
class SimplicityVerdict:
    status: str  # "simple" | "not-simple" | "unknown"
    reason: str
    searched_height: int
    height_bounded: bool = False
    witness: Optional[dict] = None

    def to_dict(self) -> dict:
        out = {
            "status": self.status,
            "reason": self.reason,
            "searched_height": self.searched_height,
            "height_bounded": self.height_bounded,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _by_height(m: int, H: int):
    # shells of increasing height; within a shell, fewer negative and lower-degree coordinates first
    for h in range(1, H + 1):
        shell = [c for c in product(range(-h, h + 1), repeat=m) if max(abs(x) for x in c) == h]
        shell.sort(key=lambda c: (sum(x < 0 for x in c), [abs(x) for x in reversed(c)]))
        yield from shell


@lru_cache(maxsize=64)
def _rational_squares(E: CMField, height: int) -> tuple:
    """All (y, y^2*delta) with y of height <= H and y^2*delta rational, in search order.

    Independent of the CM type, so sweeps over all types share one scan.
    """
    out = []
    for coords in _by_height(E.m, height):
        y = FieldElement(E.base, coords)
        square = y * y * E.delta
        if square.is_rational():
            out.append((y, square))
    return tuple(out)


def simplicity_check(E: CMField, I: CMType, height: int, precision_bits: int = DEFAULT_PRECISION) -> SimplicityVerdict:
    """Height-bounded search for an imaginary quadratic subfield on which the CM type is induced.

    A witness is x = y*sqrt(delta) with y in K having integer coordinates of
    height <= H and x^2 = y^2*delta rational. If the CM type sends x to the
    same point of C under every phi_j, the type is induced from Q(x) and the
    torus is isogenous to a power of an elliptic curve.
    """
    m = E.m
    if m == 1:
        return SimplicityVerdict("simple", "dimension 1", 0)
    with mp.workprec(precision_bits + GUARD_BITS):
        sq = _sqrt_delta_images(E, I, precision_bits)
        nonconstant = []
        for y, square in _rational_squares(E, height):
            values = [embed(y, precision_bits)[I.ordering[j]] * sq[j] for j in range(m)]
            signs = [1 if v.imag.certainly_positive() else -1 for v in values]
            witness = {
                "y": [str(c) for c in y.coords],
                "square": str(square.coords[0]),
                "subfield": f"Q(sqrt({square.coords[0]}))",
                "restricted_signs": signs,
            }
            if len(set(signs)) == 1:
                return SimplicityVerdict(
                    "not-simple",
                    f"CM type is induced from the imaginary quadratic subfield Q(sqrt({square.coords[0]}))",
                    height,
                    witness=witness,
                )
            nonconstant.append(witness)
    if m == 2 and not nonconstant:
        return SimplicityVerdict(
            "simple",
            "a non-simple CM surface forces an imaginary quadratic CM subfield; "
            f"none found up to height {height}",
            height,
            height_bounded=True,
        )
    return SimplicityVerdict("unknown", f"no inducing subfield found up to height {height}", height)
