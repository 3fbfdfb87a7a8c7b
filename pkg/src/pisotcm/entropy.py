"""Topological entropy of f_alpha from its action on Hodge cohomology.

f* acts on H^{1,0} with eigenvalues lambda_j = phi_j(alpha); on H^{p,p}
= Lambda^p H^{1,0} (x) Lambda^p H^{0,1} its eigenvalues are products over a
p-subset S of the lambdas times conjugates over a p-subset T. The entropy is
log max_p r_p.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Union

import mpmath
from mpmath import mp

from . import linalg
from .balls import Ball, ball_max, ball_prod
from .cmtorus import CMField, CMType, LatticeAutomorphism
from .numberfield import (
    DEFAULT_PRECISION,
    GUARD_BITS,
    FieldElement,
    embed,
    isolate_roots,
    minimal_polynomial,
)
from .pisot import PisotCertificate
from .polynomial import IntPolynomial, squarefree_part

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EntropyReport:
    lambdas: tuple
    r: tuple  # r_0 .. r_m
    h_top: Ball
    maximizing_p: int
    alpha_bound: Optional[Ball] = None

    @property
    def m(self) -> int:
        return len(self.lambdas)


def h1_eigenvalues(E: CMField, I: CMType, alpha: FieldElement, precision_bits: int = DEFAULT_PRECISION) -> list:
    """Eigenvalues of f* on H^0(B, Omega^1): sigma_{I(j)}(alpha), j = 1..m.

    As a set these are the Galois conjugates of alpha whatever the numbering;
    every value is checked against the roots of alpha's minimal polynomial.
    """
    values = embed(alpha, precision_bits)
    lambdas = [values[I.ordering[j]] for j in range(I.m)]
    mu = minimal_polynomial(alpha)
    if mu.degree != E.m:
        log.warning("alpha = %s does not generate K; eigenvalues repeat", alpha)
    roots = isolate_roots(mu.coefficients, precision_bits)
    with mp.workprec(precision_bits + GUARD_BITS):
        for lam in lambdas:
            if not any(lam.overlaps(r) for r in roots):
                raise ArithmeticError(f"eigenvalue {lam} is not a root of {mu}")
    return lambdas


def hpp_spectral_radius(lambdas, p: int, precision_bits: int = DEFAULT_PRECISION) -> Ball:
    """r_p by brute force over pairs of p-subsets (S, T)."""
    m = len(lambdas)
    if not 0 <= p <= m:
        raise ValueError(f"p = {p} outside [0, {m}]")
    with mp.workprec(precision_bits + GUARD_BITS):
        moduli = [abs(lam) for lam in lambdas]
        subsets = list(combinations(range(m), p))
        holo = [ball_prod(moduli[i] for i in S) for S in subsets]
        # |conj(lambda)| = |lambda|, so the anti-holomorphic factors reuse the same moduli
        return ball_max(hs * ht for hs in holo for ht in holo)


def topological_entropy(lambdas, precision_bits: int = DEFAULT_PRECISION, alpha: Optional[Ball] = None) -> EntropyReport:
    m = len(lambdas)
    r = [hpp_spectral_radius(lambdas, p, precision_bits) for p in range(m + 1)]
    with mp.workprec(precision_bits + GUARD_BITS):
        top = ball_max(r)
        best = max(range(m + 1), key=lambda p: r[p].mid)
        h = top.log()
        bound = 2 * alpha.log() if alpha is not None else None
    return EntropyReport(tuple(lambdas), tuple(r), h, best, bound)


@dataclass(frozen=True)
class BoundCheck:
    holds: bool
    equality: bool
    gap: mpmath.mpf  # upper bound of |h_top - 2 log alpha|
    h_top: Ball
    log_r1: Ball
    two_log_alpha: Ball


def check_entropy_bound(report: EntropyReport, alpha: Union[PisotCertificate, Ball], precision_bits=None) -> BoundCheck:
    """h_top >= log r_1 >= 2 log(alpha) > 0, plus equality with 2 log(alpha) for Pisot alpha.

    ``alpha`` is either a Pisot certificate or an enclosure of the largest conjugate
    modulus of a unit that is not Pisot (equality then typically fails).
    """
    if isinstance(alpha, PisotCertificate):
        value = alpha.dominant_root
        bits = precision_bits or alpha.precision_bits
    else:
        value = alpha
        bits = precision_bits or DEFAULT_PRECISION
    with mp.workprec(bits + GUARD_BITS):
        if value.lower <= 1:
            raise ValueError("alpha enclosure is not certainly > 1")
        two_log = 2 * value.log()
        log_r1 = report.r[1].log()
        h = report.h_top
        holds = (
            h.upper >= log_r1.lower
            and log_r1.upper >= two_log.lower
            and two_log.lower > 0
        )
        diff = h - two_log
        gap = diff.abs_upper()
        equality = diff.contains_zero()
    return BoundCheck(holds, equality, gap, h, log_r1, two_log)


def entropy_from_alpha(E: CMField, I: CMType, alpha: FieldElement, precision_bits: int = DEFAULT_PRECISION,
                       certificate: Optional[PisotCertificate] = None) -> EntropyReport:
    lambdas = h1_eigenvalues(E, I, alpha, precision_bits)
    bound = certificate.dominant_root if certificate is not None else None
    return topological_entropy(lambdas, precision_bits, bound)


# ---- independent route through exterior powers of the lattice matrix -----

def spectral_radius_exact(matrix, precision_bits: int = DEFAULT_PRECISION) -> Ball:
    """Spectral radius of an integer matrix from certified roots of its characteristic polynomial."""
    chi = IntPolynomial(tuple(int(c) for c in linalg.charpoly(matrix)))
    sf = squarefree_part(chi)
    if sf.degree < 1:
        return Ball(0)
    roots = isolate_roots(sf.coefficients, precision_bits)
    with mp.workprec(precision_bits + GUARD_BITS):
        return ball_max(abs(z) for z in roots)


def exterior_power_radii(L: LatticeAutomorphism, precision_bits: int = DEFAULT_PRECISION) -> list:
    """rho(Lambda^k M) for k = 0..2m on H^1 = Hom(lattice, Z); M^T has the same spectrum."""
    n = L.dimension
    return [spectral_radius_exact(linalg.exterior_power(L.matrix, k), precision_bits) for k in range(n + 1)]


def exterior_power_max(L: LatticeAutomorphism, precision_bits: int = DEFAULT_PRECISION) -> Ball:
    radii = exterior_power_radii(L, precision_bits)
    with mp.workprec(precision_bits + GUARD_BITS):
        return ball_max(radii)


def has_finite_order_below(matrix, bound: int = 12) -> Optional[int]:
    """Smallest k <= bound with M^k = I, if any."""
    n = len(matrix)
    ident = linalg.identity(n)
    cur = matrix
    for k in range(1, bound + 1):
        if cur == ident:
            return k
        cur = linalg.matmul(cur, matrix)
    return None


def symbolic_entropy(cert: PisotCertificate) -> str:
    lo, hi = cert.dominant_lower_bound, cert.dominant_upper_bound
    return f"2·log(α), α = root of {cert.minimal_poly} in ({lo}, {hi}]"
