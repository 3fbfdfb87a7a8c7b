from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from pisotcm.errors import PolynomialSyntaxError
from pisotcm.polynomial import (
    IntPolynomial,
    factor_degrees_mod_p,
    format_polynomial,
    irreducibility,
    isolate_real_root,
    parse_polynomial,
    squarefree_part,
    sturm_count,
)

X = sympy.Symbol("x")


@pytest.mark.parametrize(
    "text, coeffs",
    [
        ("x^2-x-1", (-1, -1, 1)),
        ("[−1, −1, 1]", (-1, -1, 1)),
        ("[-1, -1, 1]", (-1, -1, 1)),
        ("x^3 - x - 1", (-1, -1, 0, 1)),
        ("-x^2 + 3", (3, 0, -1)),
        ("2*x^4 - 4x^2 + 2", (2, 0, -4, 0, 2)),
        ("x", (0, 1)),
        ("7", (7,)),
        ("x^2 + x^2", (0, 0, 2)),
    ],
)
def test_parse(text, coeffs):
    assert parse_polynomial(text).coefficients == coeffs


@pytest.mark.parametrize(
    "text, position",
    [("x^2 -", 5), ("x^2 x", 4), ("1.5x + 1", 1), ("[1, 1/2]", 4), ("", 0), ("x^2-+2", 4)],
)
def test_parse_errors_carry_position(text, position):
    with pytest.raises(PolynomialSyntaxError) as info:
        parse_polynomial(text)
    assert info.value.position == position


def test_canonical_printing():
    assert str(parse_polynomial("[-1,-1,1]")) == "x^2 - x - 1"
    assert str(parse_polynomial("-x^3 + 2x - 5")) == "-x^3 + 2x - 5"
    assert format_polynomial([]) == "0"


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=8))
def test_print_parse_round_trip(coeffs):
    p = IntPolynomial(tuple(coeffs))
    assert parse_polynomial(str(p)) == p
    assert parse_polynomial(str(list(p.coefficients)) if p.coefficients else "0") == p


def test_leading_zeros_are_stripped():
    p = IntPolynomial((1, 2, 0, 0))
    assert p.degree == 1 and p.coefficients == (1, 2)
    assert IntPolynomial(()).degree == -1


def test_from_rationals_clears_content():
    p = IntPolynomial.from_rationals([Fraction(-1, 2), 0, Fraction(-3, 2)])
    assert p.coefficients == (1, 0, 3)


# ---- Sturm counts -------------------------------------------------------------

@pytest.mark.parametrize(
    "text, interval, expected",
    [
        ("x^2-2", (None, None), 2),
        ("x^2-x-1", (-1, 1), 1),
        ("x^3-x-1", (-1, 1), 0),
        ("x^2+1", (None, None), 0),
        ("x^3-x-1", (None, None), 1),
    ],
)
def test_sturm_examples(text, interval, expected):
    assert sturm_count(parse_polynomial(text), interval) == expected


def test_sturm_half_open_interval():
    p = parse_polynomial("x^2 - 1")
    assert sturm_count(p, (-1, 1)) == 1  # root 1 counted, root -1 excluded
    assert sturm_count(p, (-2, -1)) == 1
    assert sturm_count(p, (1, 2)) == 0


def test_sturm_squarefrees_internally():
    p = parse_polynomial("x^2 - 2") ** 2 * parse_polynomial("x - 3")
    assert sturm_count(p) == 3


def _float_count(coeffs, lo, hi):
    roots = np.roots(list(reversed(coeffs)))
    real = sorted({round(r.real, 9) for r in roots if abs(r.imag) < 1e-9})
    return sum(1 for r in real if (lo is None or r > lo) and (hi is None or r <= hi))


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.integers(-6, 6), min_size=2, max_size=6).filter(lambda c: c[-1] != 0),
    st.integers(-5, 5),
    st.integers(1, 6),
)
def test_sturm_matches_numeric_roots(coeffs, lo, span):
    p = IntPolynomial(tuple(coeffs))
    hi = lo + span
    sf = squarefree_part(p)
    # oracle: numpy roots away from the endpoints
    roots = np.roots(list(reversed(sf.coefficients)))
    if any(abs(r.imag) < 1e-6 and min(abs(r.real - lo), abs(r.real - hi)) < 1e-6 for r in roots):
        return
    assert sturm_count(p, (lo, hi)) == _float_count(sf.coefficients, lo, hi)


def test_isolate_real_root_bisects_exactly():
    lo, hi = isolate_real_root(parse_polynomial("x^2-2"), Fraction(1), Fraction(2), Fraction(1, 10**6))
    assert lo * lo < 2 <= hi * hi
    assert hi - lo <= Fraction(1, 10**6)


# ---- irreducibility -------------------------------------------------------

@pytest.mark.parametrize(
    "text",
    ["x^2-2", "x^2+1", "x^3-x-1", "x^3-3x+1", "x^4-4x^2+2", "x^5-x-1", "x^4-x^3-3x^2+x+1", "x^2-x-1"],
)
def test_irreducible_fields_verified(text):
    p = parse_polynomial(text)
    assert len(sympy.factor_list(sympy.Poly(list(reversed(p.coefficients)), X))[1]) == 1
    assert irreducibility(p).status == "verified"


@pytest.mark.parametrize("text", ["x^2-1", "x^3-x", "x^4-1", "x^3+x^2+x+1"])
def test_rational_root_is_a_reducibility_witness(text):
    assert irreducibility(parse_polynomial(text)).status == "reducible"


def test_repeated_factor_is_reducible():
    p = parse_polynomial("x^2-2") ** 2
    assert irreducibility(p).status == "reducible"


def test_swinnerton_dyer_quartic_stays_unverified():
    # irreducible over Q yet reducible modulo every prime
    assert irreducibility(parse_polynomial("x^4-10x^2+1")).status == "unverified"


def test_quartic_product_of_quadratics_not_verified():
    p = parse_polynomial("x^2-2") * parse_polynomial("x^2-3")
    assert irreducibility(p).status != "verified"


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
def test_factor_degrees_mod_p_against_sympy(p):
    poly = parse_polynomial("x^5 - x - 1")
    degrees = factor_degrees_mod_p(poly, p)
    _, factors = sympy.factor_list(sympy.Poly(list(reversed(poly.coefficients)), X, modulus=p))
    expected = sorted(f.degree() for f, mult in factors for _ in range(mult))
    assert degrees == expected
