import math
from fractions import Fraction
from itertools import product

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from pisotcm import (
    enumerate_cm_types,
    find_pisot_unit,
    make_cm_field,
    make_field,
    minimal_polynomial,
    multiplication_matrix,
    parse_polynomial,
    period_matrix,
    simplicity_check,
    verify_descent,
)
from pisotcm import linalg
from pisotcm.cmtorus import CMType, LatticeAutomorphism, canonical_cm_type, descent_tolerance
from pisotcm.errors import Rejection
from pisotcm.numberfield import embed

X = sympy.Symbol("x")


# ---- make_cm_field ------------------------------------------------------------

def test_gauss_sqrt2_accepted(gauss_sqrt2):
    assert gauss_sqrt2.m == 2
    assert gauss_sqrt2.order_basis == ("1", "θ", "√δ", "θ·√δ")


def test_zeta5_delta_embeddings(zeta5):
    values = [float(v.mid) for v in embed(zeta5.delta)]
    # -theta - 2 at theta = (1 -+ sqrt 5)/2
    assert values[0] == pytest.approx(-(1 - math.sqrt(5)) / 2 - 2)
    assert values[1] == pytest.approx(-(1 + math.sqrt(5)) / 2 - 2)
    assert sorted(round(v, 3) for v in values) == [-3.618, -1.382]


def test_zeta5_discriminant_identity(golden):
    # zeta_5 satisfies z^2 - (theta - 1) z + 1 over K; its discriminant is (theta - 1)^2 - 4
    t = golden.generator()
    assert (t - 1) * (t - 1) - 4 == golden.element([-2, -1])


def test_positive_delta_rejected(sqrt2):
    with pytest.raises(Rejection) as info:
        make_cm_field(sqrt2, sqrt2.generator())
    assert info.value.reason == "delta-not-totally-negative"
    assert "embedding 1" in str(info.value)


@pytest.mark.parametrize(
    "base, delta, reason",
    [("x^3-x-1", (-1,), "not-totally-real"), ("x^2-2", (Fraction(-1, 2),), "not-integral")],
)
def test_cm_field_rejections(base, delta, reason):
    K = make_field(parse_polynomial(base))
    with pytest.raises(Rejection) as info:
        make_cm_field(K, K.element(delta))
    assert info.value.reason == reason


# ---- CM types -----------------------------------------------------------------

@pytest.mark.parametrize("m", [1, 2, 3])
def test_cm_type_count(m):
    types = enumerate_cm_types(m, "all")
    assert len(types) == 2**m * math.factorial(m)
    assert len({(t.ordering, t.signs) for t in types}) == len(types)
    assert [(t.ordering, t.signs) for t in types] == sorted(
        ((t.ordering, t.signs) for t in types), key=lambda p: (p[0], [-s for s in p[1]])
    )


def test_canonical_type(zeta5):
    I = enumerate_cm_types(zeta5, "canonical")
    assert I == canonical_cm_type(2) == CMType((0, 1), (1, 1))
    assert enumerate_cm_types(4).signs == (1, 1, 1, 1)


def test_bad_cm_type():
    with pytest.raises(ValueError):
        CMType((0, 0), (1, 1))
    with pytest.raises(ValueError):
        CMType((0, 1), (1, 2))
    with pytest.raises(ValueError):
        enumerate_cm_types(2, "some")


# ---- period matrix ------------------------------------------------------------

def test_period_matrix_gauss_sqrt2(gauss_sqrt2):
    T = period_matrix(gauss_sqrt2, canonical_cm_type(2))
    r2 = math.sqrt(2)
    expected = [[1, -r2, 1j, -r2 * 1j], [1, r2, 1j, r2 * 1j]]
    for row, exp in zip(T.period_matrix, expected):
        assert len(row) == 4
        for entry, e in zip(row, exp):
            assert abs(complex(entry.mid) - e) < 1e-15
    assert not T.real_determinant.contains_zero()


def test_period_matrix_gaussian_integers():
    Q = make_field(parse_polynomial("x"))
    E = make_cm_field(Q, Q.element([-1]))
    T = period_matrix(E, canonical_cm_type(1))
    assert [complex(b.mid) for b in T.period_matrix[0]] == [1, 1j]


def test_branch_sign_flips_column(gauss_sqrt2):
    T = period_matrix(gauss_sqrt2, CMType((1, 0), (1, -1)))
    assert abs(complex(T.period_matrix[0][1].mid) - math.sqrt(2)) < 1e-15
    assert abs(complex(T.period_matrix[1][2].mid) + 1j) < 1e-15


def test_period_matrix_shape_all_types(zeta5):
    for I in enumerate_cm_types(zeta5, "all"):
        T = period_matrix(zeta5, I)
        assert len(T.period_matrix) == 2 and all(len(r) == 4 for r in T.period_matrix)


# ---- multiplication matrix and descent -----------------------------------------

def test_golden_matrix(zeta5, golden):
    L = multiplication_matrix(zeta5, golden.generator())
    assert L.matrix == ((0, 1, 0, 0), (1, 1, 0, 0), (0, 0, 0, 1), (0, 0, 1, 1))
    assert linalg.det(L.matrix) == 1


def test_sqrt2_matrix(gauss_sqrt2, sqrt2):
    L = multiplication_matrix(gauss_sqrt2, 1 + sqrt2.generator())
    assert L.matrix == ((1, 2, 0, 0), (1, 1, 0, 0), (0, 0, 1, 2), (0, 0, 1, 1))
    assert linalg.det(L.matrix) == 1


def test_identity_matrix(zeta5, golden):
    L = multiplication_matrix(zeta5, golden.one())
    assert L.matrix == linalg.identity(4)
    T = period_matrix(zeta5, canonical_cm_type(2))
    assert verify_descent(T, L) < mpmath.mpf(10) ** -35


@pytest.mark.parametrize("coords, reason", [((0, 2), "not-a-unit"), ((Fraction(1, 2), 0), "not-integral")])
def test_matrix_rejections(zeta5, golden, coords, reason):
    with pytest.raises(Rejection) as info:
        multiplication_matrix(zeta5, golden.element(coords))
    assert info.value.reason == reason


def test_descent_zeta5(zeta5, golden):
    L = multiplication_matrix(zeta5, golden.generator())
    for I in enumerate_cm_types(zeta5, "all"):
        residual = verify_descent(period_matrix(zeta5, I), L)
        assert residual < 1e-25
        assert residual <= descent_tolerance(128)


def test_descent_detects_corruption(zeta5, golden):
    L = multiplication_matrix(zeta5, golden.generator())
    bad = [list(r) for r in L.matrix]
    bad[0][1] += 1
    corrupted = LatticeAutomorphism(tuple(map(tuple, bad)), L.alpha, L.embeddings)
    assert verify_descent(period_matrix(zeta5, canonical_cm_type(2)), corrupted) > 0.1


def test_descent_dimension_mismatch(zeta5, golden):
    L = multiplication_matrix(zeta5, golden.generator())
    small = LatticeAutomorphism(((1, 0), (0, 1)), L.alpha, L.embeddings)
    with pytest.raises(ValueError):
        verify_descent(period_matrix(zeta5, canonical_cm_type(2)), small)


def test_residual_scales_with_precision(zeta5, golden):
    I = canonical_cm_type(2)
    alpha = golden.generator()
    r64 = verify_descent(period_matrix(zeta5, I, 64), multiplication_matrix(zeta5, alpha, 64))
    r128 = verify_descent(period_matrix(zeta5, I, 128), multiplication_matrix(zeta5, alpha, 128))
    r256 = verify_descent(period_matrix(zeta5, I, 256), multiplication_matrix(zeta5, alpha, 256))
    assert r128 <= r64 / 2 and r256 <= r128 / 2


# ---- matrix properties ----------------------------------------------------------

@pytest.fixture(scope="module")
def cubic_cm():
    K = make_field(parse_polynomial("x^3-3x+1"))
    return make_cm_field(K, K.element([-2, 1]))


@pytest.fixture(scope="module")
def cubic_units(cubic_cm):
    return [c.alpha for c in find_pisot_unit(cubic_cm.base, 1)]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 50), st.integers(0, 50))
def test_matrix_is_multiplicative(cubic_cm, cubic_units, i, j):
    a, b = cubic_units[i % len(cubic_units)], cubic_units[j % len(cubic_units)]
    Ma = multiplication_matrix(cubic_cm, a).matrix
    Mb = multiplication_matrix(cubic_cm, b).matrix
    Mab = multiplication_matrix(cubic_cm, a * b).matrix
    assert linalg.matmul(Ma, Mb) == Mab


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 50))
def test_unit_matrix_is_unimodular(cubic_cm, cubic_units, i):
    a = cubic_units[i % len(cubic_units)]
    M = multiplication_matrix(cubic_cm, a).matrix
    assert abs(linalg.det(M)) == 1
    inv = linalg.inverse(M)
    assert all(Fraction(x).denominator == 1 for row in inv for x in row)
    assert linalg.matmul(M, inv) == linalg.identity(6)


def test_charpoly_is_minpoly_squared(cubic_cm, cubic_units):
    for a in cubic_units:
        M = multiplication_matrix(cubic_cm, a).matrix
        mu = minimal_polynomial(a)
        assert tuple(linalg.charpoly(M)) == (mu * mu).coefficients
        # oracle: sympy charpoly
        sym = sympy.Matrix(M).charpoly(X).all_coeffs()
        assert list(reversed([int(c) for c in sym])) == list((mu * mu).coefficients)


# ---- simplicity -----------------------------------------------------------------

def test_gauss_sqrt2_not_simple(gauss_sqrt2):
    v = simplicity_check(gauss_sqrt2, canonical_cm_type(2), 2)
    assert v.status == "not-simple"
    assert v.witness["y"] == ["1", "0"] and v.witness["square"] == "-1"
    assert v.witness["restricted_signs"] == [1, 1]


def test_gauss_sqrt2_mixed_type_induced_from_sqrt_minus_2(gauss_sqrt2):
    v = simplicity_check(gauss_sqrt2, CMType((0, 1), (1, -1)), 1)
    # sqrt(-1) is skipped (signs differ); theta*sqrt(delta) = sqrt(-2) goes to -sqrt(2)i under both rows
    assert v.status == "not-simple"
    assert v.witness["square"] == "-2" and v.witness["restricted_signs"] == [-1, -1]


def _zeta5_rational_squares(H):
    """Sympy oracle: y in Z[theta] of height <= H with y^2 * (-theta - 2) rational."""
    t = sympy.Symbol("t")
    g = sympy.Poly(t**2 - t - 1, t)
    hits = []
    for a, b in product(range(-H, H + 1), repeat=2):
        if (a, b) == (0, 0):
            continue
        r = sympy.Poly((a + b * t) ** 2 * (-t - 2), t).rem(g)
        if r.degree() <= 0:
            hits.append((a, b))
    return hits


def test_zeta5_simple_height_bounded(zeta5):
    assert _zeta5_rational_squares(10) == []
    v = simplicity_check(zeta5, canonical_cm_type(2), 10)
    assert v.status == "simple" and v.height_bounded and v.searched_height == 10


def test_cubic_unknown(cubic_cm):
    v = simplicity_check(cubic_cm, canonical_cm_type(3), 5)
    assert v.status == "unknown" and v.searched_height == 5


def test_dimension_one_is_simple():
    Q = make_field(parse_polynomial("x"))
    E = make_cm_field(Q, Q.element([-1]))
    assert simplicity_check(E, canonical_cm_type(1), 3).status == "simple"
