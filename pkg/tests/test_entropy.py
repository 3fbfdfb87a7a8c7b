import math
from itertools import combinations

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from pisotcm import (
    check_entropy_bound,
    enumerate_cm_types,
    find_pisot_unit,
    h1_eigenvalues,
    hpp_spectral_radius,
    is_pisot_unit,
    make_cm_field,
    make_field,
    multiplication_matrix,
    parse_polynomial,
    topological_entropy,
)
from pisotcm import linalg
from pisotcm.balls import Ball, ball_max
from pisotcm.cmtorus import canonical_cm_type
from pisotcm.entropy import (
    entropy_from_alpha,
    exterior_power_max,
    exterior_power_radii,
    has_finite_order_below,
    symbolic_entropy,
)

PHI = (1 + math.sqrt(5)) / 2


def brute_r(values, p):
    """Float oracle for r_p straight from the definition."""
    subsets = list(combinations(range(len(values)), p))
    return max(
        abs(np.prod([values[i] for i in S])) * abs(np.prod([np.conj(values[j]) for j in T]))
        for S in subsets
        for T in subsets
    )


@pytest.fixture(scope="module")
def cubic_cm():
    K = make_field(parse_polynomial("x^3-3x+1"))
    return make_cm_field(K, K.element([-2, 1]))


# ---- eigenvalues ------------------------------------------------------------------

def test_zeta5_eigenvalues(zeta5, golden):
    lambdas = h1_eigenvalues(zeta5, canonical_cm_type(2), golden.generator())
    assert sorted(round(float(l.mid), 7) for l in lambdas) == [-0.618034, 1.618034]


def test_identity_eigenvalues(zeta5, golden):
    assert [l.mid for l in h1_eigenvalues(zeta5, canonical_cm_type(2), golden.one())] == [1, 1]


def test_eigenvalue_set_independent_of_type(zeta5, golden):
    ref = sorted(float(l.mid) for l in h1_eigenvalues(zeta5, canonical_cm_type(2), golden.generator()))
    for I in enumerate_cm_types(zeta5, "all"):
        assert sorted(float(l.mid) for l in h1_eigenvalues(zeta5, I, golden.generator())) == ref


# ---- r_p ---------------------------------------------------------------------------

def test_zeta5_radii(zeta5, golden):
    lambdas = h1_eigenvalues(zeta5, canonical_cm_type(2), golden.generator())
    assert hpp_spectral_radius(lambdas, 0).mid == 1
    assert abs(float(hpp_spectral_radius(lambdas, 1).mid) - PHI**2) < 1e-14
    assert hpp_spectral_radius(lambdas, 2).contains(1)
    with pytest.raises(ValueError):
        hpp_spectral_radius(lambdas, 3)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3)), min_size=1, max_size=4))
def test_radii_match_definition(pairs):
    values = [complex(a, b) for a, b in pairs]
    lambdas = [Ball(mpmath.mpc(v)) for v in values]
    for p in range(len(values) + 1):
        assert float(hpp_spectral_radius(lambdas, p).mid) == pytest.approx(brute_r(values, p), rel=1e-12, abs=1e-300)


def test_complement_relation_for_units(cubic_cm):
    for cert in find_pisot_unit(cubic_cm.base, 1):
        lambdas = h1_eigenvalues(cubic_cm, canonical_cm_type(3), cert.alpha)
        moduli = [abs(float(l.mid)) for l in lambdas]
        for p in range(4):
            smallest = min(np.prod([moduli[i] for i in S]) ** 2 for S in combinations(range(3), 3 - p))
            assert float(hpp_spectral_radius(lambdas, p).mid) == pytest.approx(1 / smallest, rel=1e-12)


# ---- topological entropy -------------------------------------------------------------

def test_zeta5_entropy(zeta5, golden):
    report = entropy_from_alpha(zeta5, canonical_cm_type(2), golden.generator())
    assert abs(float(report.h_top.mid) - 2 * math.log(PHI)) < 1e-15
    assert round(float(report.h_top.mid), 7) == 0.9624237
    assert report.maximizing_p == 1 and report.r[0].mid == 1


def test_gauss_sqrt2_entropy(gauss_sqrt2, sqrt2):
    report = entropy_from_alpha(gauss_sqrt2, canonical_cm_type(2), 1 + sqrt2.generator())
    assert abs(float(report.h_top.mid) - 2 * math.log(1 + math.sqrt(2))) < 1e-15
    assert round(float(report.h_top.mid), 7) == 1.7627472


def test_unimodular_eigenvalues_have_zero_entropy():
    lambdas = [Ball(mpmath.mpc(1, 0)), Ball(mpmath.mpc(0, -1)), Ball(mpmath.mpc(-1, 0))]
    report = topological_entropy(lambdas)
    assert report.h_top.contains(0) and report.h_top.width() < 1e-30


def test_entropy_independent_of_type(cubic_cm):
    alpha = find_pisot_unit(cubic_cm.base, 1)[0].alpha
    ref = entropy_from_alpha(cubic_cm, canonical_cm_type(3), alpha)
    for I in enumerate_cm_types(cubic_cm, "all"):
        other = entropy_from_alpha(cubic_cm, I, alpha)
        assert other.h_top.overlaps(ref.h_top)
        assert all(a.overlaps(b) for a, b in zip(other.r, ref.r))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 20), st.integers(1, 3))
def test_entropy_scales_under_powers(cubic_cm, index, k):
    units = find_pisot_unit(cubic_cm.base, 1)
    alpha = units[index % len(units)].alpha
    I = canonical_cm_type(3)
    h = entropy_from_alpha(cubic_cm, I, alpha).h_top
    hk = entropy_from_alpha(cubic_cm, I, alpha**k).h_top
    with mpmath.mp.workprec(200):
        assert (h * k).overlaps(hk)


# ---- bound ----------------------------------------------------------------------------

def test_bound_zeta5(zeta5, golden):
    cert = is_pisot_unit(golden.generator())
    report = entropy_from_alpha(zeta5, canonical_cm_type(2), cert.alpha, certificate=cert)
    check = check_entropy_bound(report, cert)
    assert check.holds and check.equality and check.gap < 1e-25


def test_bound_gauss_sqrt2(gauss_sqrt2, sqrt2):
    cert = is_pisot_unit(1 + sqrt2.generator())
    report = entropy_from_alpha(gauss_sqrt2, canonical_cm_type(2), cert.alpha)
    check = check_entropy_bound(report, cert)
    assert check.holds and check.equality


def test_non_pisot_unit_breaks_equality(cubic_cm):
    theta = cubic_cm.base.generator()
    alpha = theta * theta  # conjugates about 3.53, 2.35, 0.12
    conj = sorted(r**2 for r in np.roots([1, 0, -3, 1]).real)
    assert conj[1] > 1 and conj[2] > 1
    report = entropy_from_alpha(cubic_cm, canonical_cm_type(3), alpha)
    assert float(report.h_top.mid) == pytest.approx(math.log((conj[1] * conj[2]) ** 2), rel=1e-12)
    top = ball_max(abs(l) for l in report.lambdas)
    check = check_entropy_bound(report, top)
    assert check.holds and not check.equality
    assert check.gap > 1


def test_bound_requires_alpha_above_one():
    with pytest.raises(ValueError):
        check_entropy_bound(topological_entropy([Ball(1), Ball(1)]), Ball(1))


def test_symbolic_form(golden):
    text = symbolic_entropy(is_pisot_unit(golden.generator()))
    assert text.startswith("2·log(α), α = root of x^2 - x - 1 in (")


# ---- independent exterior-power route ------------------------------------------------------

def test_exterior_power_oracle_zeta5(zeta5, golden):
    L = multiplication_matrix(zeta5, golden.generator())
    radii = [float(r.mid) for r in exterior_power_radii(L)]
    assert radii == pytest.approx([1, PHI, PHI**2, PHI, 1], rel=1e-14)
    report = entropy_from_alpha(zeta5, canonical_cm_type(2), golden.generator())
    assert exterior_power_max(L).overlaps(max(report.r, key=lambda b: b.mid))


@pytest.mark.parametrize("poly, delta, height", [("x^2-2", (-1,), 2), ("x^3-3x+1", (-2, 1), 1), ("x^2-x-1", (-2, -1), 2)])
def test_exterior_power_oracle_matches_subsets(poly, delta, height):
    K = make_field(parse_polynomial(poly))
    E = make_cm_field(K, K.element(delta))
    for cert in find_pisot_unit(K, height)[:3]:
        L = multiplication_matrix(E, cert.alpha)
        report = entropy_from_alpha(E, canonical_cm_type(K.degree), cert.alpha)
        with mpmath.mp.workprec(200):
            assert exterior_power_max(L).overlaps(max(report.r, key=lambda b: b.mid))


def test_exterior_power_against_sympy(zeta5, golden):
    M = multiplication_matrix(zeta5, golden.generator()).matrix
    for k in range(5):
        ours = linalg.exterior_power(M, k)
        ev = sympy.Matrix(ours).eigenvals() if ours else {1: 1}
        rho = max(abs(complex(sympy.N(e, 30))) for e in ev)
        assert float(exterior_power_radii(multiplication_matrix(zeta5, golden.generator()))[k].mid) == pytest.approx(rho)


def test_infinite_order(zeta5, golden):
    L = multiplication_matrix(zeta5, golden.generator())
    assert has_finite_order_below(L.matrix, 12) is None
    minus = multiplication_matrix(zeta5, golden.element([-1]))
    assert has_finite_order_below(minus.matrix, 12) == 2
