import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qhj.errors import AmbiguousWinding, DegenerateSystem, NonFiniteSample, NoPolynomialSolution
from qhj.numerics import (
    apply_ode,
    contour_coefficient,
    default_seed,
    jacobi,
    jacobi_explicit,
    laguerre,
    ode_polynomial_solution,
    winding_number,
)

from oracles import jacobi_low, laguerre_sum

cplx = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("n,a,y,want", [(0, 5, 2.7, 1), (1, 2, 1, 2), (2, 0, 1, -0.5)])
def test_laguerre_examples(n, a, y, want):
    assert laguerre(n, a, y) == pytest.approx(want, abs=1e-14)


@pytest.mark.parametrize("n,a,b,y,want", [(0, 0.3, 2.0, 0.7, 1), (1, 1, 1, 0, 0), (2, 0, 0, 1, 1)])
def test_jacobi_examples(n, a, b, y, want):
    assert jacobi(n, a, b, y) == pytest.approx(want, abs=1e-14)


def test_recurrences_match_closed_forms_on_random_complex_arguments():
    rng = np.random.default_rng(7)
    for _ in range(100):
        a, b, y = (complex(*rng.uniform(-2, 2, 2)) for _ in range(3))
        for n in range(3):
            ref = laguerre_sum(n, a, y)
            assert abs(laguerre(n, a, y) - ref) <= 1e-12 * max(1, abs(ref))
            ref = jacobi_low(n, a, b, y)
            assert abs(jacobi(n, a, b, y) - ref) <= 1e-12 * max(1, abs(ref))
            assert abs(jacobi_explicit(n, a, b, y) - ref) <= 1e-12 * max(1, abs(ref))


@settings(max_examples=60, deadline=None)
@given(n=st.integers(0, 6), a=cplx, b=cplx, y=cplx)
def test_jacobi_recurrence_agrees_with_finite_sum(n, a, b, y):
    ref = jacobi_explicit(n, a, b, y)
    assert abs(jacobi(n, a, b, y) - ref) <= 1e-9 * max(1, abs(ref))


def test_jacobi_falls_back_when_recurrence_is_singular():
    # a + b = -3 makes the k=1 denominator vanish
    got = jacobi(3, -1.0, -2.0, 0.4)
    assert got == pytest.approx(jacobi_explicit(3, -1.0, -2.0, 0.4))


def test_negative_degree_rejected():
    with pytest.raises(ValueError):
        laguerre(-1, 0, 0)
    with pytest.raises(ValueError):
        jacobi(-1, 0, 0, 0)


def _monic(coefs):
    c = np.asarray(coefs, dtype=complex)
    return c / c[-1]


def test_laguerre_ode_degree_two():
    P = ode_polynomial_solution([0, 1], [1, -1], [2], 2)
    assert np.allclose(P.coef, _monic([2, -4, 1]), atol=1e-12)


def test_laguerre_ode_degree_one():
    P = ode_polynomial_solution([0, 1], [4, -1], [1], 1)
    assert np.allclose(P.coef, [-4, 1], atol=1e-12)


def test_degree_zero_is_constant():
    P = ode_polynomial_solution([0, 1], [1, -1], [0], 0)
    assert np.allclose(P.coef, [1])


def test_no_solution_and_degenerate_cases():
    with pytest.raises(NoPolynomialSolution):
        ode_polynomial_solution([0, 1], [1, -1], [2], 3)
    with pytest.raises(NoPolynomialSolution):
        ode_polynomial_solution([0, 1], [1, -1], [1], 0)
    # P'' = 0 has every linear polynomial as a solution
    with pytest.raises(DegenerateSystem):
        ode_polynomial_solution([1], [0], [0], 1)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(0, 8), a=st.floats(-0.9, 5))
def test_ode_solution_residual_is_small(n, a):
    p2, p1, p0 = [0, 1], [1 + a, -1], [n]
    P = ode_polynomial_solution(p2, p1, p0, n)
    res = apply_ode(p2, p1, p0, P)
    assert np.max(np.abs(res.coef)) < 1e-10 * max(1.0, np.max(np.abs(P.coef)))
    assert P.degree() == n and P.coef[-1] == pytest.approx(1)


@pytest.mark.parametrize("f,center,k,want", [
    (lambda y: 1 / y, 0, -1, 1),
    (lambda y: 1 / (y - 2) ** 2, 2, -1, 0),
    (lambda y: cmath.exp(y) / y, 0, -1, 1),
])
def test_contour_coefficient_examples(f, center, k, want):
    assert abs(contour_coefficient(f, center, k, 0.5) - want) < 1e-12


def test_contour_coefficient_recovers_laurent_coefficients():
    rng = np.random.default_rng(3)
    for _ in range(20):
        c = complex(*rng.uniform(-2, 2, 2))
        coef = {j: complex(*rng.uniform(-1, 1, 2)) for j in range(-3, 4)}
        f = lambda y: sum(v * (y - c) ** j for j, v in coef.items())
        for j, v in coef.items():
            assert abs(contour_coefficient(f, c, j, 0.8) - v) < 1e-10


def test_contour_rejects_bad_arguments():
    with pytest.raises(ValueError):
        contour_coefficient(lambda y: y, 0, 0, 1.0, samples=8)
    with pytest.raises(ValueError):
        contour_coefficient(lambda y: y, 0, 0, 0.0)
    with pytest.raises(NonFiniteSample):
        contour_coefficient(lambda y: float("nan"), 0, 0, 1.0)


@pytest.mark.parametrize("f,radius,want", [
    (lambda y: y**3, 1, 3),
    (lambda y: 1 / y, 1, -1),
    (lambda y: 10 - 5 * y + y * y / 2, 8, 2),
])
def test_winding_examples(f, radius, want):
    assert winding_number(f, 0, radius) == want


def test_winding_with_analytic_derivative():
    assert winding_number(lambda y: y * y - 1, 0, 2, df=lambda y: 2 * y) == 2


def test_winding_invariant_under_radius_changes_that_cross_no_root():
    rng = np.random.default_rng(11)
    for _ in range(20):
        mods = np.array([0.3, 0.6, 1.6, 2.2]) * rng.uniform(0.9, 1.1, 4)
        roots = mods * np.exp(1j * rng.uniform(-np.pi, np.pi, 4))
        f = lambda y: np.prod(y - roots)
        r1, r2 = rng.uniform(0.8, 1.0), rng.uniform(1.0, 1.3)
        assert winding_number(f, 0, r1) == winding_number(f, 0, r2) == 2


def test_winding_ambiguous_when_root_on_contour():
    with pytest.raises(AmbiguousWinding):
        winding_number(lambda y: y - 1.0, 0, 1.0, 16)


def test_default_seed_reads_environment(monkeypatch):
    monkeypatch.delenv("QHJ_SEED", raising=False)
    assert default_seed() == 42
    monkeypatch.setenv("QHJ_SEED", "5")
    assert default_seed() == 5
