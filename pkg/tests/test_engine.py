import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qhj import engine
from qhj.engine import (
    EnergyLevel,
    applicable_formulas,
    build_eigenfunction,
    candidates,
    eigenfunction_value,
    eq49_case,
    infinity_behavior,
    local_balance,
    pole_residues,
    polynomial_roots,
    printed_eigenfunction,
    printed_energy,
    printed_residues,
    qmf_value,
    quantization_defect,
    quantize,
    resolve_policy,
    sample_eigenfunction,
    special_case_identity,
    transform,
)
from qhj.errors import (
    EvaluationAtNode,
    EvaluationAtPole,
    InvalidPotential,
    NoBoundState,
    UnknownFormula,
    UnphysicalParameters,
)
from qhj.numerics import contour_coefficient, laguerre
from qhj.potentials import GeneralizedMorse, PoschlTeller, morse_abc, morse_omega_d, morse_pt

from oracles import morse_exact, sech2_exact

MORSE = GeneralizedMorse(1, 6, 1)
PT = PoschlTeller(1, 1, 1)
GOLD = (math.sqrt(5) - 1) / 2


def selected(p, n, policy="auto"):
    r = transform(p)
    return r, quantize(r, n, policy)[0]


# ---- transform

def test_map_values():
    assert transform(MORSE).y_of_x(0.0) == pytest.approx(1)
    assert transform(PT).y_of_x(0.0) == pytest.approx(1j)
    assert transform(PT, sign=-1).y_of_x(0.0) == pytest.approx(-1j)
    with pytest.raises(InvalidPotential):
        transform(PT, sign=2)


def test_map_inverse():
    r = transform(GeneralizedMorse(2 + 1j, 3, 0.8))
    xs = np.array([-1.0, 0.3, 2.0])
    assert np.allclose(r.x_of_y(r.y_of_x(xs)), xs)


def test_riccati_q_example():
    assert transform(MORSE).Q(1.0, -6.25) == pytest.approx(-1.0)


@pytest.mark.parametrize("p", [MORSE, PT, morse_abc(1, 2, 3), PoschlTeller(2j, 3j, 1)])
def test_q_numerator_over_denominator(p):
    r = transform(p)
    for y in (0.3 + 0.2j, -1.7 + 0.5j, 2.2j):
        E = -0.4 + 0.1j
        assert r.q_numerator(E)(y) / r.q_denominator()(y) == pytest.approx(r.Q(y, E), rel=1e-12)


def test_schrodinger_reduces_to_riccati():
    """psi(x) = y^(-1/2) exp(int chi dy) must solve -psi'' + V psi = E psi."""
    r, lv = selected(MORSE, 1)
    ef = build_eigenfunction(r, lv)
    x, h = 0.4, 1e-3
    psi = [eigenfunction_value(ef, x + k * h) for k in (-1, 0, 1)]
    d2 = (psi[0] - 2 * psi[1] + psi[2]) / h**2
    V = 1 * math.exp(-2 * x) - 6 * math.exp(-x)
    assert abs(-d2 + (V - lv.energy) * psi[1]) < 1e-5 * abs(psi[1]) * 10


# ---- balances

def test_local_balance_orientation():
    assert local_balance(0.25 - 6.25) == pytest.approx((3, -2))
    assert local_balance(-1.0, -1) == pytest.approx((GOLD, -1 - GOLD))


def test_morse_pole_residues():
    rs = pole_residues(transform(MORSE), -6.25)
    assert rs.b1_pair == pytest.approx((3, -2))
    assert rs.b1p_pair is None
    assert rs.lambda_pair == pytest.approx((3, -3))
    assert rs.a0 == pytest.approx(-1)


def test_pt_pole_residues():
    E = -GOLD**2
    rs = pole_residues(transform(PT), E)
    assert rs.b1_pair == pytest.approx((0.5 + GOLD, 0.5 - GOLD))
    assert rs.b1p_pair == pytest.approx((GOLD, -1 - GOLD))
    assert rs.b1pp_pair == pytest.approx(rs.b1p_pair)
    assert sorted(z.real for z in rs.lambda_pair) == pytest.approx([0.5 - GOLD, 0.5 + GOLD])
    assert rs.a0 == 0


def test_printed_b1p_differs_from_balance():
    printed = printed_residues(PT, -GOLD**2)["eq41_b1p"]
    assert printed == pytest.approx((2, -1))


def test_lambda_vanishes_without_linear_term():
    assert infinity_behavior(transform(GeneralizedMorse(1, 0, 1)), -1).lambda_pair == pytest.approx((0, 0))


# ---- quantization

@pytest.mark.parametrize("n,E", [(0, -6.25), (1, -2.25), (2, -0.25)])
def test_morse_levels(n, E):
    energies = [lv.energy for lv in candidates(transform(MORSE), n)]
    assert any(abs(e - E) < 1e-12 for e in energies)
    assert quantize(transform(MORSE), n)[0].energy == pytest.approx(E, abs=1e-12)


def test_morse_rejected_candidate_grows():
    r = transform(MORSE)
    lvs = candidates(r, 0)
    assert [lv.energy.real for lv in lvs] == pytest.approx([-6.25, -12.25])
    assert [engine.decays(r, lv) for lv in lvs] == [True, False]


def test_no_bound_state_beyond_count():
    with pytest.raises(NoBoundState):
        quantize(transform(MORSE), 3)


def test_pt_ground_state_all_branch_policies():
    r = transform(PT)
    for policy in ("decay", "min_residual"):
        assert quantize(r, 0, policy)[0].energy == pytest.approx(-GOLD**2, abs=1e-12)
    assert len(quantize(r, 0, "all")) == 2
    assert quantize(r, 0, "continuation")[0].energy == pytest.approx(-GOLD**2, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(v0=st.floats(0.2, 20), q=st.floats(0.2, 5), a=st.floats(0.3, 2))
def test_pt_matches_sech2_levels(v0, q, a):
    p = PoschlTeller(v0, q, a)
    r = transform(p)
    n = 0
    while True:
        try:
            lv = quantize(r, n, "decay")[0]
        except NoBoundState:
            break
        assert lv.energy.real == pytest.approx(sech2_exact(v0, q, a, n), rel=1e-9, abs=1e-12)
        n += 1
    lam = 0.5 * (1 + math.sqrt(1 + 4 * v0 / (q * a * a)))
    assert n == max(0, math.ceil(lam - 1))


@settings(max_examples=40, deadline=None)
@given(v1=st.floats(0.2, 5), s=st.floats(1.2, 12), a=st.floats(0.3, 2), data=st.data())
def test_morse_pipeline_equals_printed_closed_form_when_bound(v1, s, a, data):
    n_max = math.ceil((s - 1) / 2) - 1
    n = data.draw(st.integers(0, max(0, n_max)))
    if 2 * n + 1 >= s:
        return
    v2 = s * a * math.sqrt(v1)
    r, lv = selected(GeneralizedMorse(v1, v2, a), n)
    eq22 = printed_energy("eq22", {"v1": v1, "v2": v2, "alpha": a}, n)[0].energy
    assert abs(lv.energy - eq22) <= 1e-10 * max(1, abs(eq22))
    assert lv.energy.real == pytest.approx(morse_exact(v1, v2, a, n), rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("p,n", [(MORSE, 0), (MORSE, 2), (PT, 0), (morse_abc(1, 2, 3), 1),
                                 (PoschlTeller(2j, 3j, 1), 0), (morse_pt(1, 2, 1), 2),
                                 (PoschlTeller(1j, 2j, 1j), 1)])
def test_quantization_relation_holds_on_resubstitution(p, n):
    r = transform(p)
    for lv in candidates(r, n):
        assert abs(quantization_defect(r, lv)) < 1e-10


def test_resolved_policies():
    assert resolve_policy(transform(MORSE), "auto") == "decay"
    assert resolve_policy(transform(morse_abc(1, 2, 3)), "auto") == "min_residual"
    assert resolve_policy(transform(morse_pt(1, 2, 1)), "auto") == "continuation"
    with pytest.raises(ValueError):
        resolve_policy(transform(MORSE), "nearest")


def test_complex_translate_of_real_morse_keeps_its_spectrum():
    r = transform(morse_abc(1, 2, 3))
    got = [quantize(r, n)[0].energy for n in range(3)]
    assert got == pytest.approx([-9, -4, -1], abs=1e-10)


def test_pt_imaginary_parameters_single_bound_level():
    r = transform(PoschlTeller(2j, 3j, 1))
    assert quantize(r, 0)[0].energy == pytest.approx(sech2_exact(2, 3, 1, 0), abs=1e-12)
    with pytest.raises(NoBoundState):
        quantize(r, 1)


def test_energy_level_rejects_negative_n():
    with pytest.raises(ValueError):
        EnergyLevel(-1, 0, "pipeline")


# ---- printed formulas

@pytest.mark.parametrize("fid,params,n,want", [
    ("eq22", {"v1": 1, "v2": 6, "alpha": 1}, 1, [-2.25]),
    ("eq35", {"omega": 1, "D": 2}, 0, [4]),
    ("eq48", {"v0": 1, "q": 1, "alpha": 1}, 0, [-4, -1]),
    ("eq30", {"C": 3}, 1, [-4]),
    ("eq32", {"v1": 1, "A": 2, "B": 0, "alpha": 1}, 0, [0.25]),
    ("eq34", {"v1": -1, "v2": 3, "alpha": 2}, 0, [25]),
    ("eq52", {"v0": 1, "alpha": 1}, 0, [4]),
    ("eq54", {"v0": 1, "q": 1, "alpha": 1}, 0, [(1 + math.sqrt(3) / 2) ** 2 / 4]),
    ("eq56", {"v0": 1, "alpha": 1}, 0, [-4]),
])
def test_printed_energy_values(fid, params, n, want):
    got = [lv.energy for lv in printed_energy(fid, params, n)]
    assert got == pytest.approx(want, abs=1e-12)
    assert all(lv.source == fid for lv in printed_energy(fid, params, n))


def test_printed_energy_errors():
    with pytest.raises(UnknownFormula):
        printed_energy("eq99", {}, 0)
    with pytest.raises(ValueError):
        printed_energy("eq22", {"v1": 1}, 0)


def test_every_formula_is_evaluable():
    assert set(engine.FORMULAS) == set(engine.FORMULA_PARAMS)
    for fid, names in engine.FORMULA_PARAMS.items():
        for lv in printed_energy(fid, {k: 1.5 for k in names}, 2):
            assert cmath.isfinite(lv.energy)


def test_applicable_formula_patterns():
    assert set(applicable_formulas(MORSE)) == {"eq22", "eq30"}
    assert set(applicable_formulas(morse_omega_d(1, 3))) == {"eq22", "eq32", "eq34", "eq35"}
    assert set(applicable_formulas(PoschlTeller(1j, 1, 1j))) == {"eq48", "eq52"}
    assert set(applicable_formulas(PoschlTeller(1j, 2j, 1j))) == {"eq48", "eq54"}
    assert set(applicable_formulas(PoschlTeller(1, 1, 1j))) == {"eq48", "eq56"}
    assert applicable_formulas(morse_abc(1, 2, 3))["eq30"] == {"C": pytest.approx(3)}


def test_special_case_identity_and_prefactor_record():
    ident = special_case_identity(1.0, 2.0, 3)
    assert ident["identity_holds"]
    assert not ident["eq34_prefactor_consistent"]
    assert [row["eq34_over_eq35"] for row in ident["rows"]] == pytest.approx([4] * 4)


def test_continuation_matches_printed_pt_morse_spectrum():
    r = transform(morse_omega_d(1, 3))
    for n in range(4):
        e35 = printed_energy("eq35", {"omega": 1, "D": 3}, n)[0].energy
        assert quantize(r, n)[0].energy == pytest.approx(e35, abs=1e-10)


@pytest.mark.parametrize("n,gamma,sign,case", [(0, 3.0, 1, 3), (2, 1.0, 1, 1), (0, 3.0, -1, 2)])
def test_printed_physical_cases(n, gamma, sign, case):
    assert eq49_case(n, gamma, sign) == case


@settings(max_examples=100, deadline=None)
@given(n=st.integers(0, 6), gamma=st.floats(-6, 6), sign=st.sampled_from([1, -1]))
def test_case_classifier_returns_exactly_one_case_or_rejects(n, gamma, sign):
    e, f = -(n - 0.5) + sign * gamma, 1 + sign * gamma
    holds = [e < 0 and f > 0 and f > abs(e), e < 0 and f < 0, e > 0 and f > abs(e)]
    if any(holds):
        assert sum(holds) == 1
        assert eq49_case(n, gamma, sign) == holds.index(True) + 1
    else:
        with pytest.raises(UnphysicalParameters):
            eq49_case(n, gamma, sign)


# ---- eigenfunctions

def test_morse_ground_state_form():
    r, lv = selected(MORSE, 0)
    ef = build_eigenfunction(r, lv)
    assert ef.exponent_at_0 == pytest.approx(2.5)
    assert ef.exp_rate == pytest.approx(-1)
    assert np.allclose(ef.poly.coef, [1])
    assert eigenfunction_value(ef, 0.0) == pytest.approx(math.exp(-1))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_morse_polynomial_is_scaled_laguerre(n):
    p = GeneralizedMorse(1, 14, 1)
    r, lv = selected(p, n)
    ef = build_eigenfunction(r, lv)
    a = 2 * lv.residues["b1"] - 1
    ys = (0.5, 2.0, 3.7)
    ratios = [ef.poly(y) / laguerre(n, a, 2 * y) for y in ys]
    assert ratios == pytest.approx([ratios[0]] * 3, rel=1e-9)


def test_eigenfunction_vanishes_at_polynomial_roots():
    r, lv = selected(GeneralizedMorse(1, 14, 1), 3)
    ef = build_eigenfunction(r, lv)
    for y0 in polynomial_roots(ef):
        x0 = complex(r.x_of_y(y0))
        assert abs(eigenfunction_value(ef, x0)) < 1e-10
        with pytest.raises(EvaluationAtNode):
            qmf_value(ef, lv, x0)


def test_eigenfunction_decays_toward_the_y_origin():
    r, lv = selected(MORSE, 1)
    ef = build_eigenfunction(r, lv)
    assert abs(eigenfunction_value(ef, 40.0)) < 1e-20


def test_pt_eigenfunction_degree_and_poles():
    r, lv = selected(PoschlTeller(7, 1, 1), 1)
    ef = build_eigenfunction(r, lv)
    assert ef.poly.degree() == 2
    # even polynomial in y
    assert abs(ef.poly.coef[1]) < 1e-10
    with pytest.raises(EvaluationAtPole):
        engine._check_poles(ef, 1.0)
    with pytest.raises(EvaluationAtPole):
        engine._check_poles(ef, 0)


def test_qmf_at_classical_turning_value():
    r, lv = selected(MORSE, 0)
    ef = build_eigenfunction(r, lv)
    x = float(np.real(r.x_of_y(2.5)))
    assert abs(qmf_value(ef, lv, x)) < 1e-12
    # p = i(s - y) with s = 2.5
    x = float(np.real(r.x_of_y(1.0)))
    assert qmf_value(ef, lv, x) == pytest.approx(1.5j)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_qmf_residue_at_every_node_is_minus_i(n):
    r, lv = selected(GeneralizedMorse(1, 14, 1), n)
    ef = build_eigenfunction(r, lv)
    for y0 in polynomial_roots(ef):
        x0 = complex(r.x_of_y(y0))
        res = contour_coefficient(lambda x: qmf_value(ef, lv, x), x0, -1, 0.05)
        assert abs(res + 1j) < 1e-8


def test_sample_eigenfunction_is_rescaled():
    r, lv = selected(MORSE, 2)
    ef = build_eigenfunction(r, lv)
    psi = sample_eigenfunction(ef, np.linspace(-5, 25, 400))
    assert np.max(np.abs(psi)) == pytest.approx(1, rel=0.2)


def test_build_needs_residues():
    with pytest.raises(ValueError):
        build_eigenfunction(transform(MORSE), EnergyLevel(0, -6.25, "pipeline"))


def test_printed_eigenfunctions_are_finite():
    xs = np.linspace(-4, 20, 200)
    for p in (MORSE, PT):
        for sign in (1, -1):
            vals = printed_eigenfunction(p, 1, sign)(xs)
            assert np.all(np.isfinite(vals))
