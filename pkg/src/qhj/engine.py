"""Quantum Hamilton-Jacobi pipeline for Morse and Poschl-Teller potentials.

Units are hbar = 2m = 1.  With y = y(x) the exponential map of the
potential family, the quantum momentum p = -i psi'/psi is written as
p = i alpha y phi and chi = phi + 1/(2y) obeys the Riccati equation

    chi'(y) + chi(y)^2 + Q(y, E) = 0,

so that d(log psi)/dy = chi - 1/(2y).  Residues at the finite poles of Q
and the 1/y coefficient of chi at infinity are obtained from local
balances; quantization fixes E, and the polynomial part of chi follows
from a linear coefficient match.

Residue orientation: at y = 0 the residue multiplies 1/y; at y = +1 and
y = -1 it multiplies 1/(c - y), i.e. 1/(1 - y) and 1/(-1 - y).  With this
convention the two outer poles carry the same residue for y -> -y
symmetric solutions.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np
from numpy.polynomial import Polynomial

from .errors import (
    DegenerateBalance,
    EvaluationAtNode,
    EvaluationAtPole,
    InvalidPotential,
    NoBoundState,
    NoPolynomialSolution,
    QHJError,
    UnknownFormula,
    UnphysicalParameters,
)
from .numerics import contour_coefficient, laguerre, jacobi, ode_polynomial_solution
from .potentials import (
    GeneralizedMorse,
    PoschlTeller,
    PotentialSpec,
    SymmetryClass,
    classify_symmetry,
)

BALANCE_TOL = 1e-14
CONSISTENCY_TOL = 1e-10
BOUNDARY_ADMISSIBLE = 1e-3

POLICIES = ("auto", "decay", "min_residual", "continuation", "all")


@dataclass(frozen=True)
class RiccatiProblem:
    """chi' + chi^2 + Q(y, E) = 0 together with the map y(x)."""

    potential: PotentialSpec
    map_kind: str
    alpha: complex
    finite_poles: tuple[complex, ...]
    log_prefactor: complex
    sign: int = 1

    @property
    def coupling(self) -> complex:
        """v2/sqrt(v1) for Morse, 4 v0/q for Poschl-Teller."""
        p = self.potential
        if isinstance(p, GeneralizedMorse):
            return p.v2 / cmath.sqrt(p.v1)
        return 4 * p.v0 / p.q

    def Q(self, y: complex, E: complex) -> complex:
        a2 = self.alpha * self.alpha
        if self.map_kind == "morse":
            return 0.25 / (y * y) + (E - y * y + self.coupling * y) / (a2 * y * y)
        w = 1 - y * y
        return 0.25 / (y * y) + (E - self.coupling * y * y / (w * w)) / (a2 * y * y)

    def q_denominator(self) -> Polynomial:
        """M(y) = prod (y - c)^2 over the finite poles."""
        m = Polynomial([1.0 + 0j])
        for c in self.finite_poles:
            m = m * Polynomial([-c, 1.0]) ** 2
        return m

    def q_numerator(self, E: complex) -> Polynomial:
        """N(y) with Q(y, E) = N(y) / M(y)."""
        a2 = self.alpha * self.alpha
        g = self.coupling
        if self.map_kind == "morse":
            return Polynomial([0.25 + E / a2, g / a2, -1.0 / a2])
        w2 = Polynomial([-1.0, 0.0, 1.0]) ** 2
        return (0.25 + E / a2) * w2 - (g / a2) * Polynomial([0.0, 0.0, 1.0])

    def log_y(self, x):
        return self.log_prefactor - self.alpha * np.asarray(x, dtype=complex)

    def y_of_x(self, x):
        return np.exp(self.log_y(x))

    def x_of_y(self, y):
        return (self.log_prefactor - np.log(np.asarray(y, dtype=complex))) / self.alpha


def transform(p: PotentialSpec, sign: int = 1) -> RiccatiProblem:
    """Riccati form of the QHJ equation for a Morse or Poschl-Teller potential.

    Morse uses y = sqrt(v1) exp(-alpha x); Poschl-Teller uses
    y = sign * i sqrt(q) exp(-alpha x).
    """
    if isinstance(p, GeneralizedMorse):
        return RiccatiProblem(p, "morse", p.alpha, (0j,), cmath.log(cmath.sqrt(p.v1)))
    if isinstance(p, PoschlTeller):
        if sign not in (1, -1):
            raise InvalidPotential("map sign must be +1 or -1")
        return RiccatiProblem(p, "poschl_teller", p.alpha, (0j, 1 + 0j, -1 + 0j),
                              cmath.log(sign * 1j * cmath.sqrt(p.q)), sign)
    raise InvalidPotential(f"unsupported potential {p!r}")


# ---------------------------------------------------------------- balances

@dataclass(frozen=True)
class ResidueSet:
    b1_pair: tuple[complex, complex]
    b1p_pair: Optional[tuple[complex, complex]]
    b1pp_pair: Optional[tuple[complex, complex]]
    lambda_pair: tuple[complex, complex]
    a0_pair: tuple[complex, complex]
    kappa: dict

    @property
    def a0(self) -> complex:
        return self.a0_pair[0]

    @property
    def c_const(self) -> complex:
        return self.a0_pair[0]


class InfinityBalance(NamedTuple):
    lambda_pair: tuple[complex, complex]
    a0: complex
    a0_pair: tuple[complex, complex]
    laurent: tuple[complex, complex, complex]


def _quadratic_roots(a: complex, b: complex, c: complex) -> tuple[complex, complex]:
    """Roots of a z^2 + b z + c, '+' root first (principal square root)."""
    # Round-off can put a negative real discriminant on either side of the cut.
    disc = _chop(b * b - 4 * a * c)
    if abs(a) < BALANCE_TOL:
        if abs(b) < BALANCE_TOL:
            raise DegenerateBalance("balance equation is degenerate")
        z = -c / b
        return z, z
    root = cmath.sqrt(disc)
    if abs(disc) < BALANCE_TOL and abs(b) < BALANCE_TOL and abs(c) < BALANCE_TOL:
        raise DegenerateBalance("balance equation is degenerate")
    return (-b + root) / (2 * a), (-b - root) / (2 * a)


def _pole_radius(r: RiccatiProblem, c: complex) -> float:
    others = [abs(c - d) for d in r.finite_poles if d != c]
    return 0.5 * min(others) if others else 0.5


def double_pole_coefficient(r: RiccatiProblem, E: complex, c: complex) -> complex:
    """Coefficient of (y - c)^-2 in Q(., E), by contour quadrature."""
    return contour_coefficient(lambda y: r.Q(y, E), c, -2, _pole_radius(r, c))


def local_balance(kappa: complex, orientation: int = 1) -> tuple[complex, complex]:
    """Residue roots for chi ~ b / (orientation (y - c)) against kappa/(y-c)^2.

    The leading terms give b^2 - orientation b + kappa = 0.
    """
    return _quadratic_roots(1.0, -float(orientation), kappa)


def infinity_behavior(r: RiccatiProblem, E: complex) -> InfinityBalance:
    """Balance chi = a0 + lambda/y + ... at infinity against Q's Laurent tail."""
    R = 2.0 * max([1.0] + [abs(c) for c in r.finite_poles]) + 1.0
    f = lambda y: r.Q(y, E)
    c0 = contour_coefficient(f, 0, 0, R)
    c1 = contour_coefficient(f, 0, -1, R)
    c2 = contour_coefficient(f, 0, -2, R)
    scale = max(1.0, abs(c0), abs(c1), abs(c2))
    if abs(c0) > 1e-12 * scale:
        root = cmath.sqrt(-c0)
        target = -1.0 / r.alpha
        a0s = (root, -root) if abs(root - target) <= abs(-root - target) else (-root, root)
        lams = tuple(-c1 / (2 * a) for a in a0s)
        return InfinityBalance(lams, a0s[0], a0s, (c0, c1, c2))
    if abs(c1) > 1e-12 * scale:
        raise DegenerateBalance("chi ~ lambda/y cannot balance a 1/y term of Q")
    lams = _quadratic_roots(1.0, -1.0, c2)
    return InfinityBalance(lams, 0j, (0j, 0j), (c0, c1, c2))


def pole_residues(r: RiccatiProblem, E: complex) -> ResidueSet:
    """Both residue roots at every finite pole plus the infinity balance."""
    E = complex(E)
    kappa = {c: double_pole_coefficient(r, E, c) for c in r.finite_poles}
    b1 = local_balance(kappa[0j], 1)
    b1p = b1pp = None
    if r.map_kind == "poschl_teller":
        b1p = local_balance(kappa[1 + 0j], -1)
        b1pp = local_balance(kappa[-1 + 0j], -1)
    inf = infinity_behavior(r, E)
    return ResidueSet(b1, b1p, b1pp, inf.lambda_pair, inf.a0_pair,
                      {str(k): v for k, v in kappa.items()})


# ---------------------------------------------------------------- levels

@dataclass(frozen=True)
class EnergyLevel:
    n: int
    energy: complex
    source: str
    branch_record: dict = field(default_factory=dict)
    residues: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        object.__setattr__(self, "energy", complex(self.energy))


def _affine_in_energy(fn: Callable[[complex], complex]) -> tuple[complex, complex]:
    """Fit fn(E) = k0 + k1 E from two energies and check it on a third."""
    f0, f1, fm = fn(0j), fn(1 + 0j), fn(-1 + 0j)
    k0, k1 = f0, f1 - f0
    if abs(k0 - k1 - fm) > 1e-9 * max(1.0, abs(k0), abs(k1)):
        raise DegenerateBalance("balance coefficient is not affine in E")
    if abs(k1) < BALANCE_TOL:
        raise DegenerateBalance("balance coefficient does not depend on E")
    return k0, k1


def _chop(z: complex, tol: float = 1e-13) -> complex:
    """Zero a real or imaginary part that is quadrature round-off."""
    scale = tol * max(1.0, abs(z))
    return complex(0.0 if abs(z.real) < scale else z.real, 0.0 if abs(z.imag) < scale else z.imag)


def _sign_of(root: complex, pair: tuple[complex, complex]) -> str:
    return "+" if abs(root - pair[0]) <= abs(root - pair[1]) else "-"


def quantization_defect(r: RiccatiProblem, level: EnergyLevel) -> complex:
    """Re-substitute E into the balances and return the quantization mismatch.

    Morse: b1 + n - lambda.  Poschl-Teller: b1 - b1p - b1pp + 2n - lambda
    (residues in the orientation of the module docstring).
    """
    rs = pole_residues(r, level.energy)
    rec = level.branch_record
    pick = lambda pair, s: pair[0] if s == "+" else pair[1]
    b1 = pick(rs.b1_pair, rec["b1"])
    lam = pick(rs.lambda_pair, rec["lambda"])
    if r.map_kind == "morse":
        return b1 + level.n - lam
    b1p = pick(rs.b1p_pair, rec["b1p"])
    b1pp = pick(rs.b1pp_pair, rec["b1pp"])
    return b1 - b1p - b1pp + 2 * level.n - lam


def candidates(r: RiccatiProblem, n: int) -> list[EnergyLevel]:
    """Every branch combination solving the quantization relation for level n.

    The residue at y = 0 is b1 = (1 + s d)/2 with d^2 = 1 - 4 kappa0(E) and
    kappa0 affine in E, so each relation is linear in d.  Only solutions
    whose d agrees with the recorded root of the principal square root are
    kept.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    k0, k1 = _affine_in_energy(lambda E: double_pole_coefficient(r, E, 0j))
    energy_of = lambda d: _chop((1 - 4 * k0 - d * d) / (4 * k1))
    out = []
    if r.map_kind == "morse":
        inf = infinity_behavior(r, 0j)
        for j, lam in enumerate(inf.lambda_pair):
            w = 2 * (lam - n) - 1
            E = energy_of(w)
            b1 = (1 + w) / 2
            rs = pole_residues(r, E)
            rec = {"b1": _sign_of(b1, rs.b1_pair), "lambda": "+" if j == 0 else "-",
                   "c_const": "-1/alpha" if j == 0 else "+1/alpha"}
            res = {"b1": b1, "lambda": lam, "c_const": inf.a0_pair[j]}
            out.append(EnergyLevel(n, E, "pipeline", rec, res))
        return out

    ki0, ki1 = _affine_in_energy(lambda E: infinity_behavior(r, E).laurent[2])
    if abs(ki0 - k0) > 1e-9 * max(1.0, abs(k0)) or abs(ki1 - k1) > 1e-9 * max(1.0, abs(k1)):
        raise DegenerateBalance("pole and infinity balances differ; relation is not linear")
    outer = pole_residues(r, 0j).b1p_pair
    for j, b1p in enumerate(outer):
        m = -2 * b1p + 2 * n
        E = energy_of(m)
        b1, lam = (1 - m) / 2, (1 + m) / 2
        rs = pole_residues(r, E)
        rec = {"b1": _sign_of(b1, rs.b1_pair), "lambda": _sign_of(lam, rs.lambda_pair),
               "b1p": _sign_of(b1p, rs.b1p_pair), "b1pp": _sign_of(b1p, rs.b1pp_pair),
               "outer": "+" if j == 0 else "-"}
        res = {"b1": b1, "lambda": lam, "b1p": b1p, "b1pp": b1p, "c_const": 0j}
        out.append(EnergyLevel(n, E, "pipeline", rec, res))
    return out


def grid_verifiable(p: PotentialSpec) -> bool:
    """True when the potential decays on one side of the real line (Re alpha > 0)."""
    return p.alpha.real > 1e-12


def decays(r: RiccatiProblem, level: EnergyLevel) -> bool:
    res = level.residues
    if r.map_kind == "morse":
        return (res["b1"] - 0.5).real > 0 and res["c_const"].real < 0
    return (res["b1"] - 0.5).real > 0 and (res["lambda"] - 0.5).real < 0


def resolve_policy(r: RiccatiProblem, policy: str) -> str:
    if policy not in POLICIES:
        raise ValueError(f"unknown branch policy {policy!r}")
    if policy != "auto":
        return policy
    if not grid_verifiable(r.potential):
        return "continuation"
    if classify_symmetry(r.potential) is SymmetryClass.HERMITIAN:
        return "decay"
    return "min_residual"


def select(r: RiccatiProblem, levels: list[EnergyLevel], policy: str = "auto", cfg=None) -> list[int]:
    """Indices of the candidates retained by the branch policy."""
    policy = resolve_policy(r, policy)
    if policy == "all":
        return list(range(len(levels)))
    if policy == "decay":
        return [i for i, lv in enumerate(levels) if decays(r, lv)]
    if policy == "continuation":
        key = "c_const" if r.map_kind == "morse" else "outer"
        want = "-1/alpha" if r.map_kind == "morse" else "+"
        return [i for i, lv in enumerate(levels) if lv.branch_record[key] == want]

    from .verification import boundary_ratio, default_grid, grid_residual

    cfg = cfg or default_grid(r.potential)
    scored = []
    for i, lv in enumerate(levels):
        try:
            ef = build_eigenfunction(r, lv)
            if boundary_ratio(r.potential, cfg, ef) > BOUNDARY_ADMISSIBLE:
                continue
            scored.append((grid_residual(r.potential, cfg, ef, lv.energy, dirichlet=True), i))
        except QHJError:
            continue
    return [min(scored)[1]] if scored else []


def quantize(r: RiccatiProblem, n: int, policy: str = "auto", cfg=None) -> list[EnergyLevel]:
    """Pipeline energies for level n retained by ``policy``."""
    levels = candidates(r, n)
    keep = select(r, levels, policy, cfg)
    if not keep:
        raise NoBoundState(f"no admissible energy for n={n}")
    return [levels[i] for i in keep]


# ---------------------------------------------------------------- printed formulas

FORMULAS = ("eq22", "eq30", "eq32", "eq34", "eq35", "eq48", "eq52", "eq54", "eq56")
FORMULA_PARAMS = {
    "eq22": ("v1", "v2", "alpha"),
    "eq30": ("C",),
    "eq32": ("v1", "A", "B", "alpha"),
    "eq34": ("v1", "v2", "alpha"),
    "eq35": ("omega", "D"),
    "eq48": ("v0", "q", "alpha"),
    "eq52": ("v0", "alpha"),
    "eq54": ("v0", "q", "alpha"),
    "eq56": ("v0", "alpha"),
}


def _printed_values(formula: str, k: dict, n: int) -> list[tuple[str, complex]]:
    sq = cmath.sqrt
    if formula == "eq22":
        a = k["alpha"]
        return [("", -(a * a / 4) * (-(2 * n + 1) + k["v2"] / (a * sq(k["v1"]))) ** 2)]
    if formula == "eq30":
        return [("", -(n - k["C"]) ** 2)]
    if formula == "eq32":
        a = k["alpha"]
        return [("", a**4 * ((n + 0.5) - (k["A"] + 1j * k["B"]) / (2 * a * sq(abs(-k["v1"])))) ** 2)]
    if formula == "eq34":
        a = k["alpha"]
        return [("", a**4 * ((n + 0.5) + k["v2"] / (2 * a * sq(abs(-k["v1"])))) ** 2)]
    if formula == "eq35":
        return [("", (2 * n + 1 + k["D"] / (2 * k["omega"])) ** 2)]
    if formula == "eq48":
        a = k["alpha"]
        root = sq(1 + 8 * k["v0"] / (k["q"] * a * a))
        return [(s, -(a * a / 4) * ((2 * n + 1) + sgn * root) ** 2) for s, sgn in (("+", 1), ("-", -1))]
    if formula == "eq52":
        a = k["alpha"]
        return [("", (a * a / 4) * (2 * n + 1 + sq(1 + 8 * k["v0"] / (a * a))) ** 2)]
    if formula == "eq54":
        a, q = k["alpha"], k["q"]
        return [("", (a * a / 4) * (2 * n + 1 + sq(a * a * q * q + (1 + q * q) * k["v0"]) / (2 * a * q)) ** 2)]
    if formula == "eq56":
        a = k["alpha"]
        return [("", -(a * a / 4) * (2 * n + 1 + sq(1 + 8 * k["v0"] / (a * a))) ** 2)]
    raise UnknownFormula(formula)


def printed_energy(formula: str, params: dict, n: int) -> list[EnergyLevel]:
    """Evaluate a printed spectrum formula as written; one level per sign of any +-."""
    if formula not in FORMULA_PARAMS:
        raise UnknownFormula(f"unknown formula id {formula!r}")
    missing = [name for name in FORMULA_PARAMS[formula] if name not in params]
    if missing:
        raise ValueError(f"{formula} needs parameters {missing}")
    k = {name: complex(params[name]) for name in FORMULA_PARAMS[formula]}
    out = []
    for sign, E in _printed_values(formula, k, n):
        rec = {"sign": sign} if sign else {}
        out.append(EnergyLevel(n, E, formula, rec))
    return out


def _is_real(z: complex, tol: float = 1e-12) -> bool:
    return abs(z.imag) <= tol * max(1.0, abs(z))


def _is_imag(z: complex, tol: float = 1e-12) -> bool:
    return abs(z.real) <= tol * max(1.0, abs(z)) and z != 0


def applicable_formulas(p: PotentialSpec) -> dict[str, dict]:
    """Printed formulas whose parameter pattern matches p, with their arguments.

    Rotated parameters (alpha -> i alpha and the like) are passed to the
    formula as the real quantities the printed expressions are written in.
    """
    out: dict[str, dict] = {}
    if isinstance(p, GeneralizedMorse):
        v1, v2, a = p.v1, p.v2, p.alpha
        out["eq22"] = {"v1": v1, "v2": v2, "alpha": a}
        if abs(a - 1) < 1e-12:
            root = cmath.sqrt(v1)
            C = (v2 / root - 1) / 2
            if _is_real(C):
                out["eq30"] = {"C": C.real}
        if _is_imag(a) and _is_real(v1):
            ar = (a / 1j).real
            out["eq32"] = {"v1": v1.real, "A": v2.real, "B": v2.imag, "alpha": ar}
            if _is_real(v2):
                out["eq34"] = {"v1": v1.real, "v2": v2.real, "alpha": ar}
                if abs(ar - 2) < 1e-12 and v1.real < 0:
                    out["eq35"] = {"omega": math.sqrt(-v1.real), "D": v2.real}
        return out
    v0, q, a = p.v0, p.q, p.alpha
    out["eq48"] = {"v0": v0, "q": q, "alpha": a}
    if _is_real(q) and _is_imag(v0) and _is_imag(a):
        out["eq52"] = {"v0": (v0 / 1j).real, "alpha": (a / 1j).real}
    if _is_imag(q) and _is_imag(v0) and _is_imag(a):
        out["eq54"] = {"v0": (v0 / 1j).real, "q": (q / 1j).real, "alpha": (a / 1j).real}
    if _is_real(q) and _is_real(v0) and _is_imag(a):
        out["eq56"] = {"v0": v0.real, "alpha": (a / 1j).real}
    return out


def printed_residues(p: PotentialSpec, E: complex) -> dict[str, tuple[complex, complex]]:
    """Printed residue formulas at energy E, both signs, for comparison with the balances."""
    sq = cmath.sqrt
    E = complex(E)
    a = p.alpha
    out = {}
    if isinstance(p, GeneralizedMorse):
        out["eq15_b1"] = tuple((a + s * 2 * sq(-E)) / (2 * a) for s in (1, -1))
        lam = p.v2 / (2 * a * sq(p.v1))
        out["eq17_lambda"] = (lam, -lam)
        out["eq29_b1"] = tuple(0.5 + s * 1j * math.sqrt(abs(4 * E) / 2) for s in (1, -1))
        return out
    out["eq39_b1"] = tuple((a + s * 2 * sq(-E)) / (2 * a) for s in (1, -1))
    q, v0 = p.q, p.v0
    out["eq41_b1p"] = tuple((q * a + s * sq(a * a * q * q + 8 * q * v0)) / (2 * q * a) for s in (1, -1))
    out["eq44_lambda"] = out["eq39_b1"]
    return out


def special_case_identity(omega: float, D: float, n_max: int = 3) -> dict:
    """The eq22 formula continued to v1 = -omega^2, alpha = 2i, against the printed PT Morse spectra."""
    rows = []
    for n in range(n_max + 1):
        e22 = printed_energy("eq22", {"v1": complex(-omega * omega, 0.0), "v2": D, "alpha": 2j}, n)[0].energy
        e35 = printed_energy("eq35", {"omega": omega, "D": D}, n)[0].energy
        e34 = printed_energy("eq34", {"v1": -omega * omega, "v2": D, "alpha": 2.0}, n)[0].energy
        rows.append({
            "n": n,
            "eq22_continued": e22,
            "eq35": e35,
            "eq34": e34,
            "eq22_matches_eq35": abs(e22 - e35) <= 1e-12 * max(1.0, abs(e35)),
            "eq34_over_eq35": e34 / e35 if e35 != 0 else None,
        })
    return {"omega": omega, "D": D, "rows": rows,
            "identity_holds": all(r["eq22_matches_eq35"] for r in rows),
            "eq34_prefactor_consistent": all(r["eq34_over_eq35"] is not None
                                             and abs(r["eq34_over_eq35"] - 1) < 1e-12 for r in rows)}


def eq49_case(n: int, gamma: float, sign: int) -> int:
    """Which of the three printed physical cases (1, 2, 3) the exponents fall in.

    e = -(n - 1/2) + sign*gamma is the power of y and f = 1 + sign*gamma the
    other printed exponent.  Raises UnphysicalParameters when no case holds.
    """
    e = -(n - 0.5) + sign * gamma
    f = 1 + sign * gamma
    if e < 0 and f > 0 and f > abs(e):
        return 1
    if e < 0 and f < 0:
        return 2
    if e > 0 and f > abs(e):
        return 3
    raise UnphysicalParameters(f"n={n}, gamma={gamma}, sign={sign:+d} satisfies no printed case")


# ---------------------------------------------------------------- eigenfunctions

@dataclass(frozen=True)
class EigenfunctionForm:
    """psi(y) = y^e0 (1-y)^e_plus (1+y)^e_minus exp(rate y) P(y), unnormalized."""

    problem: RiccatiProblem
    n: int
    energy: complex
    exponent_at_0: complex
    exp_rate: complex
    poly: Polynomial
    exponent_at_plus1: complex = 0j
    exponent_at_minus1: complex = 0j

    @property
    def map_kind(self) -> str:
        return self.problem.map_kind

    @property
    def gamma(self) -> complex:
        p = self.problem.potential
        return p.gamma if isinstance(p, PoschlTeller) else None

    @property
    def nu2(self) -> complex:
        p = self.problem.potential
        return p.nu2 if isinstance(p, PoschlTeller) else None

    def chi(self, y):
        """Logarithmic derivative of y^(1/2) psi(y)."""
        y = np.asarray(y, dtype=complex)
        P, dP = self.poly, self.poly.deriv()
        out = (self.exponent_at_0 + 0.5) / y + self.exp_rate + dP(y) / P(y)
        if self.map_kind == "poschl_teller":
            out = out - self.exponent_at_plus1 / (1 - y) + self.exponent_at_minus1 / (1 + y)
        return out

    def dchi(self, y):
        y = np.asarray(y, dtype=complex)
        P, dP, d2P = self.poly, self.poly.deriv(), self.poly.deriv(2)
        ratio = dP(y) / P(y)
        out = -(self.exponent_at_0 + 0.5) / y**2 + d2P(y) / P(y) - ratio * ratio
        if self.map_kind == "poschl_teller":
            out = out - self.exponent_at_plus1 / (1 - y) ** 2 - self.exponent_at_minus1 / (1 + y) ** 2
        return out

    def log_envelope(self, x):
        """log of psi without the polynomial factor, continuous in x."""
        r = self.problem
        logy = r.log_y(x)
        y = np.exp(logy)
        out = self.exponent_at_0 * logy + self.exp_rate * y
        if self.map_kind == "poschl_teller":
            out = out + self.exponent_at_plus1 * _log(1 - y) + self.exponent_at_minus1 * _log(1 + y)
        return out, y


def _log(z):
    """Principal log for scalars; phase-unwrapped along 1-d arrays."""
    out = np.log(z)
    if np.ndim(out) == 1 and out.size > 1:
        out = out.real + 1j * np.unwrap(out.imag)
    return out


def _poly_from_pole_terms(poles: list[tuple[complex, complex]], C: complex):
    lin = lambda c: Polynomial([-c, 1.0])
    D = Polynomial([1.0 + 0j])
    for c, _ in poles:
        D = D * lin(c)
    partial = [D // lin(c) for c, _ in poles]
    return D, partial


def eigen_ode(r: RiccatiProblem, residues: list[tuple[complex, complex]], C: complex, E: complex):
    """Coefficients (p2, p1, p0) of the polynomial ODE for P.

    Substituting chi = sum r_c/(y - c) + P'/P + C into the Riccati equation
    gives P'' + 2 R P' + (R' + R^2 + Q) P = 0 with R the pole part plus C;
    this is multiplied by prod (y - c)^2 and one factor prod (y - c) is
    cancelled.  Here r_c are the residues of 1/(y - c).
    """
    D, partial = _poly_from_pole_terms(residues, C)
    M = D * D
    N = r.q_numerator(E)
    p2 = M
    p1 = 2 * C * M
    p0 = C * C * M + N
    for (c, rc), part in zip(residues, partial):
        p1 = p1 + 2 * rc * part * D
        p0 = p0 + (rc * rc - rc) * part * part + 2 * C * rc * part * D
    for i in range(len(residues)):
        for j in range(i + 1, len(residues)):
            ri, rj = residues[i][1], residues[j][1]
            p0 = p0 + 2 * ri * rj * partial[i] * partial[j]
    q, rem = divmod(p0, D)
    scale = max(1.0, float(np.max(np.abs(p0.coef))))
    if np.max(np.abs(rem.coef)) > 1e-8 * scale:
        raise NoPolynomialSolution("pole balances do not cancel; residues are inconsistent with E")
    return p2 // D, p1 // D, q


def _standard_residues(r: RiccatiProblem, res: dict) -> list[tuple[complex, complex]]:
    if r.map_kind == "morse":
        return [(0j, res["b1"])]
    return [(0j, res["b1"]), (1 + 0j, -res["b1p"]), (-1 + 0j, -res["b1pp"])]


def build_eigenfunction(r: RiccatiProblem, level: EnergyLevel) -> EigenfunctionForm:
    """Eigenfunction factors for a pipeline level, polynomial by coefficient matching."""
    res = level.residues
    if not res:
        raise ValueError("level carries no residues; use a level produced by quantize")
    poles = _standard_residues(r, res)
    C = res.get("c_const", 0j)
    p2, p1, p0 = eigen_ode(r, poles, C, level.energy)
    degree = level.n if r.map_kind == "morse" else 2 * level.n
    P = ode_polynomial_solution(p2, p1, p0, degree)
    e0 = res["b1"] - 0.5
    if r.map_kind == "morse":
        return EigenfunctionForm(r, level.n, level.energy, e0, C, P)
    return EigenfunctionForm(r, level.n, level.energy, e0, 0j, P,
                             exponent_at_plus1=-res["b1p"], exponent_at_minus1=-res["b1pp"])


def _check_poles(ef: EigenfunctionForm, y: complex):
    if y == 0:
        raise EvaluationAtPole("y = 0")
    if ef.map_kind == "poschl_teller" and (abs(1 - y) < 1e-14 or abs(1 + y) < 1e-14):
        raise EvaluationAtPole(f"y = {y} is a fixed pole")


def eigenfunction_value(ef: EigenfunctionForm, x: complex) -> complex:
    """Unnormalized psi(x)."""
    env, y = ef.log_envelope(complex(x))
    y = complex(y)
    _check_poles(ef, y)
    return complex(np.exp(env) * ef.poly(y))


def sample_eigenfunction(ef: EigenfunctionForm, xs) -> np.ndarray:
    """psi on an array of x, rescaled so the largest sample has modulus ~1."""
    env, y = ef.log_envelope(np.asarray(xs, dtype=complex))
    Py = ef.poly(y)
    with np.errstate(divide="ignore"):
        logmag = env.real + np.log(np.abs(Py))
    shift = np.max(logmag[np.isfinite(logmag)])
    return np.exp(env - shift) * Py


def qmf_value(ef: EigenfunctionForm, level: EnergyLevel, x: complex) -> complex:
    """Quantum momentum p = -i psi'(x)/psi(x)."""
    env, y = ef.log_envelope(complex(x))
    y = complex(y)
    _check_poles(ef, y)
    P = ef.poly(y)
    scale = float(np.sum(np.abs(ef.poly.coef) * np.abs(y) ** np.arange(len(ef.poly.coef))))
    if abs(P) <= 1e-12 * scale or abs(np.exp(env)) == 0:
        raise EvaluationAtNode(f"psi vanishes at x={x}")
    phi = complex(ef.chi(y)) - 0.5 / y
    return 1j * ef.problem.alpha * y * phi


def polynomial_roots(ef: EigenfunctionForm) -> np.ndarray:
    if ef.poly.degree() < 1:
        return np.array([], dtype=complex)
    return np.asarray(ef.poly.roots(), dtype=complex)


# ---------------------------------------------------------------- printed eigenfunctions

def printed_eigenfunction(p: PotentialSpec, n: int, sign: int = 1) -> Callable:
    """psi as printed (Laguerre form for Morse, Jacobi form for Poschl-Teller).

    Returns a function of an x array giving psi rescaled to max modulus ~1.
    """
    r = transform(p)

    def sampler(xs):
        logy = r.log_y(np.asarray(xs, dtype=complex))
        y = np.exp(logy)
        if isinstance(p, GeneralizedMorse):
            k = p.v2 / (2 * p.alpha * cmath.sqrt(p.v1))
            env = -y / p.alpha + (-n + sign * k) * logy
            poly = np.array([laguerre(n, k, yy) for yy in y])
        else:
            g, nu = p.gamma, p.nu2
            env = (-(n - 0.5) + sign * g) * logy + 0.5 * (1 + sign * g) * _log(1 - y * y)
            poly = np.array([jacobi(n, -nu - 0.5, nu - 0.5, yy) for yy in y])
        with np.errstate(divide="ignore"):
            logmag = env.real + np.log(np.abs(poly))
        shift = np.max(logmag[np.isfinite(logmag)])
        return np.exp(env - shift) * poly

    return sampler
