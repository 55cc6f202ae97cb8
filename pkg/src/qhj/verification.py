"""Independent oracles and the adjudication report.

Grid oracles discretize -d^2/dx^2 + V(x) with the second-order central
stencil on a uniform grid whose two end nodes are Dirichlet zeros.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy.linalg import solve_banded

from . import engine
from .engine import EigenfunctionForm, EnergyLevel, RiccatiProblem
from .errors import (
    ContourCollision,
    InsufficientDomain,
    NoConvergence,
    NotHermitian,
    QHJError,
)
from .numerics import contour_coefficient, default_seed, winding_number
from .potentials import (
    GeneralizedMorse,
    PoschlTeller,
    PotentialSpec,
    SymmetryClass,
    bound_state_count,
    classify_symmetry,
    evaluate_grid,
    reality_condition,
    to_json,
)

ORACLE_TOL = 1e-3
INTERNAL_TOL = 1e-8
NEGATIVE_CONTROL = 1e-2
CONVERGENCE_WINDOW = (3.2, 4.8)
BOUNDARY_TOL = 1e-6

MATCH, MISMATCH, NA, INCONCLUSIVE = "match", "mismatch", "not-applicable", "inconclusive"


@dataclass(frozen=True)
class GridOracleConfig:
    x_min: float
    x_max: float
    num_points: int = 8000
    boundary: str = "dirichlet"

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be below x_max")
        if self.num_points < 3:
            raise ValueError("num_points must be at least 3")
        if self.boundary != "dirichlet":
            raise ValueError("only Dirichlet boundaries are supported")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.num_points - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.num_points)

    def with_points(self, num_points: int) -> "GridOracleConfig":
        return GridOracleConfig(self.x_min, self.x_max, num_points, self.boundary)


def default_grid(p: PotentialSpec, num_points: int = 8000) -> GridOracleConfig:
    scale = abs(p.alpha.real) if abs(p.alpha.real) > 1e-12 else abs(p.alpha)
    if isinstance(p, GeneralizedMorse):
        return GridOracleConfig(-5.0 / scale, 25.0 / scale, num_points)
    return GridOracleConfig(-20.0 / scale, 20.0 / scale, num_points)


def _potential_values(p, x: np.ndarray) -> np.ndarray:
    """V on x for a PotentialSpec or a vectorized callable V(x)."""
    if callable(p):
        return np.asarray(p(x), dtype=complex) * np.ones_like(x, dtype=complex)
    return evaluate_grid(p, x)


def _is_hermitian(p, cfg: GridOracleConfig) -> bool:
    if callable(p):
        V = _potential_values(p, cfg.x)
        return bool(np.all(np.abs(V.imag) <= 1e-12 * np.maximum(1.0, np.abs(V))))
    return classify_symmetry(p) is SymmetryClass.HERMITIAN


def _tridiagonal(p, cfg: GridOracleConfig):
    """Diagonal on interior nodes and the constant off-diagonal of H."""
    h2 = cfg.h * cfg.h
    V = _potential_values(p, cfg.x[1:-1])
    return 2.0 / h2 + V, -1.0 / h2


# ---------------------------------------------------------------- Sturm bisection

def sturm_count(diag, off, x: float) -> int:
    """Eigenvalues of the symmetric tridiagonal (diag, off) below x.

    Counts negative pivots of the LDL^T factorization of T - x I.
    """
    count = 0
    q = 1.0
    prev_off2 = 0.0
    tiny = 1e-300
    for i, d in enumerate(diag):
        q = d - x - (prev_off2 / q if i else 0.0)
        if q == 0.0:
            q = -tiny
        if q < 0.0:
            count += 1
        prev_off2 = off[i] * off[i] if i < len(off) else 0.0
    return count


def bisect_eigenvalues(diag, off, k: int, tol: float = 1e-10) -> list[float]:
    """The k lowest eigenvalues of a real symmetric tridiagonal matrix."""
    diag = [float(d) for d in diag]
    off = [float(o) for o in off]
    n = len(diag)
    if not 1 <= k <= n:
        raise ValueError("k out of range")
    radius = [abs(off[i - 1]) if i else 0.0 for i in range(n)]
    radius = [radius[i] + (abs(off[i]) if i < n - 1 else 0.0) for i in range(n)]
    lo0 = min(d - r for d, r in zip(diag, radius))
    hi0 = max(d + r for d, r in zip(diag, radius))
    out = []
    lo = lo0
    for j in range(k):
        a, b = lo, hi0
        while b - a > tol:
            mid = 0.5 * (a + b)
            if mid == a or mid == b:
                break
            if sturm_count(diag, off, mid) > j:
                b = mid
            else:
                a = mid
        out.append(0.5 * (a + b))
        lo = a
    return out


def _inverse_iteration(diag, off_value, E: complex, iters: int = 3) -> np.ndarray:
    n = len(diag)
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = off_value
    ab[2, :-1] = off_value
    shift = E + 1e-9 * max(1.0, abs(E))
    ab[1] = np.asarray(diag, dtype=complex) - shift
    v = np.ones(n, dtype=complex)
    for _ in range(iters):
        v = solve_banded((1, 1), ab, v)
        v /= np.max(np.abs(v))
    return v


def grid_eigenvector(p: PotentialSpec, cfg: GridOracleConfig, E: float) -> np.ndarray:
    """Dirichlet eigenvector for eigenvalue E on all grid nodes (zero at both ends)."""
    diag, off = _tridiagonal(p, cfg)
    v = _inverse_iteration(diag, off, E)
    if np.all(np.abs(v.imag) < 1e-12 * np.max(np.abs(v))):
        v = v.real.astype(complex)
    return np.concatenate([[0j], v, [0j]])


def grid_eigenvalues(p, cfg: GridOracleConfig, k: int,
                     check_domain: bool = True) -> list[float]:
    """k lowest eigenvalues of the Dirichlet discretization by Sturm bisection."""
    if not _is_hermitian(p, cfg):
        raise NotHermitian("grid_eigenvalues needs a Hermitian potential")
    diag, off = _tridiagonal(p, cfg)
    diag = diag.real
    vals = bisect_eigenvalues(diag, [off] * (len(diag) - 1), k)
    if check_domain:
        v = np.abs(grid_eigenvector(p, cfg, vals[0])[1:-1])
        edge = max(v[0], v[-1]) / np.max(v)
        if edge > BOUNDARY_TOL:
            raise InsufficientDomain(f"ground state boundary amplitude {edge:.2e} exceeds {BOUNDARY_TOL}")
    return vals


# ---------------------------------------------------------------- determinant Newton

def tridiagonal_log_derivative(diag, off2: complex, E: complex) -> complex:
    """det'(E)/det(E) for det(T - E I) by the scaled three-term recurrence.

    f_k = (d_k - E) f_{k-1} - off2 f_{k-2} and its E-derivative are
    propagated together and rescaled every step.
    """
    f_prev, f = 1.0 + 0j, 1.0 + 0j
    g_prev, g = 0j, 0j
    first = True
    for d in diag:
        if first:
            f_new = d - E
            g_new = -1.0 + 0j
            f_prev, f, g_prev, g = f, f_new, g, g_new
            first = False
        else:
            f_new = (d - E) * f - off2 * f_prev
            g_new = -f + (d - E) * g - off2 * g_prev
            f_prev, f, g_prev, g = f, f_new, g, g_new
        s = abs(f) + abs(f_prev)
        if s > 0 and (s > 1e100 or s < 1e-100):
            f_prev, f, g_prev, g = f_prev / s, f / s, g_prev / s, g / s
    return g / f


def det_newton_eigen(p: PotentialSpec, cfg: GridOracleConfig, seed: complex,
                     max_iter: int = 100, tol: float = 1e-10) -> complex:
    """Eigenvalue of the complex Dirichlet discretization nearest a Newton path from seed."""
    diag, off = _tridiagonal(p, cfg)
    diag = [complex(d) for d in diag]
    off2 = complex(off * off)
    E = complex(seed)
    for _ in range(max_iter):
        L = tridiagonal_log_derivative(diag, off2, E)
        if not cmath.isfinite(L) or L == 0:
            raise NoConvergence(f"log-derivative not finite at E={E}")
        step = -1.0 / L
        E = E + step
        if abs(step) < tol:
            return E
    raise NoConvergence(f"Newton did not converge from seed {seed} in {max_iter} steps")


# ---------------------------------------------------------------- residuals

Sampler = Union[EigenfunctionForm, Callable[[np.ndarray], np.ndarray], np.ndarray]


def _samples(cfg: GridOracleConfig, ef: Sampler) -> np.ndarray:
    if isinstance(ef, EigenfunctionForm):
        return engine.sample_eigenfunction(ef, cfg.x)
    if callable(ef):
        return np.asarray(ef(cfg.x), dtype=complex)
    psi = np.asarray(ef, dtype=complex)
    if psi.shape != (cfg.num_points,):
        raise ValueError("sampled psi must have one value per grid node")
    return psi


def discrete_residual(V: np.ndarray, psi: np.ndarray, E: complex, h: float) -> float:
    """||H psi - E psi|| / ||psi|| on interior nodes; psi includes both end nodes."""
    inner = psi[1:-1]
    r = (2 * inner - psi[:-2] - psi[2:]) / (h * h) + (V - E) * inner
    return float(np.linalg.norm(r) / np.linalg.norm(inner))


def grid_residual(p: PotentialSpec, cfg: GridOracleConfig, ef: Sampler, E: complex,
                  dirichlet: bool = False) -> float:
    """Relative residual of (E, psi) for the discretized Schrodinger operator.

    The stencil is applied at interior nodes with psi sampled at every node.
    With ``dirichlet=True`` the two end samples are replaced by zero, which
    measures psi as a Dirichlet eigenvector and penalizes non-decay.
    """
    psi = _samples(cfg, ef).copy()
    if dirichlet:
        psi[0] = psi[-1] = 0
    V = _potential_values(p, cfg.x[1:-1])
    return discrete_residual(V, psi, complex(E), cfg.h)


def boundary_ratio(p: PotentialSpec, cfg: GridOracleConfig, ef: Sampler) -> float:
    psi = np.abs(_samples(cfg, ef))
    top = np.max(psi)
    return float(max(psi[0], psi[-1]) / top) if top > 0 else math.inf


def convergence_ratio(p: PotentialSpec, cfg: GridOracleConfig, ef: Sampler, E: complex) -> float:
    """grid_residual at N points over grid_residual at 2N points."""
    coarse = grid_residual(p, cfg, ef, E)
    fine = grid_residual(p, cfg.with_points(2 * cfg.num_points), ef, E)
    return coarse / fine


def _singularities(r: RiccatiProblem, ef: EigenfunctionForm) -> list[complex]:
    return list(r.finite_poles) + list(engine.polynomial_roots(ef))


def riccati_points(r: RiccatiProblem, ef: EigenfunctionForm, samples: int,
                   seed: int | None = None, min_dist: float = 0.1) -> np.ndarray:
    rng = np.random.default_rng(default_seed() if seed is None else seed)
    sing = _singularities(r, ef)
    outer = max([3.0] + [1.5 * abs(s) for s in sing])
    pts = []
    while len(pts) < samples:
        rad = rng.uniform(0.2, outer)
        ang = rng.uniform(-math.pi, math.pi)
        z = rad * cmath.exp(1j * ang)
        if all(abs(z - s) >= min_dist for s in sing):
            pts.append(z)
    return np.array(pts)


def riccati_residual(r: RiccatiProblem, ef: EigenfunctionForm, level: EnergyLevel,
                     samples: int = 64, seed: int | None = None) -> float:
    """max |chi' + chi^2 + Q(y, E)| at off-pole sample points, E from ``level``."""
    ys = riccati_points(r, ef, samples, seed)
    chi = ef.chi(ys)
    res = ef.dchi(ys) + chi * chi + np.array([r.Q(y, level.energy) for y in ys])
    return float(np.max(np.abs(res)))


def _algebraic_residue(r: RiccatiProblem, level: EnergyLevel, pole: complex) -> complex:
    rs = engine.pole_residues(r, level.energy)
    rec = level.branch_record
    pick = lambda pair, s: pair[0] if s == "+" else pair[1]
    if pole == 0:
        return pick(rs.b1_pair, rec["b1"])
    if pole == 1:
        return -pick(rs.b1p_pair, rec["b1p"])
    return -pick(rs.b1pp_pair, rec["b1pp"])


def residue_radius(r: RiccatiProblem, ef: EigenfunctionForm, pole: complex) -> float:
    others = [abs(pole - s) for s in _singularities(r, ef) if abs(pole - s) > 1e-12]
    radius = 0.45 * min(others) if others else 0.5
    if radius < 1e-4:
        raise ContourCollision(f"no contour of radius >= 1e-4 isolates pole {pole}")
    return radius


def residue_check(r: RiccatiProblem, ef: EigenfunctionForm, level: EnergyLevel, pole: complex,
                  radius: float | None = None, chi: Callable | None = None) -> float:
    """|contour residue of chi at pole - residue from the balance roots|.

    Residues are compared as coefficients of 1/(y - pole).
    """
    pole = complex(pole)
    if pole not in r.finite_poles:
        raise ValueError(f"{pole} is not a finite pole of the problem")
    rad = residue_radius(r, ef, pole) if radius is None else radius
    f = chi if chi is not None else (lambda y: complex(ef.chi(y)))
    extracted = contour_coefficient(f, pole, -1, rad, 256)
    return abs(extracted - _algebraic_residue(r, level, pole))


def enclosing_contour(ef: EigenfunctionForm) -> tuple[complex, float]:
    roots = engine.polynomial_roots(ef)
    if ef.map_kind == "poschl_teller" or roots.size == 0:
        center = 0j
    else:
        center = complex(np.mean(roots))
    spread = max([0.0] + [abs(z - center) for z in roots])
    return center, 1.25 * spread + 0.5


def action_variable(ef: EigenfunctionForm, contour: tuple[complex, float] | None = None) -> int:
    """Node count from the winding of the polynomial part of psi.

    Poschl-Teller polynomials are even in y; their roots pair up as +-y0,
    which is one node in x, so the y-winding is halved.
    """
    center, radius = contour if contour is not None else enclosing_contour(ef)
    P, dP = ef.poly, ef.poly.deriv()
    w = winding_number(lambda y: complex(P(y)), center, radius, 256, df=lambda y: complex(dP(y)))
    if ef.map_kind == "poschl_teller":
        if w % 2:
            from .errors import AmbiguousWinding
            raise AmbiguousWinding("odd winding for an even polynomial")
        return w // 2
    return w


def qmf_root_residues(ef: EigenfunctionForm, level: EnergyLevel) -> list[complex]:
    """Contour residue of the QMF in x around every node of psi."""
    r = ef.problem
    xs = [complex(r.x_of_y(z)) for z in engine.polynomial_roots(ef)]
    out = []
    for i, x0 in enumerate(xs):
        others = [abs(x0 - x1) for j, x1 in enumerate(xs) if j != i]
        rad = min([0.3] + [0.3 * d for d in others])
        out.append(contour_coefficient(lambda x: engine.qmf_value(ef, level, x), x0, -1, rad, 256))
    return out


# ---------------------------------------------------------------- adjudication

@dataclass
class VerificationReport:
    potential: dict
    symmetry: str
    policy: str
    grid: dict
    tolerances: dict
    levels: list = field(default_factory=list)
    claims: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "potential": self.potential,
            "symmetry": self.symmetry,
            "policy": self.policy,
            "grid": self.grid,
            "tolerances": self.tolerances,
            "levels": self.levels,
            "claims": self.claims,
        }

    def has_mismatch(self) -> bool:
        return any(MISMATCH in lv["verdicts"].values() for lv in self.levels) or any(
            isinstance(c, dict) and c.get("verdict") == MISMATCH for c in self.claims.values())


def cpair(z) -> list | None:
    if z is None:
        return None
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        return None
    return [z.real + 0.0, z.imag + 0.0]


def _fnum(v) -> float | None:
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def _close(a: list | None, b: list | None, tol: float) -> str:
    if a is None or b is None:
        return NA
    d = abs(complex(*a) - complex(*b))
    return MATCH if d <= tol * max(1.0, abs(complex(*b))) else MISMATCH


def level_verdicts(level: dict, tolerances: dict) -> dict:
    """Verdicts from the stored numbers of one level record."""
    otol, itol = tolerances["oracle"], tolerances["internal"]
    out = {}
    selected = [c for c in level["pipeline"] if c["selected"]]
    pipe = selected[0]["energy"] if selected else None
    oracle = level["oracle"]["energy"]
    out["pipeline_vs_oracle"] = _close(pipe, oracle, otol) if oracle is not None else NA
    # Newton on the non-Hermitian grid may land on another discrete eigenvalue.
    if level["oracle"]["method"] == "det_newton" and out["pipeline_vs_oracle"] == MISMATCH:
        out["pipeline_vs_oracle"] = INCONCLUSIVE
    for fid, entries in level["printed"].items():
        vals = [e["energy"] for e in entries]
        if oracle is not None:
            out[f"{fid}_vs_oracle"] = MATCH if any(_close(v, oracle, otol) == MATCH for v in vals) else MISMATCH
        if pipe is not None:
            out[f"{fid}_vs_pipeline"] = MATCH if any(_close(v, pipe, itol) == MATCH for v in vals) else MISMATCH
    chk = level["checks"]

    def below(key, tol):
        v = chk.get(key)
        if v is None:
            return NA
        return MATCH if v <= tol else MISMATCH

    out["quantization"] = below("quantization_defect", itol)
    out["riccati_residual"] = below("riccati_residual", itol)
    pert = chk.get("riccati_residual_perturbed")
    out["negative_control"] = NA if pert is None else (MATCH if pert > tolerances["negative_control"] else MISMATCH)
    deltas = chk.get("residue_deltas")
    if deltas:
        vals = list(deltas.values())
        out["residue_check"] = NA if any(v is None for v in vals) else (
            MATCH if max(vals) <= itol else MISMATCH)
    else:
        out["residue_check"] = NA
    av = chk.get("action_variable")
    out["action_variable"] = NA if av is None else (MATCH if av == level["n"] else MISMATCH)
    qres = chk.get("qmf_root_residue_error")
    out["qmf_residue"] = NA if qres is None else (MATCH if qres <= itol else MISMATCH)
    ratio = chk.get("convergence_ratio")
    lo, hi = tolerances["convergence_window"]
    out["convergence_order"] = NA if ratio is None else (MATCH if lo <= ratio <= hi else MISMATCH)
    return out


def _safe(fn, *args, **kw):
    try:
        return fn(*args, **kw), None
    except QHJError as exc:
        return None, f"{type(exc).__name__}: {exc}"


def _level_record(p, r, n, cfg, policy, sym, oracle_vals, seed) -> dict:
    printed = {}
    for fid, params in engine.applicable_formulas(p).items():
        printed[fid] = [{"sign": lv.branch_record.get("sign", ""), "energy": cpair(lv.energy)}
                        for lv in engine.printed_energy(fid, params, n)]
    record = {"n": n, "printed": printed, "pipeline": [], "oracle": {}, "checks": {}, "errors": []}

    levels, err = _safe(engine.candidates, r, n)
    if err:
        record["errors"].append(err)
        levels = []
    keep, err = _safe(engine.select, r, levels, policy, cfg)
    if err:
        record["errors"].append(err)
        keep = []
    keep = keep or []
    efs = {}
    for i, lv in enumerate(levels):
        ef, e = _safe(engine.build_eigenfunction, r, lv)
        entry = {"energy": cpair(lv.energy), "branch": dict(lv.branch_record), "selected": i in keep,
                 "grid_residual": None, "dirichlet_residual": None, "boundary_ratio": None, "error": e}
        if ef is not None:
            efs[i] = ef
            if engine.grid_verifiable(p):
                entry["grid_residual"] = _fnum(grid_residual(p, cfg, ef, lv.energy))
                entry["dirichlet_residual"] = _fnum(grid_residual(p, cfg, ef, lv.energy, dirichlet=True))
                entry["boundary_ratio"] = _fnum(boundary_ratio(p, cfg, ef))
        record["pipeline"].append(entry)
    if not keep:
        record["errors"].append(f"NoBoundState: no admissible energy for n={n}")

    # Oracle
    oracle = {"method": None, "energy": None, "note": None}
    if sym is SymmetryClass.HERMITIAN and engine.grid_verifiable(p):
        oracle["method"] = "sturm_bisection"
        if isinstance(oracle_vals, str):
            oracle["note"] = oracle_vals
        elif oracle_vals is not None and n < len(oracle_vals):
            if oracle_vals[n] < 0:
                oracle["energy"] = cpair(oracle_vals[n])
            else:
                oracle["note"] = "grid eigenvalue lies above the continuum threshold; not a bound state"
    elif engine.grid_verifiable(p):
        oracle["method"] = "det_newton"
        if keep:
            val, e = _safe(det_newton_eigen, p, cfg, levels[keep[0]].energy)
            oracle["energy"] = cpair(val)
            oracle["note"] = e
        else:
            oracle["note"] = "no pipeline energy to seed Newton"
    else:
        oracle["note"] = "potential is periodic on the real line; no real-line grid oracle"
    record["oracle"] = oracle

    # Checks on the selected level
    chk = record["checks"]
    if keep and keep[0] in efs:
        lv, ef = levels[keep[0]], efs[keep[0]]
        chk["quantization_defect"] = _fnum(abs(engine.quantization_defect(r, lv)))
        chk["riccati_residual"] = _fnum(riccati_residual(r, ef, lv, seed=seed))
        shifted = EnergyLevel(lv.n, lv.energy + 0.1, lv.source, lv.branch_record, lv.residues)
        chk["riccati_residual_perturbed"] = _fnum(riccati_residual(r, ef, shifted, seed=seed))
        deltas = {}
        for c in r.finite_poles:
            val, e = _safe(residue_check, r, ef, lv, c)
            deltas[repr(c.real)] = _fnum(val)
        chk["residue_deltas"] = deltas
        av, e = _safe(action_variable, ef)
        chk["action_variable"] = av
        if r.map_kind == "morse" and n > 0:
            res, e = _safe(qmf_root_residues, ef, lv)
            chk["qmf_root_residue_error"] = None if res is None else _fnum(max(abs(z + 1j) for z in res))
        if engine.grid_verifiable(p):
            chk["convergence_ratio"] = _fnum(convergence_ratio(p, cfg, ef, lv.energy))
        if sym is SymmetryClass.HERMITIAN and engine.grid_verifiable(p):
            printed_psi = {}
            for sgn in (1, -1):
                fn = engine.printed_eigenfunction(p, n, sgn)
                key = ("eq24" if r.map_kind == "morse" else "eq49") + ("+" if sgn > 0 else "-")
                printed_psi[key] = _fnum(grid_residual(p, cfg, fn, lv.energy))
            chk["printed_eigenfunction_residuals"] = printed_psi
        pr = engine.printed_residues(p, lv.energy)
        chk["printed_residues"] = {k: [cpair(z) for z in v] for k, v in pr.items()}
        rs = engine.pole_residues(r, lv.energy)
        chk["balance_residues"] = {
            "b1": [cpair(z) for z in rs.b1_pair],
            "lambda": [cpair(z) for z in rs.lambda_pair],
        }
        if rs.b1p_pair is not None:
            chk["balance_residues"]["b1p"] = [cpair(z) for z in rs.b1p_pair]
            chk["balance_residues"]["b1pp"] = [cpair(z) for z in rs.b1pp_pair]
    if isinstance(p, PoschlTeller) and abs(p.gamma.imag) < 1e-12:
        cases = {}
        for sgn in (1, -1):
            val, e = _safe(engine.eq49_case, n, p.gamma.real, sgn)
            cases["+" if sgn > 0 else "-"] = val if e is None else "unphysical"
        chk["eq49_case"] = cases
    return record


def _claims(p: PotentialSpec, levels: list[dict], sym: SymmetryClass) -> dict:
    claims = {}
    selected = []
    for lv in levels:
        sel = [c["energy"] for c in lv["pipeline"] if c["selected"]]
        selected.append(sel[0] if sel else None)
    if sym is SymmetryClass.HERMITIAN:
        claims["bound_state_count"] = {"value": bound_state_count(p)}
    if isinstance(p, PoschlTeller):
        cond = reality_condition(p.v0, p.q)
        imag = [abs(e[1]) for e in selected if e is not None]
        max_imag = max(imag) if imag else None
        real = None if max_imag is None else max_imag <= INTERNAL_TOL
        # The predicate concerns the decaying form with real alpha.
        judged = real is not None and engine._is_real(p.alpha)
        claims["reality_condition"] = {
            "condition": cond,
            "max_imag_pipeline": max_imag,
            "spectrum_real": real,
            "verdict": (MATCH if real == cond else MISMATCH) if judged else NA,
        }
        if engine._is_imag(p.v0) and engine._is_imag(p.q) and engine._is_real(p.alpha):
            per_n = []
            for lv, e in zip(levels, selected):
                vals = [x["energy"] for x in lv["printed"]["eq48"]]
                per_n.append(None if e is None else any(_close(v, e, INTERNAL_TOL) == MATCH for v in vals))
            known = [v for v in per_n if v is not None]
            claims["same_as_eq48"] = {"per_level": per_n,
                                      "verdict": NA if not known else (MATCH if all(known) else MISMATCH)}
    if isinstance(p, GeneralizedMorse):
        forms = engine.applicable_formulas(p)
        if "eq35" in forms:
            ident = engine.special_case_identity(forms["eq35"]["omega"], forms["eq35"]["D"],
                                                 n_max=max(3, len(levels) - 1))
            claims["eq22_continued_equals_eq35"] = {
                "values": [[cpair(row["eq22_continued"]), cpair(row["eq35"])] for row in ident["rows"]],
                "verdict": MATCH if ident["identity_holds"] else MISMATCH,
            }
            claims["eq34_prefactor"] = {
                "eq34_over_eq35": [cpair(row["eq34_over_eq35"]) for row in ident["rows"]],
                "verdict": MATCH if ident["eq34_prefactor_consistent"] else MISMATCH,
            }
    return claims


def adjudicate(p: PotentialSpec, n_max: int, cfg: GridOracleConfig | None = None,
               policy: str = "auto", seed: int | None = None) -> VerificationReport:
    """Compare printed, pipeline and oracle energies for n = 0..n_max."""
    cfg = cfg or default_grid(p)
    seed = default_seed() if seed is None else seed
    r = engine.transform(p)
    sym = classify_symmetry(p, seed)
    tolerances = {"oracle": ORACLE_TOL, "internal": INTERNAL_TOL,
                  "negative_control": NEGATIVE_CONTROL, "convergence_window": list(CONVERGENCE_WINDOW)}
    report = VerificationReport(to_json(p), sym.value, engine.resolve_policy(r, policy),
                                {"x_min": cfg.x_min, "x_max": cfg.x_max, "num_points": cfg.num_points},
                                tolerances)
    oracle_vals = None
    if sym is SymmetryClass.HERMITIAN and engine.grid_verifiable(p):
        try:
            oracle_vals = grid_eigenvalues(p, cfg, n_max + 1)
        except QHJError as exc:
            oracle_vals = f"{type(exc).__name__}: {exc}"
    for n in range(n_max + 1):
        rec = _level_record(p, r, n, cfg, policy, sym, oracle_vals, seed)
        rec["verdicts"] = level_verdicts(rec, tolerances)
        report.levels.append(rec)
    report.claims = _claims(p, report.levels, sym)
    return report
