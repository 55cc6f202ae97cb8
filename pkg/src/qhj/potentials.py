"""Generalized Morse and Poschl-Teller potentials with complex parameters."""
from __future__ import annotations

import cmath
import enum
import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidPotential, NotHermitian, PoleOfPotential
from .numerics import default_seed

SYMMETRY_TOL = 1e-12
POLE_TOL = 1e-12


def _c(z) -> complex:
    return complex(z)


@dataclass(frozen=True)
class GeneralizedMorse:
    """V(x) = v1 exp(-2 alpha x) - v2 exp(-alpha x)."""

    v1: complex
    v2: complex
    alpha: complex

    kind = "morse"

    def __post_init__(self):
        for name in ("v1", "v2", "alpha"):
            object.__setattr__(self, name, _c(getattr(self, name)))
        if self.alpha == 0:
            raise InvalidPotential("alpha must be nonzero")
        if self.v1 == 0:
            raise InvalidPotential("v1 must be nonzero")

    @property
    def params(self) -> dict[str, complex]:
        return {"v1": self.v1, "v2": self.v2, "alpha": self.alpha}


@dataclass(frozen=True)
class PoschlTeller:
    """V(x) = -4 v0 exp(-2 alpha x) / (1 + q exp(-2 alpha x))^2."""

    v0: complex
    q: complex
    alpha: complex

    kind = "poschl_teller"

    def __post_init__(self):
        for name in ("v0", "q", "alpha"):
            object.__setattr__(self, name, _c(getattr(self, name)))
        if self.alpha == 0:
            raise InvalidPotential("alpha must be nonzero")
        if self.q == 0:
            raise InvalidPotential("q must be nonzero")

    @property
    def params(self) -> dict[str, complex]:
        return {"v0": self.v0, "q": self.q, "alpha": self.alpha}

    @property
    def gamma(self) -> complex:
        """sqrt(1 + 8 v0 / (q alpha^2)), as it appears in the printed eigenfunction."""
        return cmath.sqrt(1 + 8 * self.v0 / (self.q * self.alpha**2))

    @property
    def nu2(self) -> complex:
        return cmath.sqrt(8 * self.v0 / (self.q * self.alpha**2))


PotentialSpec = Union[GeneralizedMorse, PoschlTeller]


# Constructor conveniences for the named parameterizations.

def morse_abc(A: float, B: float, C: float) -> GeneralizedMorse:
    """Morse with v1 = (A + iB)^2, v2 = (2C + 1)(A + iB), alpha = 1."""
    z = complex(A, B)
    return GeneralizedMorse(z * z, (2 * C + 1) * z, 1.0)


def morse_pt(v1: float, v2: float, alpha: float) -> GeneralizedMorse:
    """PT-symmetric Morse: the real alpha is rotated to i*alpha."""
    return GeneralizedMorse(v1, v2, 1j * alpha)


def morse_omega_d(omega: float, D: float, alpha: float = 2.0) -> GeneralizedMorse:
    """PT Morse with v1 = -omega^2, v2 = D and exponent i*alpha."""
    return GeneralizedMorse(complex(-omega * omega, 0.0), D, 1j * alpha)


def poschl_teller_parts(v0r: float, v0i: float, qr: float, qi: float, alpha: float) -> PoschlTeller:
    return PoschlTeller(complex(v0r, v0i), complex(qr, qi), alpha)


class SymmetryClass(str, enum.Enum):
    HERMITIAN = "hermitian"
    PT_SYMMETRIC = "pt_symmetric"
    NON_PT_NON_HERMITIAN = "non_pt_non_hermitian"


def evaluate(p: PotentialSpec, x: complex) -> complex:
    """V(x) from the defining exponential form."""
    x = complex(x)
    if isinstance(p, GeneralizedMorse):
        e = cmath.exp(-p.alpha * x)
        return p.v1 * e * e - p.v2 * e
    t = cmath.exp(-2 * p.alpha * x)
    den = 1 + p.q * t
    if abs(den) < POLE_TOL:
        raise PoleOfPotential(f"Poschl-Teller denominator vanishes at x={x}")
    return -4 * p.v0 * t / (den * den)


def evaluate_grid(p: PotentialSpec, x: np.ndarray) -> np.ndarray:
    """Vectorized ``evaluate`` on a real or complex array."""
    x = np.asarray(x, dtype=complex)
    if isinstance(p, GeneralizedMorse):
        e = np.exp(-p.alpha * x)
        return p.v1 * e * e - p.v2 * e
    t = np.exp(-2 * p.alpha * x)
    den = 1 + p.q * t
    if np.any(np.abs(den) < POLE_TOL):
        raise PoleOfPotential("Poschl-Teller denominator vanishes on the grid")
    return -4 * p.v0 * t / (den * den)


def symmetry_samples(seed: int | None = None) -> np.ndarray:
    """100 uniform points on [-5, 5] plus 10 seeded random points there."""
    rng = np.random.default_rng(default_seed() if seed is None else seed)
    return np.concatenate([np.linspace(-5.0, 5.0, 100), rng.uniform(-5.0, 5.0, 10)])


def _sampled_pairs(p: PotentialSpec, xs: np.ndarray):
    for x in xs:
        try:
            yield evaluate(p, x), evaluate(p, -x)
        except PoleOfPotential:
            continue


def classify_symmetry(p: PotentialSpec, seed: int | None = None) -> SymmetryClass:
    xs = symmetry_samples(seed)
    pairs = list(_sampled_pairs(p, xs))
    if all(abs(v.imag) <= SYMMETRY_TOL * max(1.0, abs(v)) for v, _ in pairs):
        return SymmetryClass.HERMITIAN
    if all(abs(vm.conjugate() - v) <= SYMMETRY_TOL * max(1.0, abs(v)) for v, vm in pairs):
        return SymmetryClass.PT_SYMMETRIC
    return SymmetryClass.NON_PT_NON_HERMITIAN


def pt_defect(p: PotentialSpec, seed: int | None = None) -> float:
    """max |conj(V(-x)) - V(x)| over the symmetry samples."""
    return max(abs(vm.conjugate() - v) for v, vm in _sampled_pairs(p, symmetry_samples(seed)))


def reality_condition(v0: complex, q: complex) -> bool:
    """Im(v0) Re(q) == Re(v0) Im(q), i.e. v0/q real."""
    v0, q = complex(v0), complex(q)
    lhs = v0.imag * q.real - v0.real * q.imag
    return abs(lhs) < 1e-12 * max(1.0, abs(v0) * abs(q))


def bound_state_count(p: PotentialSpec) -> int:
    """Number of bound states of a Hermitian potential."""
    if classify_symmetry(p) is not SymmetryClass.HERMITIAN:
        raise NotHermitian("bound_state_count needs a Hermitian potential")
    if isinstance(p, GeneralizedMorse):
        v1, v2, a = p.v1.real, p.v2.real, p.alpha.real
        if not (v1 > 0 and v2 > 0 and a > 0):
            return 0
        s = v2 / (a * math.sqrt(v1))
        return max(0, math.ceil((s - 1) / 2))
    v0, q, a = p.v0.real, p.q.real, p.alpha.real
    if not (v0 > 0 and q > 0 and a > 0):
        return 0
    from .engine import quantize, transform
    from .errors import NoBoundState

    r = transform(p)
    count = 0
    while True:
        try:
            levels = quantize(r, count, policy="decay")
        except NoBoundState:
            return count
        if not any(lv.energy.real < 0 for lv in levels):
            return count
        count += 1


# JSON wire format: {"kind": ..., "params": {name: [re, im]}}

def to_json(p: PotentialSpec) -> dict:
    return {"kind": p.kind, "params": {k: [v.real, v.imag] for k, v in p.params.items()}}


def from_json(obj: dict) -> PotentialSpec:
    kind = obj.get("kind")
    raw = obj.get("params", {})
    params = {}
    for k, v in raw.items():
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise InvalidPotential(f"parameter {k} must be [re, im]")
            params[k] = complex(float(v[0]), float(v[1]))
        else:
            params[k] = complex(v)
    try:
        if kind == "morse":
            return GeneralizedMorse(params["v1"], params["v2"], params["alpha"])
        if kind == "poschl_teller":
            return PoschlTeller(params["v0"], params["q"], params["alpha"])
    except KeyError as exc:
        raise InvalidPotential(f"missing parameter {exc.args[0]}") from None
    raise InvalidPotential(f"unknown potential kind {kind!r}")


def dumps(p: PotentialSpec) -> str:
    return json.dumps(to_json(p))


def loads(text: str) -> PotentialSpec:
    return from_json(json.loads(text))


# Printed real/imaginary displays of the complexified Poschl-Teller forms.
# Arguments are the real parameters named as in the printed display.

def display_eq50(v0: float, q: float, alpha: float, x: float) -> complex:
    t2 = math.exp(-4 * alpha * x)
    return -4 * v0 * (2 * q * t2 + 1j * (1 - q * q * t2)) / (1 + q * q * t2) ** 2


def display_eq51(v0: float, q: float, alpha: float, x: float) -> complex:
    s, c = math.sin(2 * alpha * x), math.cos(2 * alpha * x)
    num = (1 - q * q) * s + 1j * (2 * q + (1 + q * q) * c)
    den = (1 + q * q) ** 2 + 4 * q * c * (1 + q * c + q * q)
    return -4 * v0 * num / den


def display_eq53(v0: float, q: float, alpha: float, x: float) -> complex:
    s, c = math.sin(2 * alpha * x), math.cos(2 * alpha * x)
    num = (1 + q * q) * s + 2 * q + 1j * ((1 - q * q) * c)
    den = (1 + q * q) ** 2 + 4 * q * q * (1 - c * c) + 4 * q * (1 + q * q) * s
    return -4 * v0 * num / den


def display_eq55(v0: float, q: float, alpha: float, x: float) -> complex:
    s, c = math.sin(2 * alpha * x), math.cos(2 * alpha * x)
    num = (1 + q * q) * c + 2 * q + 1j * (q * q - 1) * s
    den = (1 + q * q) ** 2 + 4 * q * c * (1 + q * c + q * q)
    return -4 * v0 * num / den


DISPLAY_FORMS = {
    # display id -> (printed function, map from real display params to the complex spec)
    "eq50": (display_eq50, lambda v0, q, a: PoschlTeller(1j * v0, 1j * q, a)),
    "eq51": (display_eq51, lambda v0, q, a: PoschlTeller(1j * v0, q, 1j * a)),
    "eq53": (display_eq53, lambda v0, q, a: PoschlTeller(1j * v0, 1j * q, 1j * a)),
    "eq55": (display_eq55, lambda v0, q, a: PoschlTeller(v0, q, 1j * a)),
}


def display_agreement(display_id: str, v0: float, q: float, alpha: float, xs) -> float:
    """max |printed display - direct substitution| / max(1, |direct|) over the points xs."""
    printed, spec_of = DISPLAY_FORMS[display_id]
    spec = spec_of(v0, q, alpha)
    worst = 0.0
    for x in xs:
        direct = evaluate(spec, x)
        worst = max(worst, abs(printed(v0, q, alpha, float(x)) - direct) / max(1.0, abs(direct)))
    return worst
