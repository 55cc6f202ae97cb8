"""Complex special polynomials, polynomial ODE solutions and contour quadrature.

Polynomials are ``numpy.polynomial.Polynomial`` objects with complex
coefficients, lowest degree first.
"""
from __future__ import annotations

import math
import os
from typing import Callable, Sequence, Union

import numpy as np
from numpy.polynomial import Polynomial

from .errors import AmbiguousWinding, DegenerateSystem, NonFiniteSample, NoPolynomialSolution

PolynomialC = Polynomial
PolyLike = Union[Polynomial, Sequence[complex]]

DEFAULT_SAMPLES = 256
DEFAULT_SEED = 42


def default_seed() -> int:
    """Sampling seed, taken from ``QHJ_SEED`` when set."""
    return int(os.environ.get("QHJ_SEED", DEFAULT_SEED))


def as_poly(p: PolyLike) -> Polynomial:
    if isinstance(p, Polynomial):
        return Polynomial(np.asarray(p.coef, dtype=complex))
    return Polynomial(np.asarray(p, dtype=complex))


def trim(p: Polynomial, tol: float = 0.0) -> Polynomial:
    """Drop trailing coefficients with magnitude <= tol (keeps at least one)."""
    c = np.asarray(p.coef, dtype=complex)
    k = len(c)
    while k > 1 and abs(c[k - 1]) <= tol:
        k -= 1
    return Polynomial(c[:k])


def laguerre(n: int, a: complex, y: complex) -> complex:
    """Generalized Laguerre polynomial L_n^a(y) by forward recurrence."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    a = complex(a)
    y = complex(y)
    prev, cur = 1.0 + 0j, 1.0 + a - y
    if n == 0:
        return prev
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + a - y) * cur - (k + a) * prev) / (k + 1)
    return cur


def _poch(x: complex, m: int) -> complex:
    out = 1.0 + 0j
    for j in range(m):
        out *= x + j
    return out


def jacobi_explicit(n: int, a: complex, b: complex, y: complex) -> complex:
    """Finite-sum form of P_n^(a,b)(y) in powers of (y-1)/2."""
    a, b, y = complex(a), complex(b), complex(y)
    total = 0j
    for m in range(n + 1):
        coef = _poch(a + m + 1, n - m) * math.comb(n, m) * _poch(a + b + n + 1, m) / math.factorial(n)
        total += coef * ((y - 1) / 2) ** m
    return total


def jacobi(n: int, a: complex, b: complex, y: complex) -> complex:
    """Jacobi polynomial P_n^(a,b)(y) by the three-term recurrence.

    Falls back to the finite sum when a recurrence denominator vanishes
    (possible for a + b a negative integer).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    a, b, y = complex(a), complex(b), complex(y)
    if n == 0:
        return 1.0 + 0j
    prev = 1.0 + 0j
    cur = (a + 1) + (a + b + 2) * (y - 1) / 2
    for k in range(1, n):
        s = 2 * k + a + b
        den = 2 * (k + 1) * (k + a + b + 1) * s
        if abs(den) < 1e-14:
            return jacobi_explicit(n, a, b, y)
        num = (s + 1) * ((s + 2) * s * y + a * a - b * b) * cur - 2 * (k + a) * (k + b) * (s + 2) * prev
        prev, cur = cur, num / den
    return cur


def apply_ode(p2: PolyLike, p1: PolyLike, p0: PolyLike, poly: PolyLike) -> Polynomial:
    """Return p2*P'' + p1*P' + p0*P as a polynomial."""
    P = as_poly(poly)
    return as_poly(p2) * P.deriv(2) + as_poly(p1) * P.deriv(1) + as_poly(p0) * P


def ode_polynomial_solution(p2: PolyLike, p1: PolyLike, p0: PolyLike, n: int,
                            rel_tol: float = 1e-9) -> Polynomial:
    """Monic degree-n polynomial P with p2*P'' + p1*P' + p0*P = 0.

    The operator is applied to the monomials 1..y^n and the null space of
    the resulting coefficient matrix is computed by SVD.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    q2, q1, q0 = as_poly(p2), as_poly(p1), as_poly(p0)
    if n == 0:
        res = apply_ode(q2, q1, q0, [1.0])
        scale = max(1.0, float(np.max(np.abs(q0.coef))))
        if np.max(np.abs(res.coef)) > 1e-8 * scale:
            raise NoPolynomialSolution("constant polynomial does not satisfy the ODE")
        return Polynomial(np.array([1.0 + 0j]))

    cols = []
    for j in range(n + 1):
        mono = np.zeros(j + 1, dtype=complex)
        mono[j] = 1.0
        cols.append(apply_ode(q2, q1, q0, mono).coef)
    rows = max(len(c) for c in cols)
    M = np.zeros((rows, n + 1), dtype=complex)
    for j, c in enumerate(cols):
        M[: len(c), j] = c

    norms = np.linalg.norm(M, axis=0)
    norms[norms == 0] = 1.0
    Ms = M / norms
    _, sv, vh = np.linalg.svd(Ms)
    smax = sv[0] if sv[0] > 0 else 1.0
    full_sv = np.concatenate([sv, np.zeros(max(0, n + 1 - len(sv)))])
    null = np.sum(full_sv < rel_tol * smax)
    if null == 0:
        raise NoPolynomialSolution(f"no degree-{n} polynomial solution (smallest singular value {sv[-1]:.3e})")
    if null > 1:
        raise DegenerateSystem(f"polynomial solution space has dimension {null}")
    v = vh[-1].conj() / norms
    if abs(v[n]) < rel_tol * np.max(np.abs(v)):
        raise NoPolynomialSolution(f"null vector has degree below {n}")
    coef = v / v[n]
    # Polish with the leading coefficient pinned.
    sol, *_ = np.linalg.lstsq(M[:, :n], -M[:, n], rcond=None)
    polished = np.concatenate([sol, [1.0 + 0j]])
    res_p = np.max(np.abs(M @ polished))
    res_v = np.max(np.abs(M @ coef))
    return Polynomial(polished if res_p <= res_v else coef)


def _circle(center: complex, radius: float, samples: int) -> tuple[np.ndarray, np.ndarray]:
    theta = 2 * np.pi * np.arange(samples) / samples
    return theta, complex(center) + radius * np.exp(1j * theta)


def _sample(f: Callable[[complex], complex], nodes: np.ndarray) -> np.ndarray:
    vals = np.array([complex(f(complex(z))) for z in nodes])
    if not np.all(np.isfinite(vals)):
        raise NonFiniteSample("function is not finite on the contour")
    return vals


def contour_coefficient(f: Callable[[complex], complex], center: complex, k: int,
                        radius: float, samples: int = DEFAULT_SAMPLES) -> complex:
    """Laurent coefficient c_k of f about ``center`` by trapezoidal quadrature.

    c_k = (1/2 pi i) oint f(y) / (y - center)^(k+1) dy over the circle of the
    given radius; the circle selects the annulus of the expansion.
    """
    if samples < 16:
        raise ValueError("samples must be >= 16")
    if radius <= 0:
        raise ValueError("radius must be positive")
    theta, nodes = _circle(center, radius, samples)
    vals = _sample(f, nodes)
    return complex(np.mean(vals * np.exp(-1j * k * theta)) * radius ** (-k))


def winding_number(f: Callable[[complex], complex], center: complex, radius: float,
                   samples: int = DEFAULT_SAMPLES,
                   df: Callable[[complex], complex] | None = None) -> int:
    """Zeros minus poles of f inside the circle, via (1/2 pi i) oint f'/f.

    Without ``df`` the derivative along the circle is taken spectrally from
    the samples.
    """
    theta, nodes = _circle(center, radius, samples)
    vals = _sample(f, nodes)
    if np.any(vals == 0):
        raise AmbiguousWinding("f vanishes on the contour")
    if df is not None:
        dvals = _sample(df, nodes) * 1j * radius * np.exp(1j * theta)
    else:
        freq = np.fft.fftfreq(samples, d=1.0 / samples)
        if samples % 2 == 0:
            freq[samples // 2] = 0.0
        dvals = np.fft.ifft(1j * freq * np.fft.fft(vals))
    value = np.mean(dvals / vals) / 1j
    nearest = int(np.rint(value.real))
    if abs(value - nearest) > 0.25:
        raise AmbiguousWinding(f"winding integral {value:.4f} is not near an integer")
    return nearest
