"""Odd-dimensional retarded Green function machinery.

In D = 2n + 3 the retarded Green function is an n-fold derivative of
theta(lam) / sqrt(lam) with lam = -x**2, so every potential is a Hadamard
finite-part integral over lam.  This module provides:

* derivatives of lam**(-1/2) and the double factorials they produce,
* the finite part of the integral of sinh(theta)**(-2n) over (-inf, 0),
* a generic finite-part integral FP int_0^inf g(lam) (d/dlam)^n [theta(lam) lam^(-1/2)] dlam,
* the uniform-motion constant C_{n,D}.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Literal

import numpy as np
from scipy import integrate

from . import series
from .errors import ContractError, QuadratureError
from .quadrature import Integral, gauss_kronrod
from .spacetime import Dimension


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for the lam-space finite-part quadrature.

    ``lambda_max`` splits the range: [0, lambda_max] is integrated after the
    lam = u**2 substitution, and (lambda_max, inf) through the map
    lam = lambda_max / t**2 unless ``tail="truncate"``, which drops it.
    """

    lambda_max: float = 100.0
    rel_tol: float = 1e-11
    substitution: Literal["sqrt", "none"] = "sqrt"
    tail: Literal["map", "truncate"] = "map"
    deriv_scale: float = 1.0

    def __post_init__(self):
        if not self.lambda_max > 0:
            raise ContractError("lambda_max must be positive")
        if not 0 < self.rel_tol <= 1e-2:
            raise ContractError("rel_tol must lie in (0, 1e-2]")
        if self.substitution not in ("sqrt", "none"):
            raise ContractError(f"unknown substitution {self.substitution!r}")
        if self.tail not in ("map", "truncate"):
            raise ContractError(f"unknown tail mode {self.tail!r}")


def double_factorial(k: int) -> int:
    if k < -1:
        raise ContractError(f"double factorial undefined for k={k}")
    return math.prod(range(k, 0, -2))


def half_power_derivative(n: int, lam):
    """(d/dlam)^n lam^(-1/2) = (-1)^n (2n-1)!!/2^n lam^(-n-1/2)."""
    if n < 0:
        raise ContractError("derivative order must be >= 0")
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        raise ContractError("lam must be positive")
    out = (-1) ** n * double_factorial(2 * n - 1) / 2**n * lam ** (-n - 0.5)
    return float(out) if out.ndim == 0 else out


# -- finite part of int dtheta / sinh^2n ------------------------------------

_SERIES_TERMS = 24
_SERIES_CUTOFF = 0.5


@lru_cache(maxsize=None)
def _csch_power_laurent(n: int) -> np.ndarray:
    """Coefficients e_k with csch(t)^(2n) = sum_k e_k t^(2k - 2n)."""
    q = np.array([1.0 / math.factorial(2 * k + 1) for k in range(_SERIES_TERMS)])
    inv = series.div(np.eye(_SERIES_TERMS)[0], q)  # t / sinh(t), as a series in t^2
    out = np.eye(_SERIES_TERMS)[0]
    for _ in range(2 * n):
        out = series.mul(out, inv)
    return out


def _csch_power_regular(n: int, theta: np.ndarray) -> np.ndarray:
    """csch^(2n) minus its pole part, evaluated stably near 0."""
    e = _csch_power_laurent(n)
    theta = np.asarray(theta, dtype=float)
    out = np.empty_like(theta)
    near = np.abs(theta) < _SERIES_CUTOFF
    y = theta[near] ** 2
    out[near] = np.polynomial.polynomial.polyval(y, e[n:])
    t = theta[~near]
    pole = sum(e[k] * t ** (2 * k - 2 * n) for k in range(n))
    out[~near] = np.sinh(t) ** (-2 * n) - pole
    return out


def _csch_power_tail(n: int, theta_min: float, terms: int = 40) -> float:
    """int_{-inf}^{theta_min} csch^(2n), from the expansion in exp(2 theta)."""
    total = 0.0
    for k in range(terms):
        m = 2 * n + 2 * k
        total += math.comb(2 * n + k - 1, k) * math.exp(m * theta_min) / m
    return 4.0**n * total


def fp_sinh_integral(n: int, theta_min: float = -20.0, eps0: float = 0.25, levels: int = 6) -> float:
    """Hadamard finite part of int_{-inf}^{0} dtheta / sinh(theta)^(2n).

    Integrates on [theta_min, -eps] with the pole terms in eps removed,
    extrapolates eps -> 0 (Richardson in odd powers of eps) and adds the
    analytic tail below theta_min.
    """
    if n < 1:
        raise ContractError("n must be >= 1")
    if not theta_min < -_SERIES_CUTOFF:
        raise ContractError(f"theta_min must be < {-_SERIES_CUTOFF}")
    e = _csch_power_laurent(n)

    def regular(t):
        return _csch_power_regular(n, np.atleast_1d(t))[0]

    # pole part P(t) = sum_{m=1..n} e_{n-m} t^{-2m}; its antiderivative at theta_min
    pole_at_min = sum(e[n - m] * theta_min ** (1 - 2 * m) / (1 - 2 * m) for m in range(1, n + 1))
    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=200)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        base, _ = integrate.quad(regular, theta_min, -_SERIES_CUTOFF, **opts)
        eps = [eps0 / 2**k for k in range(levels + 1)]
        phi = []
        for ep in eps:
            piece, _ = integrate.quad(regular, -_SERIES_CUTOFF, -ep, **opts)
            phi.append(base + piece - pole_at_min)

    # Neville tableau in powers eps, eps^3, eps^5, ...
    table = [phi]
    for j in range(1, levels + 1):
        p = 2 * j - 1
        prev = table[-1]
        factor = 2.0**p
        table.append([(factor * prev[i + 1] - prev[i]) / (factor - 1) for i in range(len(prev) - 1)])
    value, previous = table[-1][0], table[-2][-1]
    if abs(value - previous) > 1e-9 * max(1.0, abs(value)):
        raise QuadratureError(
            "eps -> 0 extrapolation of the sinh finite part did not converge",
            {"n": n, "eps": eps, "phi": phi, "estimates": [row[-1] for row in table]},
        )
    return value + _csch_power_tail(n, theta_min)


# -- generic finite-part integral -------------------------------------------

def nth_derivative(g: Callable[[np.ndarray], np.ndarray], lam: np.ndarray, n: int,
                   scale: float = 1.0, levels: int = 4) -> np.ndarray:
    """n-th derivative of ``g`` by Richardson-extrapolated finite differences.

    Central binomial stencils where they fit inside lam >= 0, forward
    stencils next to the endpoint.
    """
    lam = np.asarray(lam, dtype=float)
    h0 = 0.1 * (lam + scale) / max(n, 1)
    central = lam - 0.5 * n * h0 >= 0.0
    coeffs = np.array([(-1) ** k * math.comb(n, k) for k in range(n + 1)], dtype=float)

    def estimate(h):
        offs_c = (0.5 * n - np.arange(n + 1))
        offs_f = (n - np.arange(n + 1)).astype(float)
        offs = np.where(central[None, :], offs_c[:, None], offs_f[:, None])
        pts = lam[None, :] + offs * h[None, :]
        vals = np.asarray(g(pts.ravel()), dtype=float)
        vals = vals.reshape(vals.shape[:-1] + pts.shape)
        return np.tensordot(vals, coeffs, axes=([-2], [0])) / h**n

    tab = [estimate(h0 / 2**j) for j in range(levels + 1)]
    for k in range(1, levels + 1):
        # central error is even in h, forward error has all powers
        p = np.where(central, 2 * k, k)
        f = 2.0**p
        tab = [(f * tab[i + 1] - tab[i]) / (f - 1) for i in range(len(tab) - 1)]
    return tab[0]


def fp_integral(
    g: Callable[[np.ndarray], np.ndarray] | None,
    n: int,
    spec: QuadratureSpec = QuadratureSpec(),
    derivative: Callable[[np.ndarray], np.ndarray] | None = None,
) -> Integral:
    """FP int_0^inf g(lam) (d/dlam)^n [theta(lam) lam^(-1/2)] dlam.

    Evaluated as (-1)^n int_0^inf g^(n)(lam) lam^(-1/2) dlam with the endpoint
    terms of the n integrations by parts discarded.  ``derivative`` supplies
    g^(n) directly; otherwise it is estimated from ``g`` by finite differences.
    Vector-valued ``g`` is allowed: the last axis of its output must match the
    input abscissae.
    """
    if n < 0:
        raise ContractError("n must be >= 0")
    if derivative is None:
        if g is None:
            raise ContractError("need g or its derivative")
        if n == 0:
            derivative = g
        else:
            derivative = lambda lam: nth_derivative(g, lam, n, spec.deriv_scale)  # noqa: E731

    L = spec.lambda_max
    if spec.substitution == "sqrt":
        head = gauss_kronrod(lambda u: 2.0 * derivative(u * u), 0.0, math.sqrt(L), rel_tol=spec.rel_tol)
    else:
        head = gauss_kronrod(lambda lam: derivative(lam) / np.sqrt(lam), 0.0, L, rel_tol=spec.rel_tol)

    value, error = np.asarray(head.value), head.error
    if spec.tail == "map":
        rootL = math.sqrt(L)

        def tail_integrand(t):
            return 2.0 * rootL * derivative(L / (t * t)) / (t * t)

        abs_tol = spec.rel_tol * float(np.max(np.abs(value))) if np.any(value) else 0.0
        try:
            tail = gauss_kronrod(tail_integrand, 0.0, 1.0, rel_tol=spec.rel_tol, abs_tol=abs_tol)
        except QuadratureError as exc:
            raise QuadratureError(
                f"truncation tail beyond lambda_max={L:g} did not converge (integrand decays too slowly)",
                exc.diagnostics,
            ) from exc
        value = value + np.asarray(tail.value)
        error = math.hypot(error, tail.error)
    value = (-1) ** n * value
    return Integral(float(value) if np.ndim(value) == 0 else value, float(error))


# -- uniform-motion constant --------------------------------------------------

def sinh_chain_sign(n: int, corrected: bool = True) -> int:
    """Overall sign multiplying (2n-1)!!/2^n * FP int csch^2n in C_{n,D}.

    The naive chain multiplies (-1)^(n+1) by (-1)^n, i.e. always -1.
    Keeping |sinh theta| = -sinh theta on theta < 0 and the sign of the
    a-derivative consistently gives (-1)^n instead; the two agree for odd n.
    """
    return (-1) ** n if corrected else -1


@lru_cache(maxsize=None)
def _coefficient(n: int, omega: float, corrected: bool) -> float:
    return sinh_chain_sign(n, corrected) * double_factorial(2 * n - 1) / 2**n * fp_sinh_integral(n) / omega


def coefficient_C(dim: Dimension, corrected: bool = True) -> float:
    """C_{n,D} in A = C e b / ((b.x)^2 + x^2)^n, assembled through the sinh finite part."""
    return _coefficient(dim.n, float(dim.omega), corrected)
