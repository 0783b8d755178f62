"""Field-strength tensors and finite-difference diagnostics.

``A_eval`` arguments are callables x -> potential.  They may return a plain
array, a ``PotentialSample`` (anything with ``.A``) or anything with
``.value``.  All derivatives here are taken along coordinate axes with the
index raised afterwards (d^0 = -d_0).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ContractError, LightconeDegeneracyError
from .greens import coefficient_C
from .spacetime import Dimension, dot, metric, vector

# 4th-order central first derivative: offsets and weights (divide by h)
_D1_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
_D1_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0


@dataclass(frozen=True)
class FieldTensor:
    """Antisymmetric F^{mu nu}, stored as its strict upper triangle."""

    D: int
    components: np.ndarray  # row-major upper triangle, length D(D-1)/2

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=float)
        if comps.shape != (self.D * (self.D - 1) // 2,):
            raise ContractError(f"expected {self.D * (self.D - 1) // 2} independent components")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_matrix(cls, M) -> "FieldTensor":
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ContractError("field tensor must be square")
        D = M.shape[0]
        iu = np.triu_indices(D, 1)
        return cls(D, (0.5 * (M - M.T))[iu])

    @property
    def F(self) -> np.ndarray:
        out = np.zeros((self.D, self.D))
        iu = np.triu_indices(self.D, 1)
        out[iu] = self.components
        out[(iu[1], iu[0])] = -self.components
        return out

    @staticmethod
    def labels(D: int) -> list[str]:
        return [f"F{m}{v}" for m, v in zip(*np.triu_indices(D, 1))]

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components))) if self.components.size else 0.0


def _as_array(result) -> np.ndarray:
    if hasattr(result, "A"):
        result = result.A
    elif hasattr(result, "value"):
        result = result.value
    return np.asarray(result, dtype=float)


def default_step(x, closed_form: bool = False) -> float:
    """1e-4 for closed-form evaluators, 1e-3 (1 + |x|) for numerical ones."""
    if closed_form:
        return 1e-4
    return 1e-3 * (1.0 + float(np.max(np.abs(x))))


def gradient(x, A_eval: Callable, h: float) -> np.ndarray:
    """G[mu, nu] = d_mu A^nu (covariant derivative index) by 4th-order central differences."""
    if not h > 0:
        raise ContractError("h must be positive")
    x = np.asarray(x, dtype=float)
    D = x.size
    rows = []
    for mu in range(D):
        acc = 0.0
        for off, wgt in zip(_D1_OFFSETS, _D1_WEIGHTS):
            xp = x.copy()
            xp[mu] += off * h
            acc = acc + wgt * _as_array(A_eval(xp))
        rows.append(acc / h)
    return np.array(rows)


def _curl(x, A_eval, h):
    G = gradient(x, A_eval, h)
    up = metric(G.shape[0])[:, None] * G  # d^mu A^nu
    return up - up.T


def F_numeric(x, A_eval: Callable, dim: Dimension, h: float | None = None,
              richardson: bool = False) -> FieldTensor:
    """F^{mu nu} = d^mu A^nu - d^nu A^mu from 4th-order central differences.

    With ``richardson`` the step is halved once and the two estimates are
    combined to cancel the h^4 term.
    """
    x = vector(x, dim)
    h = default_step(x) if h is None else h
    F = _curl(x, A_eval, h)
    if richardson:
        F = (16.0 * _curl(x, A_eval, 0.5 * h) - F) / 15.0
    return FieldTensor.from_matrix(F)


def field_and_divergence(x, A_eval: Callable, dim: Dimension, h: float | None = None) -> tuple[FieldTensor, float]:
    """F_numeric and the Lorenz divergence d_mu A^mu from one shared 4th-order stencil."""
    x = vector(x, dim)
    h = default_step(x) if h is None else h
    G = gradient(x, A_eval, h)
    up = metric(dim.D)[:, None] * G
    return FieldTensor.from_matrix(up - up.T), float(np.trace(G))


def F_uniform(x, b, dim: Dimension, charge: float = 1.0, corrected: bool = True) -> FieldTensor:
    """Closed-form field of a uniformly moving charge, K e (b^mu x^nu - b^nu x^mu) / r^(2n+2)."""
    x = vector(x, dim)
    b = vector(b, dim)
    r2 = dot(b, x) ** 2 + dot(x, x)
    if r2 <= 0:
        raise LightconeDegeneracyError("observation point lies on the worldline (r^2 <= 0)")
    n = dim.n
    K = field_prefactor(dim, corrected)
    return FieldTensor.from_matrix(K * charge * (np.outer(b, x) - np.outer(x, b)) / r2 ** (n + 1))


def field_prefactor(dim: Dimension, corrected: bool = True) -> float:
    """K_{n,D}: 2n C from differentiating the potential; ``corrected=False`` gives the naive 2 C."""
    C = coefficient_C(dim)
    return (2 * dim.n if corrected else 2) * C


def measure_field_prefactor(dim: Dimension, points=None, h: float = 1e-3) -> dict:
    """Fit K in F = K e (b^mu x^nu - b^nu x^mu)/r^(2n+2) from F_numeric(A_uniform).

    Returns the measured K/C with its spread over the sample points and which
    of the candidates 2n and 2 it confirms.  For n = 1 the two coincide.
    """
    from .potentials import A_uniform

    D = dim.D
    b = np.zeros(D)
    b[0] = 1.0
    if points is None:
        points = []
        for k in range(3):
            p = np.zeros(D)
            p[0] = 0.5 * k
            p[1] = 1.0 + 0.3 * k
            p[2] = 0.4 - 0.2 * k
            points.append(p)
    C = coefficient_C(dim)
    ratios = []
    for x in points:
        F = F_numeric(x, lambda y: A_uniform(y, b, dim), dim, h=h, richardson=True).F
        r2 = dot(b, x) ** 2 + dot(x, x)
        shape = (np.outer(b, x) - np.outer(x, b)) / r2 ** (dim.n + 1)
        mask = np.abs(shape) > 1e-8 * np.max(np.abs(shape))
        ratios.extend((F[mask] / shape[mask] / C).tolist())
    ratios = np.array(ratios)
    measured = float(np.mean(ratios))
    spread = float(np.max(np.abs(ratios - measured)))
    candidates = {"2n": 2.0 * dim.n, "2": 2.0}
    dist = {k: abs(measured - v) for k, v in candidates.items()}
    confirmed = min(dist, key=dist.get)
    return {
        "measured_K_over_C": measured,
        "spread": spread,
        "candidates": candidates,
        "confirmed": confirmed,
        "K": float(measured * C),
        "distinguishable": dim.n > 1,
    }


def residuals(x, A_eval: Callable, dim: Dimension, h: float | None = None) -> tuple[float, np.ndarray]:
    """Lorenz divergence d_mu A^mu (4th-order) and the wave operator d_nu d^nu A^mu (2nd-order)."""
    x = vector(x, dim)
    h = default_step(x) if h is None else h
    if not h > 0:
        raise ContractError("h must be positive")
    G = gradient(x, A_eval, h)
    lorenz = float(np.trace(G))
    eta = metric(dim.D)
    A0 = _as_array(A_eval(x))
    wave = np.zeros_like(A0)
    for nu in range(dim.D):
        xp, xm = x.copy(), x.copy()
        xp[nu] += h
        xm[nu] -= h
        wave = wave + eta[nu] * (_as_array(A_eval(xp)) - 2.0 * A0 + _as_array(A_eval(xm))) / (h * h)
    return lorenz, wave


def convergence_order(errors, steps) -> float:
    """Least-squares slope of log(error) against log(h)."""
    e = np.asarray(errors, dtype=float)
    hs = np.asarray(steps, dtype=float)
    if np.any(e <= 0):
        raise ContractError("errors must be positive to measure an order")
    return float(np.polyfit(np.log(hs), np.log(e), 1)[0])


def lorentz_transform_field(L, F: FieldTensor) -> FieldTensor:
    return FieldTensor.from_matrix(L @ F.F @ np.asarray(L).T)


__all__ = [
    "FieldTensor", "F_numeric", "F_uniform", "field_prefactor", "measure_field_prefactor",
    "residuals", "field_and_divergence", "gradient", "default_step", "convergence_order", "lorentz_transform_field",
]
