"""Minkowski geometry in odd spacetime dimension.

Signature is mostly-plus, (-, +, ..., +): a unit timelike velocity has
``dot(b, b) == -1`` and the interior of the light cone is ``x**2 < 0``.
Vectors are plain float arrays whose leading axis is the spacetime index
(index 0 is time); extra trailing axes are carried along, so most helpers
work on batches of vectors as well.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ContractError, DimensionError

Interval = Literal["timelike", "null", "spacelike"]


def unit_sphere_area(k: int) -> float:
    """Area of the unit k-sphere embedded in R^(k+1)."""
    if k < 1:
        raise ContractError(f"sphere dimension must be >= 1, got {k}")
    return 2.0 * math.pi ** ((k + 1) / 2) / math.gamma((k + 1) / 2)


@dataclass(frozen=True)
class Dimension:
    """Odd spacetime dimension ``D = 2n + 3`` together with the Green-function normalization.

    ``omega`` defaults to the area of the unit (D-2)-sphere. Every physical
    check in this package is a ratio that cancels it, so overriding it only
    rescales potentials and fields.
    """

    D: int
    omega: float | None = None

    def __post_init__(self):
        if not isinstance(self.D, (int, np.integer)) or self.D < 5 or self.D % 2 == 0:
            raise DimensionError(f"dimension must be odd and ≥ 5 (got {self.D})")
        object.__setattr__(self, "D", int(self.D))
        if self.omega is None:
            object.__setattr__(self, "omega", unit_sphere_area(self.D - 2))
        elif not (self.omega > 0 and math.isfinite(self.omega)):
            raise DimensionError(f"omega must be positive and finite (got {self.omega})")

    @property
    def n(self) -> int:
        return (self.D - 3) // 2


def metric(D: int) -> np.ndarray:
    """Diagonal of the metric, ``(-1, 1, ..., 1)``."""
    eta = np.ones(D)
    eta[0] = -1.0
    return eta


def vector(components, dim: Dimension | int | None = None) -> np.ndarray:
    """Validate and return a float vector (leading axis = spacetime index)."""
    x = np.asarray(components, dtype=float)
    if x.ndim == 0:
        raise ContractError("a Lorentz vector needs at least one axis")
    if dim is not None:
        D = dim.D if isinstance(dim, Dimension) else int(dim)
        if x.shape[0] != D:
            raise ContractError(f"vector has {x.shape[0]} components, expected D={D}")
    return x


def lower(u) -> np.ndarray:
    """Lower (or raise) the index: flips the sign of the time component only."""
    u = np.array(u, dtype=float)
    u[0] = -u[0]
    return u


def dot(u, v, dim: Dimension | int | None = None) -> np.ndarray | float:
    """Minkowski product ``-u0 v0 + sum_i ui vi`` over the leading axis."""
    u = vector(u, dim)
    v = vector(v, dim)
    if u.shape[0] != v.shape[0]:
        raise ContractError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    out = -u[0] * v[0] + np.sum(u[1:] * v[1:], axis=0)
    return float(out) if np.ndim(out) == 0 else out


def classify(x, dim: Dimension | int | None = None, tol: float = 1e-12) -> Interval:
    if tol < 0:
        raise ContractError("tol must be non-negative")
    x2 = dot(x, x, dim)
    if x2 < -tol:
        return "timelike"
    if abs(x2) <= tol:
        return "null"
    return "spacelike"


def boost_matrix(rapidity: float, axis: int, D: int) -> np.ndarray:
    """Pure boost mixing time with spatial ``axis`` (1 <= axis <= D-1)."""
    if not 1 <= axis <= D - 1:
        raise ContractError(f"boost axis must lie in [1, {D - 1}], got {axis}")
    L = np.eye(D)
    ch, sh = math.cosh(rapidity), math.sinh(rapidity)
    L[0, 0] = L[axis, axis] = ch
    L[0, axis] = L[axis, 0] = sh
    return L


def boost(x, rapidity: float, axis: int, dim: Dimension | int | None = None) -> np.ndarray:
    x = vector(x, dim)
    return boost_matrix(rapidity, axis, x.shape[0]) @ x


def velocity_from_beta(beta) -> np.ndarray:
    """On-shell velocity ``gamma (1, beta)`` from a spatial 3-velocity-like vector, |beta| < 1."""
    beta = np.asarray(beta, dtype=float)
    b2 = float(beta @ beta)
    if not b2 < 1.0:
        raise ContractError(f"|beta| must be < 1 (got {math.sqrt(b2):.6g})")
    gamma = 1.0 / math.sqrt(1.0 - b2)
    return np.concatenate(([gamma], gamma * beta))
