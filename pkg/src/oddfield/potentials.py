"""Retarded potentials A^mu(x) of a point charge in odd D.

Three routes:

* ``A_uniform``  closed form C e b / r^(2n) for uniform motion,
* ``A_generic``  the Green-function convolution rewritten in lam = -R^2 as a
  finite-part integral; works for any worldline,
* ``A_ashift_oracle``  the a-shifted proper-time integral differentiated n
  times in a, used to cross-check ``A_generic``.

Sign bookkeeping for ``A_generic``: with d/dR^2 = -d/dlam and
ds = dlam / (2 R.v) (lam decreases along the branch), the convolution
becomes A = -(e / 2 Omega) FP int_0^inf v/(R.v) (d/dlam)^n[theta lam^-1/2] dlam.
This is pinned against ``A_uniform`` at x = (2, 1, 0, ...) in the tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import series
from .errors import ContractError, LightconeDegeneracyError, QuadratureError
from .greens import QuadratureSpec, coefficient_C, fp_integral
from .spacetime import Dimension, dot, vector
from .worldline import Worldline

Method = Literal["closed", "fp_quadrature", "a_shift"]


@dataclass(frozen=True)
class PotentialSample:
    x: np.ndarray
    A: np.ndarray
    method: Method
    est_error: float

    def __post_init__(self):
        if not self.est_error >= 0:
            raise ContractError("est_error must be non-negative")
        if not np.all(np.isfinite(self.A)):
            raise ContractError("potential is not finite")


def A_uniform(x, b, dim: Dimension, charge: float = 1.0) -> PotentialSample:
    x = vector(x, dim)
    b = vector(b, dim)
    if abs(dot(b, b) + 1.0) > 1e-10:
        raise ContractError("velocity must satisfy b.b = -1")
    r2 = dot(b, x) ** 2 + dot(x, x)
    if r2 <= 0:
        raise LightconeDegeneracyError("observation point lies on the worldline (r^2 <= 0)")
    A = coefficient_C(dim) * charge * b / r2**dim.n
    return PotentialSample(x=x, A=A, method="closed", est_error=1e-13 * float(np.max(np.abs(A))))


def green_prefactor(dim: Dimension, charge: float = 1.0) -> float:
    """(-1)^(n+1) e / (2 Omega): multiplies int lam^(-1/2) (d/dlam)^n [...] dlam."""
    return (-1) ** (dim.n + 1) * charge / (2.0 * dim.omega)


def lambda_derivative(w: Worldline, x, n: int, quantity):
    """Return lam -> (d/dlam)^n quantity(R, v, a) along the retarded branch of ``x``.

    ``quantity`` maps the series of R, v, a (each (D, n+1, N)) to a series
    (..., n+1, N) and must use only ``series`` arithmetic.
    """
    def derivative(lam):
        ls = w.lambda_series(x, lam, n)
        if ls.local is None:
            q = quantity(ls.R, ls.v, ls.a)
        else:
            q = quantity(ls.local.R, ls.local.v, ls.local.a)
            if q.ndim == 3:
                q = ls.local.lab(q)
        return math.factorial(n) * q[..., n, :]

    return derivative


def velocity_over_Rv(R, v, a):
    Rv = series.dot(R, v)
    return np.stack([series.div(c, Rv) for c in v])


def A_generic(x, w: Worldline, dim: Dimension, charge: float = 1.0,
              spec: QuadratureSpec = QuadratureSpec()) -> PotentialSample:
    x = vector(x, dim)
    if w.D != dim.D:
        raise ContractError("worldline and dimension disagree")
    n = dim.n
    result = fp_integral(None, n, spec, derivative=lambda_derivative(w, x, n, velocity_over_Rv))
    pref = -charge / (2.0 * dim.omega)
    A = pref * np.asarray(result.value)
    err = abs(pref) * result.error + 1e-14 * float(np.max(np.abs(A)))
    return PotentialSample(x=x, A=A, method="fp_quadrature", est_error=err)


def A_ashift_oracle(x, w: Worldline, dim: Dimension, charge: float = 1.0, a_steps=None,
                    panels: int = 4) -> PotentialSample:
    """A = (e / Omega) (d/da)^n I(a) at a = 0+, I(a) the a-shifted proper-time integral.

    (d/dR^2)^n of theta(-R^2)/sqrt(-R^2) equals (d/da)^n theta(lam + a)/sqrt(lam + a)
    at a = 0 up to (-1)^n, which cancels the (-1)^n in front of the Green function.
    The derivative is read off the polynomial through I(a_k), extrapolated to 0.
    I(a_k) share one quadrature mesh; ``panels`` and 2 * ``panels`` are compared
    for the error estimate.
    """
    from . import oracle  # kept out of the module namespace: primary code must not depend on it

    x = vector(x, dim)
    n = dim.n
    if a_steps is None:
        a_steps = oracle.default_a_steps(w, x, n)
    a_steps = np.asarray(a_steps, dtype=float)
    if a_steps.ndim != 1 or a_steps.size < n + 2:
        raise ContractError(f"a_steps needs at least n+2 = {n + 2} entries")
    if np.any(a_steps <= 0) or np.any(np.diff(a_steps) >= 0):
        raise ContractError("a_steps must be positive and strictly decreasing")
    split = oracle.default_split(w, x)
    coarse = oracle.shifted_integral_table(x, w, dim, a_steps, panels=panels, s_split=split)
    fine = oracle.shifted_integral_table(x, w, dim, a_steps, panels=2 * panels, s_split=split)
    deriv, spread = oracle.shift_derivative(a_steps, fine, n)
    deriv_coarse, _ = oracle.shift_derivative(a_steps, coarse, n)
    A = charge / dim.omega * deriv
    err = abs(charge) / dim.omega * (spread + float(np.max(np.abs(deriv - deriv_coarse))))
    if spread > 1e-3 * max(float(np.max(np.abs(deriv))), 1e-300):
        raise QuadratureError(
            "a -> 0 extrapolation did not converge",
            {"a_steps": a_steps.tolist(), "I": fine.tolist(), "spread": spread},
        )
    return PotentialSample(x=x, A=A, method="a_shift", est_error=float(err))
