"""The would-be pure-gauge scalar and the gap A - d chi.

Integrating v/(R.v) against the Green function looks like integrating a
gradient, because d ln|R.v| has v/(R.v) as one of its pieces.  At fixed
lam, however, the proper time s(x; lam) depends on x as well, and

    v^mu/(R.v) = d^mu ln|R.v| + sign * (v^2 - R.a)/(R.v) * d^mu s,

with d^mu s = R^mu/(R.v).  ``identity_residual`` measures both choices of
``sign`` by re-inverting s at displaced points; ``gauge_gap`` shows that the
second term survives the lam integral, so A is not a gradient.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import series
from .errors import ContractError
from .greens import QuadratureSpec, fp_integral
from .potentials import A_generic, lambda_derivative
from .quadrature import Integral
from .spacetime import Dimension, dot, metric, vector
from .worldline import Worldline

Sign = Literal["minus", "plus"]
SIGNS: dict[str, int] = {"minus": -1, "plus": +1}
IDENTITY_TOLERANCE = 1e-6  # relative to |v/(R.v)|_inf


# -- chi ----------------------------------------------------------------------

def _log_Rv(R, v, a):
    return series.log_abs(series.dot(R, v))


def _correction(R, v, a):
    Rv = series.dot(R, v)
    coef = series.div(series.dot(v, v) - series.dot(R, a), series.mul(Rv, Rv))
    return np.stack([series.mul(coef, c) for c in R])


def _chi_integral(x, w: Worldline, dim: Dimension, charge: float, spec: QuadratureSpec) -> Integral:
    n = dim.n
    res = fp_integral(None, n, spec, derivative=lambda_derivative(w, x, n, _log_Rv))
    pref = -charge / (2.0 * dim.omega)
    return Integral(pref * float(res.value), abs(pref) * res.error)


def chi(x, w: Worldline, dim: Dimension, charge: float = 1.0, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """chi = (-1)^(n+1) e/(2 Omega) FP int lam^(-1/2) (d/dlam)^n ln|R.v| dlam."""
    x = vector(x, dim)
    if w.D != dim.D:
        raise ContractError("worldline and dimension disagree")
    return _chi_integral(x, w, dim, charge, spec).value


@dataclass(frozen=True)
class Gradient:
    value: np.ndarray
    est_error: float


def grad_chi(x, w: Worldline, dim: Dimension, charge: float = 1.0, spec: QuadratureSpec = QuadratureSpec(),
             h: float | None = None, estimate_error: bool = True) -> Gradient:
    """d^mu chi by 2nd-order central differences.

    The error estimate compares steps h and 2h (Richardson, order 2) and adds
    the quadrature error amplified by 1/h.
    """
    x = vector(x, dim)
    h = 1e-3 * (1.0 + float(np.max(np.abs(x)))) if h is None else h
    if not h > 0:
        raise ContractError("h must be positive")

    def central(step):
        out, qerr = np.zeros(dim.D), 0.0
        for mu in range(dim.D):
            xp, xm = x.copy(), x.copy()
            xp[mu] += step
            xm[mu] -= step
            cp, cm = _chi_integral(xp, w, dim, charge, spec), _chi_integral(xm, w, dim, charge, spec)
            out[mu] = (cp.value - cm.value) / (2.0 * step)
            qerr = max(qerr, (cp.error + cm.error) / (2.0 * step))
        return metric(dim.D) * out, qerr

    g, qerr = central(h)
    if not estimate_error:
        return Gradient(g, qerr)
    g2, _ = central(2.0 * h)
    return Gradient(g, float(np.max(np.abs(g - g2))) / 3.0 + qerr)


# -- pointwise identity -------------------------------------------------------

@dataclass(frozen=True)
class IdentityTerms:
    lhs: np.ndarray  # v^mu / (R.v)
    log_gradient: np.ndarray  # d^mu ln|R.v| at fixed lam
    correction: np.ndarray  # (v^2 - R.a)/(R.v) d^mu s
    scale: float

    def residual(self, sign: Sign) -> float:
        return float(np.max(np.abs(self.lhs - (self.log_gradient + SIGNS[sign] * self.correction))))


def identity_terms(x, w: Worldline, lam: float, dim: Dimension, h: float | None = None) -> IdentityTerms:
    x = vector(x, dim)
    if not lam >= 0:
        raise ContractError("lam must be >= 0")
    s = w.invert_lambda(x, lam)
    z, v, a = w.eval(s)
    R = x - z
    Rv = dot(R, v)
    lhs = v / Rv
    ds_up = metric(dim.D) * w.ds_dx(x, lam)  # also screens the near-lightcone case
    correction = (dot(v, v) - dot(R, a)) / Rv * ds_up

    h = 1e-3 * float(np.max(np.abs(R))) if h is None else h
    if not h > 0:
        raise ContractError("h must be positive")

    def log_Rv(y):
        sy = w.invert_lambda(y, lam)
        zy, vy, _ = w.eval(sy)
        return np.log(abs(dot(y - zy, vy)))

    grad = np.zeros(dim.D)
    for mu in range(dim.D):
        vals = []
        for off in (-2.0, -1.0, 1.0, 2.0):
            y = x.copy()
            y[mu] += off * h
            vals.append(log_Rv(y))
        grad[mu] = (vals[0] - 8.0 * vals[1] + 8.0 * vals[2] - vals[3]) / (12.0 * h)
    return IdentityTerms(lhs, metric(dim.D) * grad, correction, float(np.max(np.abs(lhs))))


def identity_residual(x, w: Worldline, lam: float, dim: Dimension, sign: Sign, h: float | None = None) -> float:
    """max_mu |v^mu/(R.v) - (d^mu ln|R.v| + sign * correction^mu)| at fixed lam."""
    if sign not in SIGNS:
        raise ContractError(f"sign must be 'minus' or 'plus', got {sign!r}")
    return identity_terms(x, w, lam, dim, h).residual(sign)


def choose_sign(terms: IdentityTerms, tol: float = IDENTITY_TOLERANCE) -> tuple[Sign | None, bool]:
    """The sign whose residual is smaller, and whether it is the only one within tol * scale."""
    res = {s: terms.residual(s) for s in SIGNS}
    best = min(res, key=res.get)
    passing = [s for s in SIGNS if res[s] <= tol * terms.scale]
    return best, passing == [best]


# -- integrated gap -----------------------------------------------------------

@dataclass(frozen=True)
class GaugeReport:
    x: np.ndarray
    A: np.ndarray
    grad_chi: np.ndarray
    gap: np.ndarray
    gap_rel: float
    identity_residual_minus: float
    identity_residual_plus: float
    chosen_sign: Sign
    lam_ref: float
    scale: float
    sign_exclusive: bool
    correction: np.ndarray
    consistency: float
    est_error: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            out[k] = v.tolist() if isinstance(v, np.ndarray) else v
        return out


def integrated_correction(x, w: Worldline, dim: Dimension, charge: float = 1.0,
                          spec: QuadratureSpec = QuadratureSpec()) -> Integral:
    """The correction term carried through the same lam integral as A (plus sign)."""
    n = dim.n
    res = fp_integral(None, n, spec, derivative=lambda_derivative(w, vector(x, dim), n, _correction))
    pref = -charge / (2.0 * dim.omega)
    return Integral(pref * np.asarray(res.value), abs(pref) * res.error)


def gauge_gap(x, w: Worldline, dim: Dimension, charge: float = 1.0, spec: QuadratureSpec = QuadratureSpec(),
              lam_ref: float | None = None, h: float | None = None) -> GaugeReport:
    x = vector(x, dim)
    A = A_generic(x, w, dim, charge, spec)
    g = grad_chi(x, w, dim, charge, spec, h)
    gap = A.A - g.value
    tiny = np.finfo(float).tiny
    gap_rel = float(np.max(np.abs(gap)) / max(float(np.max(np.abs(A.A))), tiny))

    if lam_ref is None:
        s0 = w.retarded_root(x)
        z, v, _ = w.eval(s0)
        lam_ref = float(dot(x - z, v) ** 2)
    terms = identity_terms(x, w, lam_ref, dim)
    sign, exclusive = choose_sign(terms)

    corr = integrated_correction(x, w, dim, charge, spec)
    correction = SIGNS[sign] * corr.value
    consistency = float(np.max(np.abs(gap - correction)) / max(float(np.max(np.abs(correction))), tiny))
    return GaugeReport(
        x=x, A=A.A, grad_chi=g.value, gap=gap, gap_rel=gap_rel,
        identity_residual_minus=terms.residual("minus"), identity_residual_plus=terms.residual("plus"),
        chosen_sign=sign, lam_ref=lam_ref, scale=terms.scale, sign_exclusive=exclusive,
        correction=correction, consistency=consistency,
        est_error={"A": A.est_error, "grad_chi": g.est_error, "correction": corr.error},
    )
