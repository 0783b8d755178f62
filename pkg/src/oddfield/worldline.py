"""Proper-time parameterized source trajectories.

Besides kinematics, a worldline answers the light-cone questions the
potentials need: the retarded proper time of an observation point, the
inversion ``s(x; lam)`` of ``lam = -R(s)**2`` on the retarded branch, the
gradient of that inversion with respect to ``x`` at fixed ``lam``, and exact
Taylor series of ``R, v, a`` as functions of ``lam``.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from . import series
from .errors import ContractError, LightconeDegeneracyError, NoRetardedRootError
from .spacetime import dot, lower, vector

# Sign in front of ``lam`` under the radical of the uniform-motion inversion
# s = -(b.x) - sqrt((b.x)**2 + x**2 + RADICAL_SIGN * lam).  Fixed by the
# round-trip -R(s)**2 == lam (see tests/test_worldline.py and the acceptance suite).
RADICAL_SIGN = +1

_MAX_BRACKET_DOUBLINGS = 80
_MAX_NEWTON = 100
DEGENERACY_THRESHOLD = 1e-10


@dataclass(frozen=True)
class SeparationVector:
    R: np.ndarray
    s: float


@dataclass(frozen=True)
class LambdaSeries:
    """Taylor series in ``delta = lam' - lam`` of R, v and a along the retarded branch.

    Every array is shaped (D, order + 1, N); ``s`` holds the N branch points.
    """

    s: np.ndarray
    R: np.ndarray
    v: np.ndarray
    a: np.ndarray
    local: "LocalSeries | None" = None


@dataclass(frozen=True)
class LocalSeries:
    """R, v, a in a per-sample rest frame of the source, plus the map back.

    Invariants formed from these avoid the cancellation that the lab-frame
    components suffer far along a hyperbola.  ``to_lab`` is (D, D, N).
    """

    R: np.ndarray
    v: np.ndarray
    a: np.ndarray
    to_lab: np.ndarray

    def lab(self, q: np.ndarray) -> np.ndarray:
        """Map a vector series (D, K, N) back to lab components."""
        return np.einsum("ijn,jkn->ikn", self.to_lab, q)


class Worldline(ABC):
    kind: str
    D: int

    @abstractmethod
    def taylor(self, s, order: int) -> np.ndarray:
        """Taylor coefficients of z at proper times ``s``: shape (D, order+1, N)."""

    @abstractmethod
    def proper_time_at(self, t: float) -> float:
        """Proper time at which the source's coordinate time equals ``t``."""

    @abstractmethod
    def to_dict(self) -> dict:
        ...

    # -- kinematics ---------------------------------------------------------

    def eval(self, s: float):
        """Position, velocity and acceleration at proper time ``s``."""
        if not math.isfinite(s):
            raise ContractError(f"proper time must be finite, got {s}")
        c = self.taylor(np.array([s], dtype=float), 2)[:, :, 0]
        return c[:, 0], c[:, 1], 2.0 * c[:, 2]

    def separation(self, x, s: float) -> SeparationVector:
        z, _, _ = self.eval(s)
        return SeparationVector(R=vector(x, self.D) - z, s=float(s))

    def lam(self, x, s) -> np.ndarray:
        """``-R(s)**2`` for an array of proper times."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        R = np.asarray(x, dtype=float)[:, None] - self.taylor(s, 0)[:, 0, :]
        return -dot(R, R)

    def _lam_and_slope(self, x, s):
        c = self.taylor(s, 1)
        R = np.asarray(x, dtype=float)[:, None] - c[:, 0, :]
        return -dot(R, R), 2.0 * dot(R, c[:, 1, :])

    # -- retarded branch ----------------------------------------------------

    def retarded_root(self, x) -> float:
        """Proper time where the past light cone of ``x`` crosses the worldline."""
        return float(self.invert_lambda(x, 0.0))

    def invert_lambda(self, x, lam):
        """Solve ``-R(s)**2 = lam`` on the retarded branch (s <= retarded time)."""
        return self._invert_newton(x, lam)

    def _invert_newton(self, x, lam):
        x = vector(x, self.D)
        scalar = np.ndim(lam) == 0
        target = np.atleast_1d(np.asarray(lam, dtype=float))
        if np.any(target < 0) or not np.all(np.isfinite(target)):
            raise ContractError("lam must be finite and >= 0")

        s_hi = self.proper_time_at(float(x[0]))
        lam_hi = float(self.lam(x, s_hi)[0])
        if lam_hi >= 0.0:
            # R = 0: the observation point sits on the worldline; only lam = 0 has a root there
            if lam_hi == 0.0 and np.all(target == 0.0):
                return s_hi if scalar else np.full(target.shape, s_hi)
            raise LightconeDegeneracyError("observation point lies on the worldline")

        z_hi = self.taylor(np.array([s_hi]), 0)[:, 0, 0]
        step0 = 1.0 + float(np.linalg.norm(x[1:] - z_hi[1:]))
        step = np.full(target.shape, step0)
        lo = s_hi - step
        with np.errstate(over="ignore", invalid="ignore"):
            f_lo = self.lam(x, lo) - target
            for _ in range(_MAX_BRACKET_DOUBLINGS):
                need = ~(f_lo >= 0)
                if not need.any():
                    break
                step[need] *= 2.0
                lo[need] = s_hi - step[need]
                f_lo[need] = self.lam(x, lo[need]) - target[need]
            else:
                raise NoRetardedRootError(
                    f"no retarded root: -R(s)^2 never reached lam={target[need].max():.6g} "
                    f"for s >= {lo[need].min():.6g}"
                )
        hi = np.full(target.shape, s_hi)

        s = np.where(f_lo == 0.0, lo, 0.5 * (lo + hi))
        done = f_lo == 0.0
        for _ in range(_MAX_NEWTON):
            lam_s, slope = self._lam_and_slope(x, s)
            f = lam_s - target
            lo = np.where(f >= 0, s, lo)
            hi = np.where(f <= 0, s, hi)
            with np.errstate(divide="ignore", invalid="ignore"):
                s_new = s - f / slope
            bad = ~np.isfinite(s_new) | (s_new <= lo) | (s_new >= hi)
            s_new = np.where(bad, 0.5 * (lo + hi), s_new)
            tol = 4.0 * np.finfo(float).eps * np.maximum(1.0, np.abs(s))
            done = done | (f == 0.0) | ((np.abs(s_new - s) <= tol) & ~bad) | (hi - lo <= tol)
            s = np.where(done, s, s_new)
            if done.all():
                break
        else:
            raise NoRetardedRootError("safeguarded Newton did not converge on the retarded branch")
        return float(s[0]) if scalar else s

    def ds_dx(self, x, lam: float) -> np.ndarray:
        """Covariant gradient d s(x; lam) / d x^mu = R_mu / (R.v) at fixed lam."""
        x = vector(x, self.D)
        s = float(self.invert_lambda(x, lam))
        z, v, _ = self.eval(s)
        R = x - z
        Rv = dot(R, v)
        scale = max(float(np.max(np.abs(R)) * np.max(np.abs(v))), np.finfo(float).tiny)
        if abs(Rv) < DEGENERACY_THRESHOLD * scale:
            raise LightconeDegeneracyError(f"|R.v| = {abs(Rv):.3g} is below the near-lightcone threshold")
        return lower(R) / Rv

    def _local_frame(self, x, s, order: int):
        """Observation point, Taylor coefficients of z and the map to the lab, per sample.

        The default frame is the lab itself (``to_lab`` None).
        """
        return np.repeat(x[:, None], s.shape[0], axis=1), self.taylor(s, order), None

    def lambda_series(self, x, lam, order: int) -> LambdaSeries:
        """Exact Taylor series of R, v, a in powers of (lam' - lam) along the retarded branch."""
        x = vector(x, self.D)
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        s = np.atleast_1d(self.invert_lambda(x, lam))
        xl, zc, to_lab = self._local_frame(x, s, order + 2)
        K = order + 1
        R_s = -zc[:, :K].copy()
        R_s[:, 0] += xl
        v_s = np.stack([series.derivative(c) for c in zc])[:, :K]
        a_s = np.stack([series.derivative(series.derivative(c)) for c in zc])[:, :K]
        lam_s = -series.dot(R_s, R_s)
        lam_s[0] = lam
        Rv = series.dot(R_s, v_s)[0]
        if np.any(np.abs(Rv) < DEGENERACY_THRESHOLD * np.max(np.abs(R_s[:, 0]), axis=0)):
            raise LightconeDegeneracyError("R.v vanishes on the sampled branch")
        sigma = series.revert(lam_s)
        R = np.stack([series.compose(c, sigma) for c in R_s])
        v = np.stack([series.compose(c, sigma) for c in v_s])
        a = np.stack([series.compose(c, sigma) for c in a_s])
        if to_lab is None:
            return LambdaSeries(s=s, R=R, v=v, a=a)
        local = LocalSeries(R=R, v=v, a=a, to_lab=to_lab)
        return LambdaSeries(s=s, R=local.lab(R), v=local.lab(v), a=local.lab(a), local=local)


class UniformWorldline(Worldline):
    """Straight worldline ``z(s) = b s`` with on-shell velocity ``b.b = -1``."""

    kind = "uniform"

    def __init__(self, b):
        b = vector(b)
        if abs(dot(b, b) + 1.0) > 1e-10:
            raise ContractError(f"velocity must satisfy b.b = -1 (got {dot(b, b):.12g})")
        if b[0] <= 0:
            raise ContractError("velocity must be future-directed (b0 > 0)")
        self.b = b
        self.D = b.shape[0]

    def taylor(self, s, order):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.zeros((self.D, order + 1, s.shape[0]))
        out[:, 0, :] = self.b[:, None] * s
        if order >= 1:
            out[:, 1, :] = self.b[:, None]
        return out

    def proper_time_at(self, t):
        return t / float(self.b[0])

    def invert_lambda(self, x, lam):
        x = vector(x, self.D)
        scalar = np.ndim(lam) == 0
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        if np.any(lam < 0) or not np.all(np.isfinite(lam)):
            raise ContractError("lam must be finite and >= 0")
        s = uniform_lambda_inversion(self.b, x, lam, RADICAL_SIGN)
        if not np.all(np.isfinite(s)):
            raise LightconeDegeneracyError("observation point lies on the worldline")
        return float(s[0]) if scalar else s

    def to_dict(self):
        return {"kind": self.kind, "b": [float(c) for c in self.b]}


class HyperbolicWorldline(Worldline):
    """Uniformly accelerated worldline: z0 = sinh(g s)/g, z_axis = cosh(g s)/g."""

    kind = "hyperbolic"

    def __init__(self, g: float, axis: int, D: int):
        if not g > 0:
            raise ContractError(f"proper acceleration must be positive, got {g}")
        if not 1 <= axis <= D - 1:
            raise ContractError(f"axis must lie in [1, {D - 1}], got {axis}")
        self.g = float(g)
        self.axis = int(axis)
        self.D = int(D)

    def taylor(self, s, order):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        g = self.g
        with np.errstate(over="ignore"):
            sh, ch = np.sinh(g * s), np.cosh(g * s)
        out = np.zeros((self.D, order + 1, s.shape[0]))
        for k in range(order + 1):
            scale = g ** (k - 1) / math.factorial(k)
            even = k % 2 == 0
            out[0, k] = scale * (sh if even else ch)
            out[self.axis, k] = scale * (ch if even else sh)
        return out

    def lam(self, x, s):
        # z.z = 1/g^2 exactly; avoids inf - inf far in the past
        s = np.atleast_1d(np.asarray(s, dtype=float))
        x = np.asarray(x, dtype=float)
        g = self.g
        with np.errstate(over="ignore", invalid="ignore"):
            xz = (-x[0] * np.sinh(g * s) + x[self.axis] * np.cosh(g * s)) / g
        return -dot(x, x) + 2.0 * xz - 1.0 / g**2

    def _lam_and_slope(self, x, s):
        # z.v = 0, so d lam/ds = 2 R.v = 2 x.v without cancellation
        s = np.atleast_1d(np.asarray(s, dtype=float))
        x = np.asarray(x, dtype=float)
        g = self.g
        with np.errstate(over="ignore", invalid="ignore"):
            xv = -x[0] * np.cosh(g * s) + x[self.axis] * np.sinh(g * s)
        return self.lam(x, s), 2.0 * xv

    def proper_time_at(self, t):
        return math.asinh(self.g * t) / self.g

    def _local_frame(self, x, s, order):
        # Boost by -g s along the axis: z(s + sigma) -> z(sigma), done in light-cone
        # components so that x stays accurate when e^(g|s|) is large.
        g, ax = self.g, self.axis
        N = s.shape[0]
        ep, em = np.exp(g * s), np.exp(-g * s)
        xp, xm = x[ax] + x[0], x[ax] - x[0]
        xl = np.repeat(x[:, None], N, axis=1)
        lp, lm = xp * em, xm * ep
        xl[0] = 0.5 * (lp - lm)
        xl[ax] = 0.5 * (lp + lm)
        zc = np.repeat(self.taylor(np.zeros(1), order), N, axis=2)
        ch, sh = 0.5 * (ep + em), 0.5 * (ep - em)
        to_lab = np.zeros((self.D, self.D, N))
        for i in range(self.D):
            to_lab[i, i] = 1.0
        to_lab[0, 0] = to_lab[ax, ax] = ch
        to_lab[0, ax] = to_lab[ax, 0] = sh
        return xl, zc, to_lab

    def to_dict(self):
        return {"kind": self.kind, "g": self.g, "axis": self.axis}


def uniform_lambda_inversion(b, x, lam, radical_sign: int = RADICAL_SIGN):
    """Candidate inversion ``-(b.x) - sqrt((b.x)**2 + x**2 + radical_sign*lam)``.

    Both signs are exposed so the correct one can be established by a
    round-trip check rather than assumed.
    """
    bx = dot(b, x)
    disc = bx * bx + dot(x, x) + radical_sign * np.asarray(lam, dtype=float)
    with np.errstate(invalid="ignore"):
        return -bx - np.sqrt(disc)


def make_worldline(kind: str, D: int, *, beta=None, g: float | None = None, axis: int = 1) -> Worldline:
    from .spacetime import velocity_from_beta

    if kind == "uniform":
        beta = np.zeros(D - 1) if beta is None else np.asarray(beta, dtype=float)
        if beta.shape != (D - 1,):
            if beta.ndim == 1 and beta.shape[0] < D - 1:
                beta = np.concatenate([beta, np.zeros(D - 1 - beta.shape[0])])
            else:
                raise ContractError(f"beta needs at most {D - 1} components")
        return UniformWorldline(velocity_from_beta(beta))
    if kind == "hyperbolic":
        return HyperbolicWorldline(1.0 if g is None else g, axis, D)
    raise ContractError(f"unknown worldline kind {kind!r}")
