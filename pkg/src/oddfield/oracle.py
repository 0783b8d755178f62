"""Independent brute-force evaluators for cross-checking the primary pipeline.

Nothing in the primary modules imports this file.  The evaluators here
work in proper-time space (not lam space), use plain bisection instead of
Newton, and take finite parts from exact antiderivatives, so agreement with
the primary route is a genuine check.  They are slow by design.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy as sp
from scipy import integrate, special

from .errors import ContractError, QuadratureError
from .spacetime import Dimension, dot, vector
from .worldline import Worldline


@dataclass(frozen=True)
class OracleResult:
    value: float | np.ndarray
    est_error: float
    method: str

    def __post_init__(self):
        if not self.est_error >= 0:
            raise ContractError("est_error must be non-negative")


def bisect_root(f, lo: float, hi: float, tol: float, max_iter: int = 400) -> float:
    if not tol > 0:
        raise ContractError("tol must be positive")
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise ContractError(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid in (lo, hi):
            return mid
        f_mid = f(mid)
        if f_mid == 0:
            return mid
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _lam(w: Worldline, x, s: float) -> float:
    return float(w.lam(x, s)[0])


def light_cone_crossing(w: Worldline, x, a: float = 0.0) -> float:
    """Proper time s_-(a) solving -R(s)^2 + a = 0 with R0 > 0, by bisection."""
    x = vector(x, w.D)
    hi = w.proper_time_at(float(x[0]))
    if not _lam(w, x, hi) < -a:
        raise ContractError(f"shift a={a:g} exceeds the spatial separation squared at equal time")
    step = 1.0
    lo = hi - step
    while not _lam(w, x, lo) > -a:
        step *= 2.0
        lo = hi - step
        if step > 1e6:
            raise ContractError("past light cone does not meet the worldline")
    return bisect_root(lambda s: _lam(w, x, s) + a, lo, hi, tol=1e-15 * max(1.0, abs(hi)))


def _quad_vec(f, lo, hi):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        val, err = integrate.quad_vec(f, lo, hi, epsabs=1e-15, epsrel=1e-13, limit=400)
    return np.asarray(val), float(err)


def direct_s_integral(x, w: Worldline, dim: Dimension, a: float, s_split: float | None = None) -> OracleResult:
    """I(a) = int_{-inf}^{s_-(a)} v(s) / sqrt(-R(s)^2 + a) ds, up to an a-independent constant.

    The integral diverges in the far past for every a; what is returned is
    int_{-inf}^{s_split} v [(lam + a)^(-1/2) - lam^(-1/2)] ds
    + int_{s_split}^{s_-(a)} v (lam + a)^(-1/2) ds,
    whose a-derivatives equal those of I(a).  Keep ``s_split`` fixed when
    differencing in a (the default depends only on x and the worldline).
    """
    if not a > 0:
        raise ContractError("a must be positive")
    x = vector(x, dim)
    if s_split is None:
        s_split = default_split(w, x)
    s_minus = light_cone_crossing(w, x, a)
    if not s_minus > s_split:
        raise ContractError("s_split must precede the shifted light-cone crossing")
    z_minus, _, _ = w.eval(s_minus)

    def near(wv):
        s = s_minus - wv * wv
        z, v, _ = w.eval(s)
        dlam = -dot(z_minus - z, 2.0 * x - z - z_minus)
        return 2.0 * wv * v / math.sqrt(dlam)

    near_val, near_err = _quad_vec(near, 0.0, math.sqrt(s_minus - s_split))

    def far(s):
        _, v, _ = w.eval(s)
        lam = _lam(w, x, s)
        ra, r0 = math.sqrt(lam + a), math.sqrt(lam)
        return -a * v / (ra * r0 * (ra + r0))

    far_val, far_err = np.zeros(dim.D), 0.0
    edge, width, quiet = s_split, 1.0, 0
    for _ in range(200):
        lo = edge - width
        with np.errstate(over="ignore", invalid="ignore"):
            lam_lo = _lam(w, x, lo)
        if not math.isfinite(lam_lo) or lam_lo > 1e250:
            break
        piece, err = _quad_vec(far, lo, edge)
        far_val, far_err = far_val + piece, far_err + err
        small = np.max(np.abs(piece)) <= 1e-16 * max(np.max(np.abs(far_val)), np.max(np.abs(near_val)))
        quiet = quiet + 1 if small else 0
        if quiet >= 3:
            break
        edge, width = lo, 2.0 * width
    else:
        raise QuadratureError("far-past tail of the s-space integral did not decay",
                              {"a": a, "last_edge": edge, "last_piece": piece.tolist()})
    value = near_val + far_val
    return OracleResult(value=value, est_error=near_err + far_err + 1e-15 * float(np.max(np.abs(value))),
                        method="s-space adaptive quadrature")


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _far_windows(w: Worldline, x, s_split: float) -> list[tuple[float, float]]:
    """Doubling windows below ``s_split`` until lam blows up or the integrand is negligible."""
    windows, edge, width = [], s_split, 1.0
    for _ in range(80):
        lo = edge - width
        with np.errstate(over="ignore", invalid="ignore"):
            lam_lo = _lam(w, x, lo)
        windows.append((lo, edge))
        if not math.isfinite(lam_lo) or lam_lo > 1e250 or width > 1e16:
            break
        edge, width = lo, 2.0 * width
    return windows


_TAYLOR_REACH = 0.25
_TAYLOR_ORDER = 30


def _displacement(w: Worldline, s0: float, delta: np.ndarray):
    """z(s0 - delta) - z(s0) and v(s0 - delta) without forming s0 - delta for small delta.

    Rounding s0 - delta would cost |s0| ulp in a displacement of size delta;
    the Taylor series about s0 keeps full relative accuracy.
    """
    delta = np.asarray(delta, dtype=float)
    dz = np.empty((w.D, delta.size))
    v = np.empty((w.D, delta.size))
    small = delta < _TAYLOR_REACH
    if small.any():
        c = w.taylor(np.array([s0]), _TAYLOR_ORDER)[:, :, 0]
        k = np.arange(_TAYLOR_ORDER + 1)
        powers = (-delta[small])[None, :] ** k[:, None]
        dz[:, small] = c[:, 1:] @ powers[1:]
        v[:, small] = (c[:, 1:] * k[1:]) @ powers[:-1]
    if (~small).any():
        far = w.taylor(s0 - delta[~small], 1)
        dz[:, ~small] = far[:, 0, :] - w.eval(s0)[0][:, None]
        v[:, ~small] = far[:, 1, :]
    return dz, v


def shifted_integral_table(x, w: Worldline, dim: Dimension, a_steps, panels: int = 4,
                           s_split: float | None = None) -> np.ndarray:
    """I(a_k) for every shift on one fixed composite Gauss-Legendre mesh.

    Same subtraction as ``direct_s_integral``, but the nodes (in the mapped
    near-endpoint variable and in s below ``s_split``) do not depend on a, so
    the discretization error is a smooth function of a and survives being
    differentiated n times.  Compare two panel counts to gauge it.
    """
    x = vector(x, dim)
    if s_split is None:
        s_split = default_split(w, x)
    if panels < 1:
        raise ContractError("panels must be >= 1")
    edges = np.linspace(0.0, 1.0, panels + 1)
    t_nodes = (0.5 * (edges[:-1, None] + edges[1:, None]) + 0.5 * np.diff(edges)[:, None] * _GL_NODES).ravel()
    t_weights = (0.5 * np.diff(edges)[:, None] * _GL_WEIGHTS).ravel()
    far_s, far_wt = [], []
    for lo, hi in _far_windows(w, x, s_split):
        sub = np.linspace(lo, hi, panels + 1)
        far_s.append((0.5 * (sub[:-1, None] + sub[1:, None]) + 0.5 * np.diff(sub)[:, None] * _GL_NODES).ravel())
        far_wt.append((0.5 * np.diff(sub)[:, None] * _GL_WEIGHTS).ravel())
    far_s, far_wt = np.concatenate(far_s), np.concatenate(far_wt)
    with np.errstate(over="ignore", invalid="ignore"):
        zc = w.taylor(far_s, 1)
        lam_far = w.lam(x, far_s)
    keep = np.isfinite(lam_far) & np.all(np.isfinite(zc[:, 1, :]), axis=0) & (lam_far < 1e200)
    v_far, lam_far, far_wt = zc[:, 1, keep], lam_far[keep], far_wt[keep]

    out = []
    for a in np.asarray(a_steps, dtype=float):
        if not a > 0:
            raise ContractError("a must be positive")
        s_minus = light_cone_crossing(w, x, a)
        W = math.sqrt(s_minus - s_split)
        wv = t_nodes * W
        dz, v = _displacement(w, s_minus, wv * wv)
        R_minus = x - w.eval(s_minus)[0]
        dlam = 2.0 * dot(R_minus[:, None], dz) - dot(dz, dz)
        near = (2.0 * wv * v / np.sqrt(dlam)) @ (t_weights * W)
        ra, r0 = np.sqrt(lam_far + a), np.sqrt(lam_far)
        far = (-a * v_far / (ra * r0 * (ra + r0))) @ far_wt
        out.append(near + far)
    return np.array(out)


def default_split(w: Worldline, x) -> float:
    s_ret = light_cone_crossing_zero(w, x)
    z, _, _ = w.eval(s_ret)
    return s_ret - (1.0 + abs(float(x[0] - z[0])))


def light_cone_crossing_zero(w: Worldline, x) -> float:
    """Retarded proper time (a = 0) by bisection."""
    x = vector(x, w.D)
    hi = w.proper_time_at(float(x[0]))
    if not _lam(w, x, hi) < 0:
        raise ContractError("observation point lies on the worldline")
    step = 1.0
    lo = hi - step
    while not _lam(w, x, lo) > 0:
        step *= 2.0
        lo = hi - step
        if step > 1e6:
            raise ContractError("past light cone does not meet the worldline")
    return bisect_root(lambda s: _lam(w, x, s), lo, hi, tol=1e-15 * max(1.0, abs(hi)))


def shift_derivative(a_steps, values, n: int, errors=None) -> tuple[np.ndarray, float]:
    """n-th derivative at a = 0 of the interpolating polynomial through (a_k, values_k).

    Returns the estimate and an error bound: the change when the largest step
    is dropped plus the per-point ``errors`` (default: a few ulp of each value)
    pushed through the extrapolation weights.
    """
    a = np.asarray(a_steps, dtype=float)
    vals = np.asarray(values, dtype=float)
    if a.ndim != 1 or a.size < n + 2:
        raise ContractError(f"need at least n+2={n + 2} shift values, got {a.size}")
    if np.any(a <= 0) or np.any(np.diff(a) >= 0):
        raise ContractError("a_steps must be positive and strictly decreasing")

    w_full = fornberg_weights(a, n)
    flat = vals.reshape(a.size, -1)
    flat = flat - flat[-1]  # weights annihilate constants; removing one first avoids cancellation
    full = w_full @ flat
    reduced = fornberg_weights(a[1:], n) @ flat[1:]
    if errors is None:  # rounding in the tabulated values
        errors = 8.0 * np.finfo(float).eps * np.max(np.abs(vals.reshape(a.size, -1)), axis=1)
    noise = float(np.abs(w_full) @ np.asarray(errors, dtype=float))
    return full.reshape(vals.shape[1:]), float(np.max(np.abs(full - reduced))) + noise


def fornberg_weights(nodes, m: int, x0: float = 0.0) -> np.ndarray:
    """Weights w_k with sum_k w_k f(nodes_k) ~ f^(m)(x0), by Fornberg's recursion."""
    nodes = np.asarray(nodes, dtype=float)
    N = nodes.size
    c = np.zeros((N, m + 1))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = nodes[0] - x0
    for i in range(1, N):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = nodes[i] - x0
        for j in range(i):
            c3 = nodes[i] - nodes[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def default_a_steps(w: Worldline, x, n: int, count: int | None = None) -> np.ndarray:
    s_ret = light_cone_crossing_zero(w, x)
    z, v, _ = w.eval(s_ret)
    scale = dot(x - z, v) ** 2
    count = n + 8 if count is None else count
    return 0.1 * scale * 0.7 ** np.arange(count)


# -- exact finite parts and closed forms --------------------------------------

@lru_cache(maxsize=None)
def sinh_fp_exact(n: int) -> OracleResult:
    """FP int_{-inf}^0 csch^(2n) from the exact antiderivative in c = coth(theta).

    d/dtheta P(coth theta) = csch^(2n) gives P'(c) = -(c^2 - 1)^(n-1); P is odd,
    so its Laurent expansion at 0- has no constant term and the finite part is
    -P(coth(-inf)) = -P(-1).
    """
    if n < 1:
        raise ContractError("n must be >= 1")
    c, th = sp.symbols("c theta")
    P = -sp.integrate((c**2 - 1) ** (n - 1), (c, 0, c))
    check = sp.simplify(sp.diff(P.subs(c, sp.coth(th)), th) - sp.csch(th) ** (2 * n))
    if check != 0:
        raise QuadratureError("antiderivative check failed", {"n": n, "residual": str(check)})
    return OracleResult(value=float(-P.subs(c, -1)), est_error=0.0, method="coth antiderivative")


def fp_power_family(n: int, r: float) -> OracleResult:
    """FP int g (d/dlam)^n[theta lam^-1/2] for g = (r^2 + lam)^(-1/2): closed form (n-1)!/r^(2n)."""
    return OracleResult(value=math.factorial(n - 1) / r ** (2 * n), est_error=0.0, method="Beta function")


def fp_power_family_quad(n: int, r: float) -> OracleResult:
    """Same value by adaptive quadrature of the analytically differentiated integrand."""
    coef = (-1) ** n * math.prod(range(2 * n - 1, 0, -2)) / 2**n

    def f(u):  # lam = u^2
        return 2.0 * (-1) ** n * coef * (r * r + u * u) ** (-n - 0.5)

    val, err = integrate.quad(f, 0, np.inf, epsabs=0, epsrel=1e-13, limit=200)
    return OracleResult(value=val, est_error=err, method="quad of differentiated integrand")


def uniform_coefficient(dim: Dimension) -> float:
    """C_{n,D} from the lam-space route: (2n-1)!!/2^n B(1/2, n) / (2 Omega) = (n-1)!/(2 Omega)."""
    n = dim.n
    return math.prod(range(2 * n - 1, 0, -2)) / 2**n * special.beta(0.5, n) / (2.0 * dim.omega)


def uniform_chi(x, b, dim: Dimension, charge: float = 1.0) -> float:
    """chi for uniform motion: charge (n-1)! B(1/2, n-1/2) / (4 Omega r^(2n-1))."""
    n = dim.n
    r2 = dot(b, x) ** 2 + dot(x, x)
    return charge * math.factorial(n - 1) * special.beta(0.5, n - 0.5) / (4.0 * dim.omega) * r2 ** (0.5 - n)
