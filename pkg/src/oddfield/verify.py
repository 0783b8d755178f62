"""Machine-checkable invariant suites.

Each suite returns a list of ``Check`` records (measured value against a
tolerance).  ``run`` collects them into a JSON-ready report; the CLI exits
non-zero when any check fails.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .fields import F_numeric, F_uniform, convergence_order, lorentz_transform_field, measure_field_prefactor, residuals
from .gauge import choose_sign, gauge_gap, grad_chi, identity_terms
from .greens import QuadratureSpec, coefficient_C, fp_sinh_integral
from .potentials import A_ashift_oracle, A_generic, A_uniform
from .spacetime import Dimension, boost, boost_matrix, classify, dot, unit_sphere_area
from .worldline import HyperbolicWorldline, UniformWorldline, uniform_lambda_inversion

SUITES = ("geometry", "worldline", "greens", "potentials", "fields", "gauge")


@dataclass
class Check:
    name: str
    measured: float | str
    tolerance: float | str
    passed: bool


def _le(name, measured, tol) -> Check:
    measured = float(measured)
    return Check(name, measured, float(tol), bool(measured <= tol))


def _rel(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b)) / max(float(np.max(np.abs(b))), np.finfo(float).tiny))


def uniform_sample(D: int, count: int, seed: int = 0, r2_range=(0.5, 10.0), max_rapidity: float = 1.0):
    """(x, b) pairs with r^2 drawn from ``r2_range``: placed in the rest frame, then boosted."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        rho2 = rng.uniform(*r2_range)
        direction = rng.normal(size=D - 1)
        direction /= np.linalg.norm(direction)
        x = np.concatenate([[rng.uniform(-2.0, 2.0)], math.sqrt(rho2) * direction])
        b = np.zeros(D)
        b[0] = 1.0
        eta, axis = rng.uniform(-max_rapidity, max_rapidity), int(rng.integers(1, D))
        out.append((boost(x, eta, axis), boost(b, eta, axis)))
    return out


def hyperbolic_sample(D: int, count: int, seed: int = 1, g: float = 1.0):
    """Points with x^0 + x^1 > 0 (so the accelerated charge has a retarded image), kept off the worldline."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        x = np.zeros(D)
        x[0] = rng.uniform(-1.0, 1.5)
        x[1] = rng.uniform(0.2, 3.0)
        x[2:] = rng.uniform(-1.0, 1.0, size=D - 2) * (rng.uniform() < 0.7)
        if x[0] + x[1] <= 0.3:
            continue
        w = HyperbolicWorldline(g, 1, D)
        s = w.retarded_root(x)
        z, v, _ = w.eval(s)
        if dot(x - z, v) ** 2 < 0.05:
            continue
        out.append(x)
    return out


# -- suites -------------------------------------------------------------------

def suite_geometry(dim: Dimension) -> list[Check]:
    D = dim.D
    checks = [_le("unit 3-sphere area = 2 pi^2", abs(unit_sphere_area(3) - 2 * math.pi**2), 1e-12)]
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(10):
        u, v = rng.normal(size=D), rng.normal(size=D)
        eta, axis = rng.uniform(-1.5, 1.5), int(rng.integers(1, D))
        worst = max(worst, abs(dot(boost(u, eta, axis), boost(v, eta, axis)) - dot(u, v)) / (1 + abs(dot(u, v))))
    checks.append(_le("boosts preserve the inner product", worst, 1e-12))
    x = np.zeros(D)
    x[0], x[1] = 1.0, 1.0
    checks.append(Check("(1,1,0,..) is null", classify(x), "null", classify(x) == "null"))
    return checks


def suite_worldline(dim: Dimension) -> list[Check]:
    D = dim.D
    checks = []
    b = np.zeros(D)
    b[0] = 1.0
    x = np.zeros(D)
    x[0], x[1] = 2.0, 1.0
    worst_plus, worst_minus = 0.0, 0.0
    bb = boost(b, 0.9, 1)
    for lam in (0.0, 0.5, 3.0, 10.0):
        for sign in (+1, -1):
            s = float(uniform_lambda_inversion(bb, x, lam, sign))
            if not math.isfinite(s):
                err = math.inf
            else:
                R = x - bb * s
                err = abs(-dot(R, R) - lam) / (1.0 + lam)
            if sign > 0:
                worst_plus = max(worst_plus, err)
            else:
                worst_minus = max(worst_minus, err if lam > 0 else 1.0)
    checks.append(_le("lam inversion round trip, +lam radical", worst_plus, 1e-10))
    checks.append(Check("lam inversion round trip, -lam radical fails", worst_minus, "> 1e-6", worst_minus > 1e-6))

    w = HyperbolicWorldline(1.0, 1, D)
    from . import oracle

    worst = 0.0
    for xh in hyperbolic_sample(D, 5):
        worst = max(worst, abs(w.retarded_root(xh) - oracle.light_cone_crossing_zero(w, xh)))
    checks.append(_le("retarded root: Newton vs bisection (hyperbolic)", worst, 1e-10))

    u = UniformWorldline(bb)
    worst = 0.0
    for lam in (0.0, 1.0, 4.0):
        g = u.ds_dx(x, lam)
        fd = np.zeros(D)
        for mu in range(D):
            e = np.zeros(D)
            e[mu] = 1e-5
            fd[mu] = (u.invert_lambda(x + e, lam) - u.invert_lambda(x - e, lam)) / 2e-5
        worst = max(worst, float(np.max(np.abs(g - fd))))
    checks.append(_le("ds/dx at fixed lam vs finite differences", worst, 1e-8))
    return checks


def suite_greens(dim: Dimension) -> list[Check]:
    from . import oracle

    checks = []
    for n, tol in ((1, 1e-10), (2, 1e-9), (dim.n, 1e-9)):
        checks.append(_le(f"FP int csch^{2 * n} vs antiderivative", abs(fp_sinh_integral(n) - oracle.sinh_fp_exact(n).value), tol))
    checks.append(_le("C from sinh finite part vs Beta-function route",
                      abs(coefficient_C(dim) / oracle.uniform_coefficient(dim) - 1.0), 1e-10))
    return checks


def suite_potentials(dim: Dimension, count: int = 10) -> list[Check]:
    D = dim.D
    worst = 0.0
    for x, b in uniform_sample(D, count):
        worst = max(worst, _rel(A_generic(x, UniformWorldline(b), dim).A, A_uniform(x, b, dim).A))
    checks = [_le(f"A_generic vs closed form, {count} points", worst, 1e-6)]
    x, b = uniform_sample(D, 1, seed=7)[0]
    checks.append(_le("a-shift oracle vs closed form", _rel(A_ashift_oracle(x, UniformWorldline(b), dim).A,
                                                            A_uniform(x, b, dim).A), 1e-4))
    w = HyperbolicWorldline(1.0, 1, D)
    xh = hyperbolic_sample(D, 1)[0]
    g, o = A_generic(xh, w, dim), A_ashift_oracle(xh, w, dim)
    checks.append(_le("hyperbolic A_generic vs a-shift oracle (over combined error budget)",
                      float(np.max(np.abs(g.A - o.A))) / (g.est_error + o.est_error), 1.0))
    return checks


def suite_fields(dim: Dimension) -> list[Check]:
    D = dim.D
    checks = []
    pref = measure_field_prefactor(dim)
    checks.append(_le("field prefactor K/C = 2n", abs(pref["measured_K_over_C"] - 2 * dim.n), 1e-6))
    worst = 0.0
    for x, b in uniform_sample(D, 5, seed=11):
        Fn = F_numeric(x, lambda y, b=b: A_uniform(y, b, dim), dim, h=1e-3, richardson=True)
        worst = max(worst, _rel(Fn.F, F_uniform(x, b, dim).F))
    checks.append(_le("F_numeric(A_uniform) vs closed form", worst, 1e-6))

    b = np.zeros(D)
    b[0] = 1.0
    x = np.zeros(D)
    x[0], x[1] = 2.0, 1.0
    A_eval = lambda y: A_uniform(y, b, dim)  # noqa: E731
    lorenz, _ = residuals(x, A_eval, dim, h=1e-3)
    checks.append(_le("Lorenz residual (static)", abs(lorenz), 1e-6))
    bb = boost(b, 0.8, 2)
    x2 = x.copy()
    x2[2] = 0.7
    lorenz, _ = residuals(x2, lambda y: A_uniform(y, bb, dim), dim, h=1e-3)
    checks.append(_le("Lorenz residual (moving)", abs(lorenz), 1e-6))
    steps = [4e-2, 2e-2, 1e-2]
    waves = [float(np.max(np.abs(residuals(x, A_eval, dim, h=h)[1]))) for h in steps]
    order = convergence_order(waves, steps)
    checks.append(_le("wave residual convergence order within 2 +- 0.3", abs(order - 2.0), 0.3))

    worst = 0.0
    for eta in (0.5, 1.0, 1.5):
        L = boost_matrix(eta, 1, D)
        xr = np.zeros(D)
        xr[:3] = [0.3, 1.1, -0.6]
        moved = F_uniform(L @ xr, L @ b, dim)
        boosted = lorentz_transform_field(L, F_uniform(xr, b, dim))
        worst = max(worst, _rel(moved.F, boosted.F))
    checks.append(_le("boosted static field = moving-charge field", worst, 1e-5))
    return checks


def suite_gauge(dim: Dimension) -> list[Check]:
    D = dim.D
    checks = []
    signs, worst, exclusive = set(), 0.0, True
    pts = [(UniformWorldline(b), x) for x, b in uniform_sample(D, 3, seed=5)]
    pts += [(HyperbolicWorldline(1.0, 1, D), x) for x in hyperbolic_sample(D, 3, seed=5)]
    for w, x in pts:
        for lam in (0.0, 0.7, 5.0):
            terms = identity_terms(x, w, lam, dim)
            sign, only = choose_sign(terms)
            signs.add(sign)
            exclusive &= only
            worst = max(worst, terms.residual(sign) / terms.scale)
    chosen = signs.pop() if len(signs) == 1 else "inconsistent"
    checks.append(Check("identity: one sign wins everywhere", chosen, "constant", chosen != "inconsistent" and exclusive))
    checks.append(_le("identity residual of the winning sign / scale", worst, 1e-6))

    reports = []
    worst_cons, min_gap = 0.0, math.inf
    for x, b in uniform_sample(D, 3, seed=9):
        r = gauge_gap(x, UniformWorldline(b), dim)
        reports.append(r)
        worst_cons = max(worst_cons, r.consistency)
        min_gap = min(min_gap, r.gap_rel)
    checks.append(_le("gap = integrated correction term", worst_cons, 1e-3))
    checks.append(Check("gap_rel > 0.1 everywhere sampled", min_gap, "> 0.1", min_gap > 0.1))
    checks.append(Check("chosen_sign", reports[0].chosen_sign, "plus|minus", reports[0].sign_exclusive))

    x, b = uniform_sample(D, 1, seed=13)[0]
    w = UniformWorldline(b)
    h = 1e-3 * (1.0 + float(np.max(np.abs(x))))
    F_pure = F_numeric(x, lambda y: grad_chi(y, w, dim, estimate_error=False).value, dim, h=h).max_abs()
    F_true = F_numeric(x, lambda y: A_generic(y, w, dim), dim, h=h).max_abs()
    checks.append(Check("F(grad chi) <= 1e2 h^2", F_pure, 1e2 * h * h, F_pure <= 1e2 * h * h))
    checks.append(Check("F(A) / F(grad chi) >= 1e3", F_true / max(F_pure, np.finfo(float).tiny), 1e3,
                        F_true >= 1e3 * F_pure))
    return checks


_SUITE_FUNCS = {
    "geometry": suite_geometry, "worldline": suite_worldline, "greens": suite_greens,
    "potentials": suite_potentials, "fields": suite_fields, "gauge": suite_gauge,
}


def run(suite: str, dim: Dimension) -> dict:
    if suite != "all" and suite not in _SUITE_FUNCS:
        raise KeyError(suite)
    names = SUITES if suite == "all" else (suite,)
    report = {"dim": dim.D, "n": dim.n, "suites": {}}
    ok = True
    for name in names:
        checks = _SUITE_FUNCS[name](dim)
        report["suites"][name] = [asdict(c) for c in checks]
        ok &= all(c.passed for c in checks)
    report["passed"] = bool(ok)
    report["failed"] = [f"{s}: {c['name']}" for s, cs in report["suites"].items() for c in cs if not c["passed"]]
    return report


__all__ = ["Check", "SUITES", "run", "uniform_sample", "hyperbolic_sample", "QuadratureSpec"]
