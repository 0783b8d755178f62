"""End-to-end acceptance runs.  Each test prints one PASS/FAIL line."""
import json

import numpy as np
import sympy as sp

from oddfield import oracle
from oddfield.cli import main
from oddfield.fields import F_numeric, convergence_order, default_step, lorentz_transform_field, measure_field_prefactor, residuals
from oddfield.gauge import choose_sign, gauge_gap, grad_chi, identity_terms
from oddfield.greens import coefficient_C, fp_sinh_integral
from oddfield.potentials import A_ashift_oracle, A_generic, A_uniform
from oddfield.spacetime import Dimension, boost, boost_matrix, dot
from oddfield.verify import hyperbolic_sample, uniform_sample
from oddfield.worldline import HyperbolicWorldline, UniformWorldline, uniform_lambda_inversion


def rel(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))) / np.max(np.abs(b)))


def coth_pole_subtraction():
    """FP int_{-inf}^0 csch^2 = lim_{eps->0} ([-coth]_{-inf}^{-eps} - 1/eps)."""
    eps = sp.symbols("epsilon")
    coth = sp.cosh(eps) / sp.sinh(eps)  # sympy's limit mishandles coth itself
    bracket = coth - 1  # -coth(-eps) + coth(-inf)
    return float(sp.limit(bracket - 1 / eps, eps, 0, "+"))


def test_criterion_1_finite_part_constant(acceptance_line):
    err1 = abs(fp_sinh_integral(1) - coth_pole_subtraction())
    err2 = abs(fp_sinh_integral(2) - oracle.sinh_fp_exact(2).value)
    ok = err1 <= 1e-10 and err2 <= 1e-9
    acceptance_line(1, ok, f"|FP1 - (-coth oracle)| = {err1:.2e} (tol 1e-10), |FP2 - antiderivative| = {err2:.2e} (tol 1e-9)")
    assert ok


def test_criterion_2_closed_form_vs_quadrature(acceptance_line):
    worst_g = worst_o = 0.0
    for D in (5, 7):
        dim = Dimension(D)
        for x, b in uniform_sample(D, 20, seed=100 + D):
            w = UniformWorldline(b)
            exact = A_uniform(x, b, dim).A
            worst_g = max(worst_g, rel(A_generic(x, w, dim).A, exact))
            worst_o = max(worst_o, rel(A_ashift_oracle(x, w, dim).A, exact))
    ok = worst_g <= 1e-6 and worst_o <= 1e-4
    acceptance_line(2, ok, f"max rel A_generic = {worst_g:.2e} (tol 1e-6), A_ashift = {worst_o:.2e} (tol 1e-4); 20 points, D=5,7")
    assert ok


def grid(D, t=1.0):
    pts = []
    for x1 in (-1.5, 0.0, 1.5):
        for x2 in (-1.5, 0.0, 1.5):
            p = np.zeros(D)
            p[0], p[1], p[2] = t, x1, x2
            pts.append(p)
    return pts


def test_criterion_3_fields_nonzero(acceptance_line):
    details, ok = [], True
    for D in (5, 7):
        dim = Dimension(D)
        b = boost(np.eye(D)[0], 0.5, 1)
        w = UniformWorldline(b)
        F_max, ratio_min = 0.0, np.inf
        for x in grid(D):
            # the x ∝ b ray: r^2 = 0 would put the point on the worldline
            if dot(b, x) ** 2 + dot(x, x) < 0.25:
                continue
            h = default_step(x)
            F_A = F_numeric(x, lambda y: A_generic(y, w, dim), dim, h=h).max_abs()
            F_g = F_numeric(x, lambda y: grad_chi(y, w, dim, estimate_error=False).value, dim, h=h).max_abs()
            F_max = max(F_max, F_A)
            ratio_min = min(ratio_min, F_A / max(F_g, np.finfo(float).tiny))
        ok = ok and F_max > 0 and ratio_min >= 1e3
        details.append(f"D={D}: max|F| = {F_max:.3e}, min F(A)/F(grad chi) = {ratio_min:.2e}")
    acceptance_line(3, ok, "; ".join(details) + " (need > 0 and >= 1e3)")
    assert ok


def test_criterion_4_identity_sign(acceptance_line):
    cases = []
    dim = Dimension(5)
    for x, b in uniform_sample(5, 5, seed=7):
        w = UniformWorldline(b)
        for lam in (0.0, 0.7, 4.0):
            cases.append((x, w, lam))
    hw = HyperbolicWorldline(1.0, 1, 5)
    for x in hyperbolic_sample(5, 5, seed=9):
        for lam in (0.0, 0.7, 4.0):
            cases.append((x, hw, lam))
    assert len(cases) == 30
    winners, exclusive, worst = set(), True, 0.0
    for x, w, lam in cases:
        terms = identity_terms(x, w, lam, dim)
        sign, only = choose_sign(terms, 1e-6)
        winners.add(sign)
        exclusive = exclusive and only
        worst = max(worst, terms.residual(sign) / terms.scale)
    ok = exclusive and len(winners) == 1
    acceptance_line(4, ok, f"winning sign = {sorted(winners)}, exclusive at all 30 points = {exclusive}, "
                           f"max residual/scale = {worst:.2e} (tol 1e-6)")
    assert ok


def test_criterion_5_gap_consistency(acceptance_line):
    worst_c, min_gap = 0.0, np.inf
    for D in (5, 7):
        dim = Dimension(D)
        for x, b in uniform_sample(D, 5, seed=200 + D):
            r = gauge_gap(x, UniformWorldline(b), dim)
            worst_c = max(worst_c, r.consistency)
            min_gap = min(min_gap, r.gap_rel)
    ok = worst_c <= 1e-3 and min_gap > 0.1
    acceptance_line(5, ok, f"max rel |gap - correction| = {worst_c:.2e} (tol 1e-3), min gap_rel = {min_gap:.3f} (need > 0.1)")
    assert ok


def test_criterion_6_covariance(acceptance_line):
    dim = Dimension(5)
    static = UniformWorldline(np.eye(5)[0])
    points = [np.array([0.3, 1.0, 0.5, -0.2, 0.4]), np.array([-0.5, 0.6, -1.1, 0.3, 0.0])]
    worst = 0.0
    for eta, axis in ((0.5, 1), (1.0, 2), (1.5, 3)):
        L = boost_matrix(eta, axis, 5)
        moving = UniformWorldline(L @ static.b)
        for x in points:
            h = default_step(x)
            F_rest = F_numeric(x, lambda y: A_generic(y, static, dim), dim, h=h, richardson=True)
            xb = L @ x
            F_move = F_numeric(xb, lambda y: A_generic(y, moving, dim), dim, h=default_step(xb), richardson=True)
            worst = max(worst, rel(lorentz_transform_field(L, F_rest).F, F_move.F))
    ok = worst <= 1e-5
    acceptance_line(6, ok, f"max rel |L F L^T - F_moving| = {worst:.2e} (tol 1e-5), rapidity <= 1.5, D=5")
    assert ok


def test_criterion_7_pde_residuals(acceptance_line):
    dim = Dimension(5)
    b = boost(np.eye(5)[0], 0.6, 2)
    hw = HyperbolicWorldline(1.0, 1, 5)
    evaluators = {
        "uniform": (np.array([0.4, 1.1, -0.3, 0.5, 0.2]), lambda y: A_generic(y, UniformWorldline(b), dim)),
        "hyperbolic": (np.array([0.5, 2.0, 0.3, 0.0, 0.0]), lambda y: A_generic(y, hw, dim)),
    }
    steps = [4e-2, 2e-2, 1e-2]
    lorenz_worst, orders = 0.0, {}
    for name, (x, A_eval) in evaluators.items():
        scale = float(np.max(np.abs(A_eval(x).A)))
        lorenz, _ = residuals(x, A_eval, dim, h=default_step(x))
        lorenz_worst = max(lorenz_worst, abs(lorenz) / scale)
        waves = [float(np.max(np.abs(residuals(x, A_eval, dim, h=h)[1]))) for h in steps]
        orders[name] = convergence_order(waves, steps)
    ok = lorenz_worst <= 1e-6 and all(abs(p - 2.0) <= 0.3 for p in orders.values())
    desc = ", ".join(f"{k} {v:.3f}" for k, v in orders.items())
    acceptance_line(7, ok, f"Lorenz residual / |A| = {lorenz_worst:.2e} (tol 1e-6); wave order {desc} (need 2 +- 0.3)")
    assert ok


def test_criterion_8_field_prefactor(acceptance_line, capsys):
    measured = {}
    for D in (5, 7, 9):
        dim = Dimension(D)
        m = measure_field_prefactor(dim)
        measured[D] = m
    distinguishing = [m for m in measured.values() if m["distinguishable"]]
    ok = all(m["confirmed"] == "2n" for m in distinguishing) and all(
        abs(m["K"] - 2 * Dimension(D).n * coefficient_C(Dimension(D))) <= 1e-8 * m["K"] for D, m in measured.items())
    capsys.readouterr()
    code = main(["constant", "--dim", "7"])
    printed = json.loads(capsys.readouterr().out)["field_prefactor"]["confirmed"]
    ok = ok and code == 0 and printed == "2n"
    ratios = ", ".join(f"D={D}: K/C = {m['measured_K_over_C']:.9f}" for D, m in measured.items())
    acceptance_line(8, ok, f"{ratios}; confirmed 2n*C, cmd_constant prints {printed!r}")
    assert ok


def test_criterion_9_radical_sign(acceptance_line):
    worst = {+1: 0.0, -1: 0.0}
    for x, b in uniform_sample(5, 10, seed=11):
        for lam in (0.0, 0.3, 2.0, 15.0):
            for sign in (+1, -1):
                s = uniform_lambda_inversion(b, x, lam, radical_sign=sign)
                if not np.isfinite(s):
                    worst[sign] = np.inf
                    continue
                R = x - b * s
                worst[sign] = max(worst[sign], abs(-dot(R, R) - lam) / max(1.0, lam))
    ok = worst[+1] <= 1e-10 and worst[-1] > 1e-10
    acceptance_line(9, ok, f"round trip +lam = {worst[+1]:.2e} (tol 1e-10), -lam = {worst[-1]:.2e} (must fail); +lam confirmed")
    assert ok
