import math

import numpy as np
import pytest

from oddfield import oracle
from oddfield.errors import ContractError
from oddfield.spacetime import Dimension, boost
from oddfield.worldline import HyperbolicWorldline, UniformWorldline

B0 = np.array([1.0, 0, 0, 0, 0])
X0 = np.array([2.0, 1.0, 0, 0, 0])
DIM5 = Dimension(5)


def test_bisect_root_examples():
    assert oracle.bisect_root(lambda s: s - 1.0, 0.0, 2.0, 1e-14) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ContractError):
        oracle.bisect_root(lambda s: s - 1.0, 0.0, 2.0, 0.0)
    with pytest.raises(ContractError):
        oracle.bisect_root(lambda s: s * s + 1, -1.0, 1.0, 1e-10)


def test_light_cone_crossing_shifted():
    w = UniformWorldline(B0)
    for a in (0.1, 0.5):
        s = oracle.light_cone_crossing(w, X0, a)
        R = X0 - B0 * s
        assert abs(-(-(R[0] ** 2) + R[1] ** 2) + a) <= 1e-12
        assert s == pytest.approx(2.0 - math.sqrt(1.0 - a), abs=1e-14)


def test_direct_s_integral_static_closed_form():
    """Static charge: I(a) - I(a') = -1/2 ln((r^2-a)/(r^2-a')) in the time component."""
    w = UniformWorldline(B0)
    split = oracle.default_split(w, X0)
    vals = {a: oracle.direct_s_integral(X0, w, DIM5, a, s_split=split) for a in (0.2, 0.5)}
    diff = vals[0.5].value - vals[0.2].value
    assert diff[0] == pytest.approx(-0.5 * math.log(0.5 / 0.8), abs=1e-10)
    assert np.all(np.abs(diff[1:]) <= 1e-14)
    assert vals[0.5].est_error >= 0


def test_direct_s_integral_smooth_in_a():
    w = UniformWorldline(boost(B0, 0.4, 1))
    x = np.array([1.0, 0.3, 1.2, 0, 0])
    split = oracle.default_split(w, x)
    a = [0.05, 0.1, 0.2, 0.4]
    vals = np.array([oracle.direct_s_integral(x, w, DIM5, ai, s_split=split).value[0] for ai in a])
    second = np.diff(vals, 2)
    assert np.all(np.abs(second) < 0.1)  # no jumps


def test_shifted_table_agrees_with_adaptive():
    w = HyperbolicWorldline(1.0, 1, 5)
    x = np.array([0.5, 2.0, 0.3, 0, 0])
    split = oracle.default_split(w, x)
    table = oracle.shifted_integral_table(x, w, DIM5, [0.3, 0.1], panels=8, s_split=split)
    adaptive = [oracle.direct_s_integral(x, w, DIM5, a, s_split=split).value for a in (0.3, 0.1)]
    assert np.allclose(table, adaptive, atol=1e-10)


def test_fornberg_weights():
    assert np.allclose(oracle.fornberg_weights([-1, 0, 1], 2), [1, -2, 1])
    assert np.allclose(oracle.fornberg_weights([-1, 0, 1], 1), [-0.5, 0, 0.5])


def test_shift_derivative_analytic_integrand():
    """I(a) = (r^2 + a)^(-1/2): first derivative -1/2 r^-3."""
    r = 1.5
    a = 0.1 * 0.7 ** np.arange(9)
    d, err = oracle.shift_derivative(a, (r * r + a) ** -0.5, 1)
    assert d == pytest.approx(-0.5 * r**-3, rel=1e-9)
    assert err < 1e-6


def test_shift_derivative_rejects_short_stencil():
    with pytest.raises(ContractError):
        oracle.shift_derivative([0.1, 0.05], [1.0, 2.0], 1)


def test_sinh_fp_exact_values():
    assert oracle.sinh_fp_exact(1).value == -1.0
    assert oracle.sinh_fp_exact(2).value == pytest.approx(2 / 3, abs=1e-15)


def test_uniform_chi_closed_form_d5():
    # D = 5: chi = e pi / (4 Omega r) = 1/(8 pi r) with Omega = 2 pi^2
    assert oracle.uniform_chi(X0, B0, DIM5) == pytest.approx(1 / (8 * math.pi), rel=1e-14)


def test_oracle_result_validates():
    with pytest.raises(ContractError):
        oracle.OracleResult(1.0, -1.0, "x")
