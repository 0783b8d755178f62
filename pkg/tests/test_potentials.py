import numpy as np
import pytest

from oddfield.errors import ContractError, LightconeDegeneracyError, NoRetardedRootError
from oddfield.greens import QuadratureSpec, coefficient_C
from oddfield.potentials import PotentialSample, A_ashift_oracle, A_generic, A_uniform, green_prefactor
from oddfield.spacetime import Dimension, boost, boost_matrix
from oddfield.verify import hyperbolic_sample, uniform_sample
from oddfield.worldline import HyperbolicWorldline, UniformWorldline

B0 = np.array([1.0, 0, 0, 0, 0])
X0 = np.array([2.0, 1.0, 0, 0, 0])
DIM5, DIM7 = Dimension(5), Dimension(7)


def rel(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))) / np.max(np.abs(b)))


def test_uniform_static_scaling():
    near = A_uniform([0.0, 1.0, 0, 0, 0], B0, DIM5).A
    far = A_uniform([0.0, 2.0, 0, 0, 0], B0, DIM5).A
    assert near[0] / far[0] == pytest.approx(4.0, rel=1e-14)
    assert not near[1:].any()


def test_uniform_reference_value():
    # r = 1: A^0 = C = 1/(4 pi^2)
    assert A_uniform(X0, B0, DIM5).A[0] == pytest.approx(coefficient_C(DIM5), rel=1e-15)


def test_uniform_covariance():
    x = np.array([0.4, 1.0, -0.7, 0.3, 0.2])
    b = boost(B0, 0.3, 2)
    L = boost_matrix(1.1, 1, 5)
    assert np.allclose(A_uniform(L @ x, L @ b, DIM5).A, L @ A_uniform(x, b, DIM5).A, rtol=1e-12, atol=1e-16)


def test_uniform_errors():
    with pytest.raises(ContractError):
        A_uniform(X0, [1.0, 0.1, 0, 0, 0], DIM5)
    with pytest.raises(LightconeDegeneracyError):
        A_uniform([3.0, 0, 0, 0, 0], B0, DIM5)


def test_sample_invariants():
    with pytest.raises(ContractError):
        PotentialSample(X0, np.ones(5), "closed", -1.0)
    with pytest.raises(ContractError):
        PotentialSample(X0, np.array([np.nan] * 5), "closed", 0.0)


def test_generic_reference_point_d5():
    g = A_generic(X0, UniformWorldline(B0), DIM5)
    assert rel(g.A, A_uniform(X0, B0, DIM5).A) <= 1e-6
    assert g.method == "fp_quadrature"


@pytest.mark.parametrize("D", [5, 7, 9])
def test_generic_matches_closed_form(D):
    dim = Dimension(D)
    for x, b in uniform_sample(D, 5, seed=D):
        assert rel(A_generic(x, UniformWorldline(b), dim).A, A_uniform(x, b, dim).A) <= 1e-6


def test_generic_covariance():
    dim = DIM5
    x = np.array([0.5, 1.2, -0.3, 0.4, 0.0])
    b = boost(B0, 0.4, 3)
    for eta in (0.5, 1.5):
        L = boost_matrix(eta, 1, 5)
        boosted = A_generic(L @ x, UniformWorldline(L @ b), dim).A
        assert rel(boosted, L @ A_generic(x, UniformWorldline(b), dim).A) <= 1e-5


def test_green_prefactor_sign():
    assert green_prefactor(DIM5) > 0
    assert green_prefactor(DIM7) < 0


def test_generic_rejects_mismatched_dimension():
    with pytest.raises(ContractError):
        A_generic(np.zeros(7), UniformWorldline(B0), DIM7)


def test_generic_behind_horizon():
    with pytest.raises(NoRetardedRootError):
        A_generic([-2.0, 1.0, 0, 0, 0], HyperbolicWorldline(1.0, 1, 5), DIM5)


def test_generic_truncated_tail_is_worse():
    w = UniformWorldline(B0)
    exact = A_uniform(X0, B0, DIM5).A
    truncated = A_generic(X0, w, DIM5, spec=QuadratureSpec(lambda_max=10.0, tail="truncate")).A
    mapped = A_generic(X0, w, DIM5, spec=QuadratureSpec(lambda_max=10.0)).A
    assert rel(mapped, exact) < 1e-10 < rel(truncated, exact)


@pytest.mark.parametrize("D", [5, 7])
def test_ashift_matches_closed_form(D):
    dim = Dimension(D)
    x, b = uniform_sample(D, 1, seed=21)[0]
    o = A_ashift_oracle(x, UniformWorldline(b), dim)
    exact = A_uniform(x, b, dim).A
    assert rel(o.A, exact) <= 1e-4
    assert np.max(np.abs(o.A - exact)) <= o.est_error


@pytest.mark.parametrize("D", [5, 7])
def test_hyperbolic_generic_vs_ashift(D):
    dim = Dimension(D)
    w = HyperbolicWorldline(1.0, 1, D)
    # the oracle's extrapolation noise sits near 1e-9 here, a few times its own estimate
    for x in hyperbolic_sample(D, 3, seed=D):
        g, o = A_generic(x, w, dim), A_ashift_oracle(x, w, dim)
        assert rel(o.A, g.A) <= 1e-6


def test_ashift_rejects_short_stencil():
    with pytest.raises(ContractError):
        A_ashift_oracle(X0, UniformWorldline(B0), DIM5, a_steps=[0.1, 0.05])
    with pytest.raises(ContractError):
        A_ashift_oracle(X0, UniformWorldline(B0), DIM5, a_steps=[0.01, 0.02, 0.03, 0.04])


def test_charge_linearity():
    w = HyperbolicWorldline(1.0, 1, 5)
    x = np.array([0.5, 2.0, 0.3, 0, 0])
    assert np.allclose(A_generic(x, w, DIM5, charge=-2.5).A, -2.5 * A_generic(x, w, DIM5).A, rtol=1e-13)
