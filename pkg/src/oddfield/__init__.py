"""Retarded potentials and field tensors of point charges in odd-dimensional Minkowski space."""
from .errors import (ContractError, DimensionError, LightconeDegeneracyError, NoRetardedRootError,
                     OddFieldError, QuadratureError, WorldlineError)
from .fields import FieldTensor, F_numeric, F_uniform, measure_field_prefactor, residuals
from .gauge import GaugeReport, chi, gauge_gap, grad_chi, identity_residual
from .greens import QuadratureSpec, coefficient_C, fp_integral, fp_sinh_integral
from .potentials import PotentialSample, A_ashift_oracle, A_generic, A_uniform
from .spacetime import Dimension, boost, boost_matrix, classify, dot, metric, unit_sphere_area, vector
from .worldline import HyperbolicWorldline, UniformWorldline, Worldline, make_worldline

__version__ = "0.1.0"

__all__ = [
    "ContractError", "DimensionError", "LightconeDegeneracyError", "NoRetardedRootError", "OddFieldError",
    "QuadratureError", "WorldlineError", "FieldTensor", "F_numeric", "F_uniform", "measure_field_prefactor",
    "residuals", "GaugeReport", "chi", "gauge_gap", "grad_chi", "identity_residual", "QuadratureSpec",
    "coefficient_C", "fp_integral", "fp_sinh_integral", "PotentialSample", "A_ashift_oracle", "A_generic",
    "A_uniform", "Dimension", "boost", "boost_matrix", "classify", "dot", "metric", "unit_sphere_area",
    "vector", "HyperbolicWorldline", "UniformWorldline", "Worldline", "make_worldline",
]
