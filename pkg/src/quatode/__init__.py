"""Second-order linear ODEs with quaternion-valued coefficients and solutions."""
from .analytic import (
    IVP, ConstCoeffEq, GeneralSolution, exp_product_integral, fit_initial_conditions,
    integrate_exp_product, polynomial_particular, reduce_order, variation_of_parameters,
)
from .errors import (
    DependentPair, NearZeroQuaternion, NonFiniteState, NotASolution, QuatODEError,
    ScenarioError,
)
from .operators import LinOp, left_mul, resolve, right_mul
from .quaternion import I, J, K, ONE, ZERO, Quaternion, exp_qx, inverse, parse_quaternion
from .wronskian import FundamentalPair, dieudonne_det_squared, modulus, modulus_squared

__all__ = [
    "IVP", "ConstCoeffEq", "GeneralSolution", "exp_product_integral", "fit_initial_conditions",
    "integrate_exp_product", "polynomial_particular", "reduce_order", "variation_of_parameters",
    "DependentPair", "NearZeroQuaternion", "NonFiniteState", "NotASolution", "QuatODEError",
    "ScenarioError", "LinOp", "left_mul", "resolve", "right_mul",
    "I", "J", "K", "ONE", "ZERO", "Quaternion", "exp_qx", "inverse", "parse_quaternion",
    "FundamentalPair", "dieudonne_det_squared", "modulus", "modulus_squared",
]
