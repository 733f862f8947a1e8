"""qphi: convergence analysis of basic hypergeometric series on |q| = 1.

The series' base is q = e^(2*pi*i*theta) with theta irrational; whether the
power series in z converges anywhere hinges on how well theta is approximated
by rationals.  This package evaluates q-Pochhammer magnitudes along exact
phase orbits, predicts the radius of convergence from the parameter moduli,
estimates it empirically by root tests, classifies theta diophantically, and
exhibits the Liouville-type bases whose radius collapses to zero.
"""

from ._kernels import BACKEND
from .exactnum import (AffineAngle, AngleSpec, BoundedReal, LiouvilleAngle,
                       QuadraticSurd, SurdAngle, eval_angle, frac_multiple,
                       dist_to_nearest_integer, parse_angle)
from .qpoch import (ComplexParam, PolarParam, RootTestPoint, UnitComboParam,
                    classify_limit, combo, log_abs_one_minus,
                    log_abs_qpochhammer, param_from_text, polar,
                    root_test_sequence)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    "AngleSpec",
    "SurdAngle",
    "AffineAngle",
    "LiouvilleAngle",
    "QuadraticSurd",
    "BoundedReal",
    "parse_angle",
    "eval_angle",
    "frac_multiple",
    "dist_to_nearest_integer",
    "ComplexParam",
    "PolarParam",
    "UnitComboParam",
    "polar",
    "combo",
    "param_from_text",
    "RootTestPoint",
    "log_abs_one_minus",
    "log_abs_qpochhammer",
    "root_test_sequence",
    "classify_limit",
]
