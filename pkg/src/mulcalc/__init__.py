"""Multiplicative *derivatives, line *integrals and complex *integrals."""
from .contour import MultiValueIntegral, complex_star_integral, track_log
from .curves import Curve, circle, curve_from_spec, line
from .derivative import check_cr, check_cr_polar, star_derivative, star_derivative_n
from .errors import MulcalcError
from .expr import evaluate, parse

__version__ = "0.1.0"
