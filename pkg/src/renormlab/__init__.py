"""Renormalization fixed points of unimodal maps with real criticality.

Modules:

- :mod:`~renormlab.funcspace`: Chebyshev series and unimodal maps ``|E|^ell``
- :mod:`~renormlab.combinatorics`: order types of periodic critical orbits
- :mod:`~renormlab.renorm`: the fixed-point solver and ell-sweeps
- :mod:`~renormlab.limit`: large-ell structure and extrapolation
- :mod:`~renormlab.complexdyn`: dynamics of ``exp(-c (z - a)^-2)``
"""

from .combinatorics import OrderType, PERIOD_DOUBLING, critical_orbit_type, order_type_of, validate_admissible
from .errors import RenormError
from .funcspace import SeriesMap, UnimodalMap, eval_H, eval_series, fit_series, invert_monotone, schwarzian
from .renorm import FixedPointSolution, SweepTable, renormalize, residual_sup, solve_fixed_point, sweep

__version__ = "0.1.0"
