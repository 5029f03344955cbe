"""Exact crank counts, their sech^2 asymptotics, and a numerical circle method."""
from .config import RunConfig, get_config, set_config
from .exact_core import (
    BivariateSeries, CacheError, CrankTable, EnumerationTooLarge, LaurentPoly, Partition,
    SeriesCache, TruncationLimitError, crank, crank_census, expand_C, expand_C_lerch,
    M_exact, p, p_colored, partitions_of,
)
from .special_functions import DomainError, bessel_I, eta, euler_integral, incomplete_gamma, theta
from .asymptotics import AsymptoticParams, OutOfRangeWarning, main_term, pk_asymptotic, ratio_table
from .circle_method import (
    CirclePoint, ContourSpec, SingularityError, C_mk_integral, C_mk_series, G1, G2, I_ell,
    P_sk, cauchy_coefficient, contour_bessel, g_eval, minor_arc_bound_check, wright_split,
)

__version__ = "0.1.0"
