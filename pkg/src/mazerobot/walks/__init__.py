"""Exact and asymptotic analytics for lattice random walks."""
from .dp import (MODES, DistributionGrid, GridTooLarge, dp_step_distribution, first_return_cdf,
                 first_return_probabilities, full_law, origin_return_series)
from .gridfmt import GridFormatError
from .gridfmt import dumps as dump_grid
from .gridfmt import loads as load_grid
from .mixture import mixture_distribution
from .recurrence import (DEGENERATE, RECURRENT, TRANSIENT, RecurrenceReport, classify_recurrence,
                         fit_decay_exponent)
from .spec import MixtureSpec, WalkSpec, mixed_walk
from .z3 import (max_multinomial, max_multinomial_parts, shifted_bound_check, shifted_bound_terms,
                 stirling_asymptotic, z3_first_return_cdf, z3_origin_return_exact,
                 z3_point_probability_exact, z3_return_numerators, z3_return_partial_sum,
                 z3_upper_bound)

__all__ = [
    "MODES", "DistributionGrid", "GridTooLarge", "dp_step_distribution", "first_return_cdf",
    "first_return_probabilities", "full_law", "origin_return_series", "GridFormatError",
    "dump_grid", "load_grid", "mixture_distribution", "DEGENERATE", "RECURRENT", "TRANSIENT",
    "RecurrenceReport", "classify_recurrence", "fit_decay_exponent", "MixtureSpec", "WalkSpec",
    "mixed_walk", "max_multinomial", "max_multinomial_parts", "shifted_bound_check",
    "shifted_bound_terms", "stirling_asymptotic", "z3_first_return_cdf", "z3_origin_return_exact",
    "z3_point_probability_exact", "z3_return_numerators", "z3_return_partial_sum", "z3_upper_bound",
]
