"""Exact total variation distances for the shelf shuffler.

The shelf shuffle measure on permutations of ``n`` cards is summarised by the
number of valleys of the resulting permutation, so every distance in this
package is computed from valley-count distributions in exact rational
arithmetic.
"""

from shelfmix.errors import BoundExceeded, InvariantViolation, ShelfmixError
from shelfmix.permstat import count_valleys, uniform_moments, valley_table
from shelfmix.shelfmeasure import q_table, q_value, tilt_bounds
from shelfmix.tvmetrics import mixing_time, tv_asymptotic, tv_exact

__version__ = "0.1.0"

__all__ = [
    "BoundExceeded",
    "InvariantViolation",
    "ShelfmixError",
    "count_valleys",
    "mixing_time",
    "q_table",
    "q_value",
    "tilt_bounds",
    "tv_asymptotic",
    "tv_exact",
    "uniform_moments",
    "valley_table",
]
