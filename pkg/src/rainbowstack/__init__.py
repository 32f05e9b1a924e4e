"""Rainbow stackings of edge-colorings of complete graphs."""

from .errors import CapabilityError, InputError
from .perms import Edge, Perm, cycle_stats, edge_index, weight_report
from .colorings import EdgeColoring, pullback, random_coloring, random_colorings, round_robin_coloring
from .stacking import (
    SearchBudget, SearchOutcome, SearchStatus, StackingInstance,
    count_rainbow_stackings, find_rainbow_stacking, first_moment,
    is_rainbow_stacking, threshold_formulas,
)

__version__ = "0.1.0"
