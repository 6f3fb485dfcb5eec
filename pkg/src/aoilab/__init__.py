"""AoI versus transmission-cost laboratory for a slotted erasure link."""

from .analytics import (
    AoiPmf,
    MixedThreshold,
    TradeoffPoint,
    aoi_pmf,
    avg_aoi_closed,
    avg_cost_closed,
    lower_bound,
    random_benchmark,
    select_threshold,
)
from .errors import AoiLabError, CapacityError, ConvergenceError, DomainError, NondegeneracyError
from .model import Action, LinkState, NetworkParams
from .policies import PolicyKind, PolicySpec, parse_policy
from .simulator import SimConfig, SimStats, run

__all__ = [
    "Action", "AoiLabError", "AoiPmf", "CapacityError", "ConvergenceError", "DomainError",
    "LinkState", "MixedThreshold", "NetworkParams", "NondegeneracyError", "PolicyKind",
    "PolicySpec", "SimConfig", "SimStats", "TradeoffPoint", "aoi_pmf", "avg_aoi_closed",
    "avg_cost_closed", "lower_bound", "parse_policy", "random_benchmark", "run",
    "select_threshold",
]
