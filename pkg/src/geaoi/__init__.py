"""Age of information for blocking servers with Gilbert-Elliot service or sampling."""

from .analytic import (
    AgeBreakdown,
    GEArrivalScenario,
    GEServiceScenario,
    age,
    age_ge_arrival,
    age_ge_service,
    age_on_line,
    age_single_state,
    exp_moments,
)
from .chain import (
    CostModel,
    State,
    StationaryDist,
    TransitionMatrix,
    average_cost,
    next_state,
    stationary_distribution,
)
from .errors import InfeasibleBudgetError, ValidationError
from .simulate import (
    SimConfig,
    SimResult,
    get_backend,
    set_backend,
    simulate_area_paper_partition,
    simulate_cycles,
    trajectory,
)

__version__ = "0.1.0"
