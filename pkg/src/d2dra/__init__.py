"""Resource-block allocation for cellular uplink with relay-aided D2D underlay.

Core pieces: topology/channel model (`channel`), allocation scoring
(`allocation`), the genetic algorithm (`ga`), baseline solvers
(`baselines`) and the Monte Carlo experiment harness (`harness`). An
HTTP service lives in `d2dra.service`; `d2dra.cli` is a thin client.
"""

__version__ = "0.1.0"

from .allocation import Allocation, RateReport, evaluate, shannon_rate
from .baselines import run_exhaustive, run_heuristic, run_random, search_space_size
from .channel import (
    Position,
    RadioParams,
    Topology,
    build_topology,
    generate_topology,
    link_gain,
    noise_power_mw,
    path_loss_db,
    radio_params,
)
from .config import ConfigError, GaConfig, ScenarioConfig
from .ga import ConvergenceTrace, Individual, run_ga
from .harness import (
    CampaignSummary,
    RunReport,
    export,
    run_campaign,
    summarize,
    sweep_link_length,
)

__all__ = [
    "__version__",
    "Allocation",
    "CampaignSummary",
    "ConfigError",
    "ConvergenceTrace",
    "GaConfig",
    "Individual",
    "Position",
    "RadioParams",
    "RateReport",
    "RunReport",
    "ScenarioConfig",
    "Topology",
    "build_topology",
    "evaluate",
    "export",
    "generate_topology",
    "link_gain",
    "noise_power_mw",
    "path_loss_db",
    "radio_params",
    "run_campaign",
    "run_exhaustive",
    "run_ga",
    "run_heuristic",
    "run_random",
    "search_space_size",
    "shannon_rate",
    "summarize",
    "sweep_link_length",
]
