"""HTTP service wrapping the simulator.

Stateless: every request carries a full ScenarioConfig and the response
is a pure function of it (wall-clock timings aside). Run with e.g.

    uvicorn d2dra.service.app:app
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..config import ConfigError, ScenarioConfig
from ..harness import run_campaign, run_single_iteration, summarize, sweep_link_length
from .schemas import (
    CampaignRequest,
    CampaignResponse,
    HealthResponse,
    SolveRequest,
    SolveResponse,
    SweepRequest,
    SweepResponse,
)

app = FastAPI(
    title="d2dra",
    version=__version__,
    description=(
        "Sum-rate optimization for joint cellular and relay-aided D2D "
        "uplink resource-block allocation: genetic algorithm, greedy "
        "heuristic, random baseline and exhaustive oracle, with Monte "
        "Carlo campaign statistics."
    ),
)


@app.exception_handler(ConfigError)
async def _config_error(request: Request, exc: ConfigError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(version=__version__)


@app.get("/config/default", response_model=ScenarioConfig)
def default_config() -> ScenarioConfig:
    """The built-in scenario defaults, ready to edit and post back."""
    return ScenarioConfig()


@app.post("/solve", response_model=SolveResponse)
def solve(request: SolveRequest) -> SolveResponse:
    """Run every configured solver on one Monte Carlo iteration's topology."""
    return SolveResponse(reports=run_single_iteration(request.config, request.iteration))


@app.post("/campaign", response_model=CampaignResponse)
def campaign(request: CampaignRequest) -> CampaignResponse:
    """Full Monte Carlo campaign plus summary statistics."""
    reports = run_campaign(request.config)
    return CampaignResponse(reports=reports, summary=summarize(reports))


@app.post("/sweep", response_model=SweepResponse)
def sweep(request: SweepRequest) -> SweepResponse:
    """Per-solver mean sum-rate at each fixed D2D link length."""
    return SweepResponse(points=sweep_link_length(request.config, request.lengths))
