"""Request/response models of the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..config import ScenarioConfig
from ..harness import CampaignSummary, RunReport, SweepPoint


class HealthResponse(BaseModel):
    status: str = "ok"
    version: str


class SolveRequest(BaseModel):
    config: ScenarioConfig = Field(default_factory=ScenarioConfig)
    iteration: int = Field(default=0, ge=0)


class SolveResponse(BaseModel):
    reports: list[RunReport]


class CampaignRequest(BaseModel):
    config: ScenarioConfig = Field(default_factory=ScenarioConfig)


class CampaignResponse(BaseModel):
    reports: list[RunReport]
    summary: CampaignSummary


class SweepRequest(BaseModel):
    config: ScenarioConfig = Field(default_factory=ScenarioConfig)
    lengths: list[float] = Field(min_length=1)


class SweepResponse(BaseModel):
    points: list[SweepPoint]
