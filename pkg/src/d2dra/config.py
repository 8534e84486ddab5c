"""Scenario and solver configuration models.

A ScenarioConfig fully determines a simulation campaign: geometry, radio
parameters, solver list, GA hyper-parameters, Monte Carlo size and master
seed. Everything is validated on construction so that file- and
API-supplied configs fail early with field-level messages.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ConfigError(ValueError):
    """Raised for semantically invalid configuration or impossible geometry."""


SOLVER_TAGS = ("ga", "ga_op", "ga_tp", "heuristic", "random", "exhaustive")

GA_SOLVER_TAGS = ("ga", "ga_op", "ga_tp")


class GaConfig(BaseModel):
    """Genetic algorithm hyper-parameters.

    ``penalty_mode`` selects how per-link minimum-rate violations enter the
    fitness: ``shortfall`` subtracts weight * (threshold - rate) for links
    below the threshold (the default), ``excess`` applies the weight to the
    amount by which a link exceeds the threshold instead (kept selectable
    for comparison; it rewards infeasibility and is not useful in practice).
    """

    model_config = ConfigDict(extra="forbid")

    population_size: int = Field(default=100, ge=2)
    max_generations: int = Field(default=1000, ge=1)
    stall_window: int = Field(default=100, ge=1)
    crossover_kind: Literal["op", "tp"] = "tp"
    crossover_prob: float = Field(default=0.9, ge=0.0, le=1.0)
    mutation_prob: float = Field(default=0.005, ge=0.0, le=1.0)
    elite_count: int = Field(default=5, ge=0)
    penalty_weight_cue: float = Field(default=2.0, ge=0.0)
    penalty_weight_due: float = Field(default=2.0, ge=0.0)
    penalty_mode: Literal["shortfall", "excess"] = "shortfall"

    @model_validator(mode="after")
    def _check_elites(self):
        if self.elite_count >= self.population_size:
            raise ValueError("elite_count must be smaller than population_size")
        return self


class ScenarioConfig(BaseModel):
    """Complete description of one simulation scenario.

    Defaults correspond to the standard single-cell setup: 250 m macro
    cell, D2D link length uniform in [20, 150] m, 30 cellular users,
    50 D2D pairs, 50 relays, 50 resource blocks of 180 kHz (10 MHz
    system bandwidth), 20 dBm fixed transmit power and -174 dBm/Hz noise
    power spectral density.
    """

    model_config = ConfigDict(extra="forbid")

    cell_radius_m: float = Field(default=250.0, gt=0.0)
    d2d_length_range_m: tuple[float, float] = (20.0, 150.0)
    d2d_fixed_length_m: Optional[float] = Field(default=None, gt=0.0)
    n_cues: int = Field(default=30, ge=0)
    n_pairs: int = Field(default=50, ge=0)
    n_relays: int = Field(default=50, ge=0)
    n_rbs: int = Field(default=50, ge=1)
    rb_bandwidth_hz: float = Field(default=180e3, gt=0.0)
    tx_power_dbm: float = 20.0
    noise_psd_dbm_hz: float = -174.0
    rate_threshold_bps: float = Field(default=180e3, ge=0.0)
    mcl_db: float = Field(default=70.0, ge=0.0)
    relay_placement: Literal["uniform", "near_pair"] = "uniform"
    near_pair_radius_m: float = Field(default=30.0, gt=0.0)
    relay_candidate_count: Optional[int] = Field(default=None, ge=1)
    ga: GaConfig = Field(default_factory=GaConfig)
    n_monte_carlo: int = Field(default=100, ge=1)
    master_seed: int = Field(default=1, ge=0)
    solvers: list[str] = Field(
        default_factory=lambda: ["ga_tp", "ga_op", "heuristic", "random"],
        min_length=1,
    )

    @model_validator(mode="after")
    def _check_consistency(self):
        lo, hi = self.d2d_length_range_m
        if not 0.0 < lo <= hi:
            raise ValueError("d2d_length_range_m must satisfy 0 < low <= high")
        diameter = 2.0 * self.cell_radius_m
        if hi > diameter:
            raise ValueError(
                f"d2d_length_range_m high end {hi} m exceeds cell diameter {diameter} m"
            )
        if self.d2d_fixed_length_m is not None and self.d2d_fixed_length_m > diameter:
            raise ValueError(
                f"d2d_fixed_length_m {self.d2d_fixed_length_m} m exceeds cell diameter {diameter} m"
            )
        if self.n_cues > self.n_rbs:
            raise ValueError(
                f"n_cues ({self.n_cues}) must not exceed n_rbs ({self.n_rbs}): "
                "cellular users get orthogonal resource blocks"
            )
        if self.relay_placement == "near_pair" and self.n_relays > 0 and self.n_pairs == 0:
            raise ValueError("near_pair relay placement needs at least one D2D pair")
        for tag in self.solvers:
            if tag not in SOLVER_TAGS:
                raise ValueError(f"unknown solver tag {tag!r}; valid: {SOLVER_TAGS}")
        return self
