"""Monte Carlo campaigns, statistics and file export.

Each campaign iteration draws one topology and runs every configured
solver on it (paired comparison). Seeds are derived from the master seed
with a splittable scheme so that adding or removing a solver never
changes the topologies or the other solvers' random streams:

    topology rng  <- SeedSequence((master_seed, 0, iteration))
    solver rng    <- SeedSequence((master_seed, 1, iteration, crc32(tag)))

Percentiles use the nearest-rank convention throughout; the empirical
CDF is the right-continuous step function over the sorted samples.
"""

from __future__ import annotations

import csv
import math
import time
import zlib
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from .allocation import to_dbm
from .baselines import run_exhaustive, run_heuristic, run_random
from .channel import Topology, generate_topology, radio_params, relay_candidates
from .config import ConfigError, ScenarioConfig
from .ga import run_ga

_TOPOLOGY_STREAM = 0
_SOLVER_STREAM = 1


class RunReport(BaseModel):
    """Outcome of one solver on one topology."""

    model_config = ConfigDict(ser_json_inf_nan="constants")

    run_id: int
    solver: str
    seed: int
    sum_rate_bps: float
    cue_rates_bps: list[float]
    due_rates_bps: list[float]
    due_interference_dbm: list[float]  # at each pair's receiver; -inf when zero
    feasible: bool
    convergence_generation: Optional[int] = None
    trace_best_fitness: Optional[list[float]] = None
    wall_ms: float = 0.0


class CdfData(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    values: list[float]
    cumulative: list[float]


class SolverSummary(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    n_runs: int
    mean_sum_rate_bps: float
    median_sum_rate_bps: float
    convergence_median: Optional[int] = None
    convergence_p25: Optional[int] = None
    convergence_p75: Optional[int] = None
    interference_p50_dbm: Optional[float] = None
    interference_p90_dbm: Optional[float] = None
    interference_cdf: CdfData


class CampaignSummary(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    solvers: dict[str, SolverSummary]
    # "a_vs_b" -> how much solver a's mean sum-rate exceeds solver b's, in %
    mean_gain_pct: dict[str, float]


class SweepPoint(BaseModel):
    length_m: float
    mean_sum_rate_bps: dict[str, float]


def topology_rng(master_seed: int, iteration: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence((master_seed, _TOPOLOGY_STREAM, iteration))
    )


def solver_seed_sequence(master_seed: int, iteration: int, tag: str) -> np.random.SeedSequence:
    return np.random.SeedSequence(
        (master_seed, _SOLVER_STREAM, iteration, zlib.crc32(tag.encode("ascii")))
    )


def _run_solver(tag: str, topo: Topology, config: ScenarioConfig,
                rng: np.random.Generator):
    """Dispatch one solver; returns (report, trace-or-None)."""
    params = radio_params(config)
    if tag in ("ga", "ga_op", "ga_tp"):
        ga_cfg = config.ga if tag == "ga" else config.ga.model_copy(
            update={"crossover_kind": tag[-2:]}
        )
        _, report, trace = run_ga(topo, params, ga_cfg, rng)
        return report, trace
    candidates = relay_candidates(topo, config.relay_candidate_count)
    if tag == "heuristic":
        _, report = run_heuristic(topo, params, rng, candidates)
    elif tag == "random":
        _, report = run_random(topo, params, rng, candidates)
    elif tag == "exhaustive":
        _, report = run_exhaustive(topo, params)
    else:
        raise ConfigError(f"unknown solver tag {tag!r}")
    return report, None


def run_single_iteration(config: ScenarioConfig, iteration: int) -> list[RunReport]:
    """Generate iteration's topology and run every configured solver on it."""
    topo = generate_topology(config, topology_rng(config.master_seed, iteration))
    reports = []
    for tag in config.solvers:
        seq = solver_seed_sequence(config.master_seed, iteration, tag)
        seed = int(seq.generate_state(1)[0])
        rng = np.random.default_rng(seq)
        t0 = time.perf_counter()
        rate_report, trace = _run_solver(tag, topo, config, rng)
        wall_ms = (time.perf_counter() - t0) * 1e3
        reports.append(
            RunReport(
                run_id=iteration,
                solver=tag,
                seed=seed,
                sum_rate_bps=rate_report.sum_rate,
                cue_rates_bps=list(rate_report.cue_rates),
                due_rates_bps=list(rate_report.due_rates),
                due_interference_dbm=[to_dbm(i) for i in rate_report.due_interference_mw],
                feasible=rate_report.feasible,
                convergence_generation=None if trace is None else trace.generation_of_convergence,
                trace_best_fitness=None if trace is None else list(trace.best_fitness_per_generation),
                wall_ms=wall_ms,
            )
        )
    return reports


def run_campaign(config: ScenarioConfig) -> list[RunReport]:
    """All Monte Carlo iterations; deterministic given (config, master_seed)
    except for the wall_ms timing field."""
    reports = []
    for iteration in range(config.n_monte_carlo):
        reports.extend(run_single_iteration(config, iteration))
    return reports


def sweep_link_length(config: ScenarioConfig, lengths: Sequence[float]) -> list[SweepPoint]:
    """One campaign per fixed D2D link length; per-solver mean sum-rates."""
    diameter = 2.0 * config.cell_radius_m
    points = []
    for length in lengths:
        if not 0.0 < length < diameter:
            raise ConfigError(
                f"sweep length {length} m must be positive and below the cell "
                f"diameter {diameter} m"
            )
        sub = ScenarioConfig.model_validate(
            {**config.model_dump(), "d2d_fixed_length_m": length}
        )
        reports = run_campaign(sub)
        means: dict[str, list[float]] = {}
        for r in reports:
            means.setdefault(r.solver, []).append(r.sum_rate_bps)
        points.append(
            SweepPoint(
                length_m=length,
                mean_sum_rate_bps={
                    tag: math.fsum(v) / len(v) for tag, v in sorted(means.items())
                },
            )
        )
    return points


def percentile_nearest_rank(samples: Sequence[float], p: float) -> float:
    """Nearest-rank percentile: the ceil(p/100 * n)-th smallest sample."""
    if not samples:
        raise ValueError("cannot take a percentile of an empty sample set")
    if not 0.0 <= p <= 100.0:
        raise ValueError(f"percentile must be in [0, 100], got {p}")
    ordered = sorted(samples)
    rank = max(1, math.ceil(p / 100.0 * len(ordered)))
    return ordered[rank - 1]


def empirical_cdf(samples: Sequence[float]) -> CdfData:
    """Right-continuous step CDF over the sorted samples; F(max) = 1."""
    ordered = sorted(samples)
    n = len(ordered)
    return CdfData(
        values=ordered, cumulative=[(i + 1) / n for i in range(n)]
    )


def summarize(reports: Sequence[RunReport]) -> CampaignSummary:
    """Per-solver statistics plus pairwise mean-gain percentages."""
    if not reports:
        raise ValueError("no reports to summarize")
    by_solver: dict[str, list[RunReport]] = {}
    for r in sorted(reports, key=lambda r: (r.run_id, r.solver)):
        by_solver.setdefault(r.solver, []).append(r)

    solvers: dict[str, SolverSummary] = {}
    means: dict[str, float] = {}
    for tag in sorted(by_solver):
        runs = by_solver[tag]
        rates = [r.sum_rate_bps for r in runs]
        mean_rate = math.fsum(rates) / len(rates)
        means[tag] = mean_rate
        convergence = [
            r.convergence_generation for r in runs if r.convergence_generation is not None
        ]
        interference = [x for r in runs for x in r.due_interference_dbm]
        solvers[tag] = SolverSummary(
            n_runs=len(runs),
            mean_sum_rate_bps=mean_rate,
            median_sum_rate_bps=percentile_nearest_rank(rates, 50),
            convergence_median=(
                percentile_nearest_rank(convergence, 50) if convergence else None
            ),
            convergence_p25=(
                percentile_nearest_rank(convergence, 25) if convergence else None
            ),
            convergence_p75=(
                percentile_nearest_rank(convergence, 75) if convergence else None
            ),
            interference_p50_dbm=(
                percentile_nearest_rank(interference, 50) if interference else None
            ),
            interference_p90_dbm=(
                percentile_nearest_rank(interference, 90) if interference else None
            ),
            interference_cdf=empirical_cdf(interference),
        )

    gains: dict[str, float] = {}
    for a in sorted(means):
        for b in sorted(means):
            if a != b and means[b] > 0.0:
                gains[f"{a}_vs_{b}"] = (means[a] / means[b] - 1.0) * 100.0
    return CampaignSummary(solvers=solvers, mean_gain_pct=gains)


def prefix_path(path_prefix: str, name: str) -> Path:
    """Resolve ``<prefix><name>``; a prefix naming a directory gets a slash."""
    prefix = str(path_prefix)
    if prefix == "" or prefix.endswith(("/", "\\")) or Path(prefix).is_dir():
        path = Path(prefix) / name
    else:
        path = Path(prefix + name)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def export(
    reports: Sequence[RunReport],
    summary: CampaignSummary,
    path_prefix: str,
) -> list[Path]:
    """Write runs.csv, interference.csv, per-GA-run traces and summary.json.

    Floats are written with repr() so a reread reproduces them bit-exactly;
    zero received interference appears as ``-inf``. summary.json uses
    ``-Infinity`` tokens for such values (Python's json module reads them
    back).
    """
    ordered = sorted(reports, key=lambda r: (r.run_id, r.solver))
    written = []

    runs_path = prefix_path(path_prefix, "runs.csv")
    with open(runs_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["run_id", "solver", "seed", "sum_rate_bps", "convergence_gen", "wall_ms"])
        for r in ordered:
            writer.writerow([
                r.run_id,
                r.solver,
                r.seed,
                repr(r.sum_rate_bps),
                "" if r.convergence_generation is None else r.convergence_generation,
                repr(r.wall_ms),
            ])
    written.append(runs_path)

    interference_path = prefix_path(path_prefix, "interference.csv")
    with open(interference_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["run_id", "solver", "pair_id", "interference_dbm"])
        for r in ordered:
            for pair_id, dbm in enumerate(r.due_interference_dbm):
                writer.writerow([r.run_id, r.solver, pair_id, repr(dbm)])
    written.append(interference_path)

    for r in ordered:
        if r.trace_best_fitness is None:
            continue
        trace_path = prefix_path(path_prefix, f"trace_{r.solver}_{r.run_id:04d}.csv")
        with open(trace_path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["generation", "best_fitness"])
            for generation, best in enumerate(r.trace_best_fitness, start=1):
                writer.writerow([generation, repr(best)])
        written.append(trace_path)

    summary_path = prefix_path(path_prefix, "summary.json")
    summary_path.write_text(summary.model_dump_json(indent=2) + "\n")
    written.append(summary_path)
    return written
