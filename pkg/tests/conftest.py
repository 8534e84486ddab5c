"""Shared fixtures and topology builders."""

from __future__ import annotations

import numpy as np
import pytest

from d2dra.channel import Position, RadioParams, build_topology, generate_topology
from d2dra.config import ScenarioConfig


def make_params(**overrides) -> RadioParams:
    return RadioParams(**overrides)


def line_topology(n_rbs: int = 4) -> tuple:
    """Hand-placed scene: BS at origin, one CUE, two pairs, one relay.

    Geometry is chosen so every distance is unambiguous (all nodes on
    simple lattice points) for hand-checked interference terms.
    """
    topo = build_topology(
        bs=Position(0.0, 0.0),
        cues=[Position(100.0, 0.0)],
        d2d_pairs=[
            (Position(0.0, 120.0), Position(50.0, 120.0)),
            (Position(-80.0, -60.0), Position(-80.0, -130.0)),
        ],
        relays=[Position(25.0, 150.0)],
        mcl_db=70.0,
    )
    return topo, make_params(n_rbs=n_rbs)


def random_tiny_instance(seed: int):
    """Random instance small enough for full enumeration."""
    rng = np.random.default_rng(seed)
    n_rbs = int(rng.integers(2, 5))
    n_cues = int(rng.integers(0, min(2, n_rbs) + 1))
    n_pairs = int(rng.integers(0, 3))
    n_relays = int(rng.integers(0, 3))
    config = ScenarioConfig(
        n_cues=n_cues,
        n_pairs=n_pairs,
        n_relays=n_relays,
        n_rbs=n_rbs,
        solvers=["random"],
        n_monte_carlo=1,
    )
    topo = generate_topology(config, rng)
    return topo, make_params(n_rbs=n_rbs), config


@pytest.fixture
def default_config() -> ScenarioConfig:
    return ScenarioConfig()


@pytest.fixture
def small_config() -> ScenarioConfig:
    """Fast-running scenario for harness/service/CLI tests."""
    return ScenarioConfig(
        n_cues=2,
        n_pairs=3,
        n_relays=2,
        n_rbs=5,
        n_monte_carlo=2,
        master_seed=11,
        solvers=["ga_tp", "heuristic", "random"],
        ga={"population_size": 8, "max_generations": 25, "stall_window": 10},
    )
