"""Geometry, path loss and link gains.

Distance-only deterministic propagation: path loss follows the macro-cell
formula 128.1 + 37.6*log10(d_km), floored at a configurable minimum
coupling loss (MCL) so that very short D2D links cannot produce
unphysical near-unity gains. No fading or shadowing.

A Topology is an immutable scene: base station at the cell centre,
cellular users (CUEs), D2D transmitter/receiver pairs and relays, plus
precomputed linear power gains for every transmitter/receiver
combination the rate equations need. Treat instances as read-only; they
are safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .config import ConfigError, ScenarioConfig

DEFAULT_MCL_DB = 70.0

# Resampling bound for placing a D2D receiver (or near-pair relay) inside
# the cell; exceeding it means the configured geometry is (near-)impossible.
PLACEMENT_RETRY_CAP = 10_000


class Position(NamedTuple):
    x: float
    y: float


def distance(a: Position, b: Position) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def path_loss_db(distance_m: float, mcl_db: float = DEFAULT_MCL_DB) -> float:
    """Path loss in dB at the given distance in meters.

    128.1 + 37.6*log10(d) with d in kilometers, floored at ``mcl_db``.
    """
    if distance_m <= 0.0:
        raise ValueError(f"distance must be positive, got {distance_m}")
    loss = 128.1 + 37.6 * math.log10(distance_m / 1000.0)
    return loss if loss > mcl_db else mcl_db


def link_gain(distance_m: float, mcl_db: float = DEFAULT_MCL_DB) -> float:
    """Linear power gain 10^(-PL/10); strictly decreasing above the MCL floor."""
    return 10.0 ** (-path_loss_db(distance_m, mcl_db) / 10.0)


def noise_power_mw(noise_psd_dbm_hz: float, bandwidth_hz: float) -> float:
    """Thermal noise power in mW over the given bandwidth."""
    if bandwidth_hz <= 0.0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth_hz}")
    noise_dbm = noise_psd_dbm_hz + 10.0 * math.log10(bandwidth_hz)
    return 10.0 ** (noise_dbm / 10.0)


@dataclass(frozen=True)
class RadioParams:
    """Per-RB radio constants shared by all transmitters (UEs and relays)."""

    tx_power_dbm: float = 20.0
    noise_psd_dbm_hz: float = -174.0
    rb_bandwidth_hz: float = 180e3
    n_rbs: int = 50
    rate_threshold_bps: float = 180e3

    def __post_init__(self):
        if self.rb_bandwidth_hz <= 0.0:
            raise ConfigError("rb_bandwidth_hz must be positive")
        if self.n_rbs < 1:
            raise ConfigError("n_rbs must be at least 1")
        if self.rate_threshold_bps < 0.0:
            raise ConfigError("rate_threshold_bps must be non-negative")

    @property
    def tx_power_mw(self) -> float:
        return 10.0 ** (self.tx_power_dbm / 10.0)

    @property
    def noise_mw(self) -> float:
        """Noise power per resource block, in mW."""
        return noise_power_mw(self.noise_psd_dbm_hz, self.rb_bandwidth_hz)


@dataclass
class Topology:
    """Immutable scene with precomputed linear gains.

    Gain matrix convention: first index is the transmitter, second the
    receiver. ``g_due_*`` rows refer to the transmitter of a D2D pair and
    ``*_rx`` columns to the receiver of a pair, so ``g_due_rx[d, d]`` is
    pair d's own link gain.
    """

    bs: Position
    cues: list[Position]
    d2d_pairs: list[tuple[Position, Position]]
    relays: list[Position]
    mcl_db: float
    g_cue_bs: np.ndarray  # (C,)
    g_due_bs: np.ndarray  # (D,)
    g_rel_bs: np.ndarray  # (L,)
    g_cue_rx: np.ndarray  # (C, D)
    g_cue_rel: np.ndarray  # (C, L)
    g_due_rx: np.ndarray  # (D, D)
    g_due_rel: np.ndarray  # (D, L)
    g_rel_rx: np.ndarray  # (L, D)
    g_rel_rel: np.ndarray  # (L, L)
    # row-list mirrors of the matrices above; python floats index much
    # faster than numpy scalars in the per-allocation evaluation loop
    _rows: dict = field(default_factory=dict, repr=False)

    @property
    def n_cues(self) -> int:
        return len(self.cues)

    @property
    def n_pairs(self) -> int:
        return len(self.d2d_pairs)

    @property
    def n_relays(self) -> int:
        return len(self.relays)

    def rows(self, name: str) -> list:
        """List-of-rows view of gain matrix ``name`` (cached)."""
        cached = self._rows.get(name)
        if cached is None:
            cached = getattr(self, name).tolist()
            self._rows[name] = cached
        return cached

    def nearest_relays(self, pair: int, k: int) -> list[int]:
        """Indices of the k relays closest to the pair's midpoint."""
        tx, rx = self.d2d_pairs[pair]
        mid = Position((tx.x + rx.x) / 2.0, (tx.y + rx.y) / 2.0)
        order = sorted(range(self.n_relays), key=lambda l: (distance(mid, self.relays[l]), l))
        return order[: max(0, k)]


def _pairwise_gains(txs: Sequence[Position], rxs: Sequence[Position], mcl_db: float) -> np.ndarray:
    """Gain matrix between transmitter and receiver position lists.

    A zero distance (a node paired with itself, e.g. the relay-to-relay
    diagonal) gets the MCL-floor gain; the path-loss formula has no value
    there and the floor is exactly what caps every shorter-than-floor link.
    """
    mcl_gain = 10.0 ** (-mcl_db / 10.0)
    out = np.empty((len(txs), len(rxs)), dtype=np.float64)
    for i, a in enumerate(txs):
        for j, b in enumerate(rxs):
            d = distance(a, b)
            out[i, j] = link_gain(d, mcl_db) if d > 0.0 else mcl_gain
    return out


def build_topology(
    bs: Position,
    cues: Sequence[Position],
    d2d_pairs: Sequence[tuple[Position, Position]],
    relays: Sequence[Position],
    mcl_db: float = DEFAULT_MCL_DB,
) -> Topology:
    """Assemble a Topology from explicit positions, precomputing all gains."""
    cue_pos = [Position(*c) for c in cues]
    pair_pos = [(Position(*tx), Position(*rx)) for tx, rx in d2d_pairs]
    rel_pos = [Position(*r) for r in relays]
    bs = Position(*bs)
    tx_pos = [p[0] for p in pair_pos]
    rx_pos = [p[1] for p in pair_pos]
    bs_list = [bs]
    return Topology(
        bs=bs,
        cues=cue_pos,
        d2d_pairs=pair_pos,
        relays=rel_pos,
        mcl_db=mcl_db,
        g_cue_bs=_pairwise_gains(cue_pos, bs_list, mcl_db).reshape(-1),
        g_due_bs=_pairwise_gains(tx_pos, bs_list, mcl_db).reshape(-1),
        g_rel_bs=_pairwise_gains(rel_pos, bs_list, mcl_db).reshape(-1),
        g_cue_rx=_pairwise_gains(cue_pos, rx_pos, mcl_db),
        g_cue_rel=_pairwise_gains(cue_pos, rel_pos, mcl_db),
        g_due_rx=_pairwise_gains(tx_pos, rx_pos, mcl_db),
        g_due_rel=_pairwise_gains(tx_pos, rel_pos, mcl_db),
        g_rel_rx=_pairwise_gains(rel_pos, rx_pos, mcl_db),
        g_rel_rel=_pairwise_gains(rel_pos, rel_pos, mcl_db),
    )


def _sample_in_disc(radius: float, rng: np.random.Generator) -> Position:
    r = radius * math.sqrt(rng.random())
    theta = 2.0 * math.pi * rng.random()
    return Position(r * math.cos(theta), r * math.sin(theta))


def _place_receiver(
    tx: Position,
    radius: float,
    length_low: float,
    length_high: float,
    rng: np.random.Generator,
) -> Position:
    """Receiver at sampled length and uniform angle, resampled until in-cell."""
    for _ in range(PLACEMENT_RETRY_CAP):
        length = length_low if length_low == length_high else rng.uniform(length_low, length_high)
        theta = 2.0 * math.pi * rng.random()
        rx = Position(tx.x + length * math.cos(theta), tx.y + length * math.sin(theta))
        if math.hypot(rx.x, rx.y) <= radius:
            return rx
    raise ConfigError(
        f"could not place a D2D receiver inside the cell after {PLACEMENT_RETRY_CAP} "
        f"attempts (link length {length_low}..{length_high} m, cell radius {radius} m)"
    )


def _place_near(
    center: Position, spread: float, radius: float, rng: np.random.Generator
) -> Position:
    for _ in range(PLACEMENT_RETRY_CAP):
        offset = _sample_in_disc(spread, rng)
        pos = Position(center.x + offset.x, center.y + offset.y)
        if math.hypot(pos.x, pos.y) <= radius:
            return pos
    raise ConfigError(
        f"could not place a relay inside the cell after {PLACEMENT_RETRY_CAP} attempts"
    )


def generate_topology(config: ScenarioConfig, rng: np.random.Generator) -> Topology:
    """Sample a random topology for the scenario; deterministic given the rng state.

    Draw order is fixed: CUEs first, then each D2D pair (transmitter, then
    receiver with rejection resampling), then relays.
    """
    radius = config.cell_radius_m
    if config.d2d_fixed_length_m is not None:
        lo = hi = config.d2d_fixed_length_m
    else:
        lo, hi = config.d2d_length_range_m
    if hi > 2.0 * radius:
        raise ConfigError(f"D2D link length {hi} m exceeds cell diameter {2 * radius} m")

    cues = [_sample_in_disc(radius, rng) for _ in range(config.n_cues)]

    pairs = []
    for _ in range(config.n_pairs):
        tx = _sample_in_disc(radius, rng)
        rx = _place_receiver(tx, radius, lo, hi, rng)
        pairs.append((tx, rx))

    relays: list[Position] = []
    if config.relay_placement == "uniform":
        relays = [_sample_in_disc(radius, rng) for _ in range(config.n_relays)]
    else:  # near_pair
        for l in range(config.n_relays):
            tx, rx = pairs[l % len(pairs)]
            mid = Position((tx.x + rx.x) / 2.0, (tx.y + rx.y) / 2.0)
            relays.append(_place_near(mid, config.near_pair_radius_m, radius, rng))

    return build_topology(Position(0.0, 0.0), cues, pairs, relays, config.mcl_db)


def radio_params(config: ScenarioConfig) -> RadioParams:
    """RadioParams slice of a scenario config."""
    return RadioParams(
        tx_power_dbm=config.tx_power_dbm,
        noise_psd_dbm_hz=config.noise_psd_dbm_hz,
        rb_bandwidth_hz=config.rb_bandwidth_hz,
        n_rbs=config.n_rbs,
        rate_threshold_bps=config.rate_threshold_bps,
    )


def relay_candidates(
    topo: Topology, count: Optional[int]
) -> Optional[list[list[int]]]:
    """Per-pair candidate relay lists for the baseline solvers.

    ``None`` means every relay is a candidate for every pair; otherwise the
    ``count`` relays nearest to each pair's midpoint.
    """
    if count is None:
        return None
    return [topo.nearest_relays(d, count) for d in range(topo.n_pairs)]
