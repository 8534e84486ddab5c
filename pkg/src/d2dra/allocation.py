"""Allocations and the interference/rate model.

An Allocation assigns each cellular user one resource block (orthogonal
across CUEs) and each D2D pair one resource block plus a transmission
mode: direct, or relayed through one relay with both hops sharing the
pair's RB (full-duplex relay). All arithmetic is done on linear powers
in mW; dB conversions only happen at the edges.

Interference bookkeeping on a shared RB:
  * at the base station, every co-channel pair contributes its
    transmitter and, if relayed, also its relay;
  * at a pair's receiver or its serving relay, the co-channel CUE and
    every OTHER pair contribute the same way. A pair's own transmitter
    and own relay are never counted against its own receivers (relay
    self-interference is out of scope).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .channel import RadioParams, Topology


class AllocationError(ValueError):
    """Structurally invalid allocation (index ranges, CUE orthogonality)."""


@dataclass(frozen=True)
class Allocation:
    """One complete assignment of RBs and modes.

    ``due_relay[d]`` is None for direct transmission, otherwise the index
    of the relay carrying pair d's traffic.
    """

    cue_rb: tuple[int, ...]
    due_rb: tuple[int, ...]
    due_relay: tuple[Optional[int], ...]


@dataclass
class RateReport:
    """Achieved rates and received interference for one allocation."""

    cue_rates: list[float]  # bit/s per CUE
    due_rates: list[float]  # bit/s per pair (direct rate, or min of the two hops)
    due_interference_mw: list[float]  # at each pair's receiver, on its RB
    sum_rate: float  # bit/s
    cue_feasible: list[bool]  # rate >= threshold
    due_feasible: list[bool]
    feasible: bool  # all links meet the threshold

    @property
    def due_interference_dbm(self) -> list[float]:
        return [to_dbm(i) for i in self.due_interference_mw]


def to_dbm(power_mw: float) -> float:
    """mW to dBm; zero power maps to -inf."""
    return 10.0 * math.log10(power_mw) if power_mw > 0.0 else -math.inf


def shannon_rate(
    signal_mw: float, interference_mw: float, noise_mw: float, bandwidth_hz: float
) -> float:
    """Shannon capacity B*log2(1 + SINR) in bit/s."""
    return bandwidth_hz * math.log2(1.0 + signal_mw / (interference_mw + noise_mw))


def validate_allocation(alloc: Allocation, topo: Topology, params: RadioParams) -> None:
    """Raise AllocationError on any structural violation."""
    n = params.n_rbs
    n_relays = topo.n_relays
    cue_rb = alloc.cue_rb
    due_rb = alloc.due_rb
    due_relay = alloc.due_relay
    if len(cue_rb) != topo.n_cues:
        raise AllocationError(
            f"expected {topo.n_cues} CUE assignments, got {len(cue_rb)}"
        )
    if len(due_rb) != topo.n_pairs or len(due_relay) != topo.n_pairs:
        raise AllocationError(
            f"expected {topo.n_pairs} pair assignments, got "
            f"{len(due_rb)} RBs / {len(due_relay)} modes"
        )
    if cue_rb and (min(cue_rb) < 0 or max(cue_rb) >= n):
        raise AllocationError(f"CUE RBs {cue_rb} not all in range [0, {n})")
    if len(set(cue_rb)) != len(cue_rb):
        raise AllocationError("CUE RBs must be pairwise distinct")
    if due_rb and (min(due_rb) < 0 or max(due_rb) >= n):
        raise AllocationError(f"pair RBs {due_rb} not all in range [0, {n})")
    for d, rel in enumerate(due_relay):
        if rel is not None and not 0 <= rel < n_relays:
            raise AllocationError(f"pair {d} relay {rel} out of range [0, {n_relays})")


def interference_at_bs(
    alloc: Allocation, topo: Topology, params: RadioParams, rb: int
) -> float:
    """Total D2D-side interference power (mW) received at the BS on an RB."""
    p = params.tx_power_mw
    total = 0.0
    for d, pair_rb in enumerate(alloc.due_rb):
        if pair_rb != rb:
            continue
        total += p * float(topo.g_due_bs[d])
        rel = alloc.due_relay[d]
        if rel is not None:
            total += p * float(topo.g_rel_bs[rel])
    return total


def interference_at_node(
    alloc: Allocation,
    topo: Topology,
    params: RadioParams,
    rb: int,
    pair: int,
    relay: Optional[int] = None,
) -> float:
    """Interference power (mW) at pair ``pair``'s receiver, or at ``relay``
    when it serves that pair, on the given RB.

    The victim pair's own transmitter and own relay are excluded.
    """
    p = params.tx_power_mw
    total = 0.0
    if relay is None:
        g_cue = topo.g_cue_rx
        g_due = topo.g_due_rx
        g_rel = topo.g_rel_rx
        col = pair
    else:
        g_cue = topo.g_cue_rel
        g_due = topo.g_due_rel
        g_rel = topo.g_rel_rel
        col = relay
    for c, cue_rb in enumerate(alloc.cue_rb):
        if cue_rb == rb:
            total += p * float(g_cue[c, col])
    for i, pair_rb in enumerate(alloc.due_rb):
        if pair_rb != rb or i == pair:
            continue
        total += p * float(g_due[i, col])
        rel_i = alloc.due_relay[i]
        if rel_i is not None:
            total += p * float(g_rel[rel_i, col])
    return total


def cue_rate(alloc: Allocation, topo: Topology, params: RadioParams, cue: int) -> float:
    """Uplink rate of one CUE on its assigned RB, in bit/s."""
    rb = alloc.cue_rb[cue]
    signal = params.tx_power_mw * float(topo.g_cue_bs[cue])
    interference = interference_at_bs(alloc, topo, params, rb)
    return shannon_rate(signal, interference, params.noise_mw, params.rb_bandwidth_hz)


def pair_rate(alloc: Allocation, topo: Topology, params: RadioParams, pair: int) -> float:
    """Rate of one D2D pair: direct-link rate, or min of the two relay hops."""
    rel = alloc.due_relay[pair]
    if rel is not None and not 0 <= rel < topo.n_relays:
        raise AllocationError(f"pair {pair} relay {rel} out of range [0, {topo.n_relays})")
    rb = alloc.due_rb[pair]
    p = params.tx_power_mw
    n0 = params.noise_mw
    bw = params.rb_bandwidth_hz
    i_rx = interference_at_node(alloc, topo, params, rb, pair)
    if rel is None:
        return shannon_rate(p * float(topo.g_due_rx[pair, pair]), i_rx, n0, bw)
    i_rel = interference_at_node(alloc, topo, params, rb, pair, relay=rel)
    hop1 = shannon_rate(p * float(topo.g_due_rel[pair, rel]), i_rel, n0, bw)
    hop2 = shannon_rate(p * float(topo.g_rel_rx[rel, pair]), i_rx, n0, bw)
    return min(hop1, hop2)


def evaluate(alloc: Allocation, topo: Topology, params: RadioParams) -> RateReport:
    """Full rate report for an allocation.

    Pure function of its inputs; structural violations raise instead of
    being scored. This is the hot path of every solver, hence the local
    aliasing and the flat loops.
    """
    validate_allocation(alloc, topo, params)

    p = params.tx_power_mw
    n0 = params.noise_mw
    bw = params.rb_bandwidth_hz
    threshold = params.rate_threshold_bps
    log2 = math.log2

    g_cue_bs = topo.rows("g_cue_bs")
    g_due_bs = topo.rows("g_due_bs")
    g_rel_bs = topo.rows("g_rel_bs")
    g_cue_rx = topo.rows("g_cue_rx")
    g_cue_rel = topo.rows("g_cue_rel")
    g_due_rx = topo.rows("g_due_rx")
    g_due_rel = topo.rows("g_due_rel")
    g_rel_rx = topo.rows("g_rel_rx")
    g_rel_rel = topo.rows("g_rel_rel")

    cue_rb = alloc.cue_rb
    due_rb = alloc.due_rb
    due_relay = alloc.due_relay

    rb_cue: dict[int, int] = {}
    for c, rb in enumerate(cue_rb):
        rb_cue[rb] = c
    rb_pairs: dict[int, list[int]] = {}
    for d, rb in enumerate(due_rb):
        rb_pairs.setdefault(rb, []).append(d)

    cue_rates = []
    for c, rb in enumerate(cue_rb):
        i_bs = 0.0
        for d in rb_pairs.get(rb, ()):
            i_bs += p * g_due_bs[d]
            rel = due_relay[d]
            if rel is not None:
                i_bs += p * g_rel_bs[rel]
        cue_rates.append(bw * log2(1.0 + p * g_cue_bs[c] / (i_bs + n0)))

    due_rates = []
    due_interference = []
    for d in range(topo.n_pairs):
        rb = due_rb[d]
        cochannel = rb_pairs[rb]
        shared = len(cochannel) > 1
        cue = rb_cue.get(rb)
        i_rx = 0.0
        if cue is not None:
            i_rx += p * g_cue_rx[cue][d]
        if shared:
            for i in cochannel:
                if i == d:
                    continue
                i_rx += p * g_due_rx[i][d]
                rel_i = due_relay[i]
                if rel_i is not None:
                    i_rx += p * g_rel_rx[rel_i][d]
        rel = due_relay[d]
        if rel is None:
            rate = bw * log2(1.0 + p * g_due_rx[d][d] / (i_rx + n0))
        else:
            i_rel = 0.0
            if cue is not None:
                i_rel += p * g_cue_rel[cue][rel]
            if shared:
                for i in cochannel:
                    if i == d:
                        continue
                    i_rel += p * g_due_rel[i][rel]
                    rel_i = due_relay[i]
                    if rel_i is not None:
                        i_rel += p * g_rel_rel[rel_i][rel]
            hop1 = bw * log2(1.0 + p * g_due_rel[d][rel] / (i_rel + n0))
            hop2 = bw * log2(1.0 + p * g_rel_rx[rel][d] / (i_rx + n0))
            rate = hop1 if hop1 < hop2 else hop2
        due_rates.append(rate)
        due_interference.append(i_rx)

    cue_feasible = [r >= threshold for r in cue_rates]
    due_feasible = [r >= threshold for r in due_rates]
    return RateReport(
        cue_rates=cue_rates,
        due_rates=due_rates,
        due_interference_mw=due_interference,
        sum_rate=sum(cue_rates) + sum(due_rates),
        cue_feasible=cue_feasible,
        due_feasible=due_feasible,
        feasible=all(cue_feasible) and all(due_feasible),
    )
