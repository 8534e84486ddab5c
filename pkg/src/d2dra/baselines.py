"""Reference solvers: greedy D2D-first heuristic, random allocation, and
an exhaustive oracle for instances small enough to enumerate.

The heuristic assigns CUEs random orthogonal RBs, precomputes for every
still-unassigned pair its potential direct rate and best-relay rate on
every RB under the interference accumulated so far, then repeatedly
commits the single (pair, RB, mode) entry with the globally maximum
rate, updating the affected column after each commitment.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .allocation import Allocation, RateReport, evaluate
from .channel import RadioParams, Topology
from .config import ConfigError

# Deterministic tie-breaking for equal rates everywhere in this module:
# lowest pair index, then lowest RB, then direct before relayed.


@dataclass
class _InterferenceState:
    """Interference accumulated from CUEs and committed pairs.

    ``i_rx[d, n]``: interference at pair d's receiver on RB n.
    ``i_rel[l, n]``: interference at relay l on RB n.
    Rows of committed pairs pick up their own emissions and must not be
    read again; both solvers only query rows of not-yet-committed pairs.
    """

    i_rx: np.ndarray
    i_rel: np.ndarray

    @staticmethod
    def from_cues(topo: Topology, params: RadioParams, cue_rb: Sequence[int]):
        i_rx = np.zeros((topo.n_pairs, params.n_rbs))
        i_rel = np.zeros((topo.n_relays, params.n_rbs))
        p = params.tx_power_mw
        for c, rb in enumerate(cue_rb):
            i_rx[:, rb] += p * topo.g_cue_rx[c, :]
            i_rel[:, rb] += p * topo.g_cue_rel[c, :]
        return _InterferenceState(i_rx, i_rel)

    def commit(self, topo: Topology, params: RadioParams, pair: int, rb: int,
               relay: Optional[int]) -> None:
        p = params.tx_power_mw
        self.i_rx[:, rb] += p * topo.g_due_rx[pair, :]
        self.i_rel[:, rb] += p * topo.g_due_rel[pair, :]
        if relay is not None:
            self.i_rx[:, rb] += p * topo.g_rel_rx[relay, :]
            self.i_rel[:, rb] += p * topo.g_rel_rel[relay, :]


def _candidate_mask(topo: Topology, candidates: Optional[Sequence[Sequence[int]]]) -> np.ndarray:
    mask = np.zeros((topo.n_pairs, topo.n_relays), dtype=bool)
    if candidates is None:
        mask[:] = True
    else:
        if len(candidates) != topo.n_pairs:
            raise ConfigError("candidate relay lists must cover every pair")
        for d, relays in enumerate(candidates):
            mask[d, list(relays)] = True
    return mask


@dataclass
class RateMatrices:
    """Potential-rate matrices of the greedy heuristic.

    Zeros in a row mean the pair has been committed. ``relay_arg`` holds
    the best candidate relay per (pair, RB), -1 where none exists.
    """

    direct: np.ndarray  # (D, N)
    relayed: np.ndarray  # (D, N)
    relay_arg: np.ndarray  # (D, N) int
    row_max_direct: np.ndarray  # (D,)
    row_arg_direct: np.ndarray  # (D,) int
    row_max_relayed: np.ndarray
    row_arg_relayed: np.ndarray

    def refresh_row_maxima(self, rows: np.ndarray) -> None:
        if rows.size == 0:
            return
        self.row_max_direct[rows] = self.direct[rows].max(axis=1)
        self.row_arg_direct[rows] = self.direct[rows].argmax(axis=1)
        self.row_max_relayed[rows] = self.relayed[rows].max(axis=1)
        self.row_arg_relayed[rows] = self.relayed[rows].argmax(axis=1)


def _relayed_best(two_hop: np.ndarray, mask_row: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Best candidate-relay rate and argmax over one pair's (L, N) block."""
    n = two_hop.shape[1]
    if two_hop.shape[0] == 0 or not mask_row.any():
        return np.zeros(n), np.full(n, -1, dtype=np.int64)
    rates = np.where(mask_row[:, None], two_hop, -1.0)
    arg = rates.argmax(axis=0)
    best = rates[arg, np.arange(n)]
    return best, arg.astype(np.int64)


def _pair_two_hop(topo: Topology, params: RadioParams, state: _InterferenceState,
                  pair: int) -> np.ndarray:
    """(L, N) two-hop rates for one pair under current interference."""
    p, n0, bw = params.tx_power_mw, params.noise_mw, params.rb_bandwidth_hz
    hop1 = bw * np.log2(1.0 + (p * topo.g_due_rel[pair, :])[:, None] / (state.i_rel + n0))
    hop2 = bw * np.log2(1.0 + (p * topo.g_rel_rx[:, pair])[:, None] / (state.i_rx[pair, :] + n0))
    return np.minimum(hop1, hop2)


def build_rate_matrices(topo: Topology, params: RadioParams, state: _InterferenceState,
                        candidate_mask: np.ndarray,
                        skip_rows: Sequence[int] = ()) -> RateMatrices:
    """From-scratch matrices under the current interference state."""
    d_cnt, n = topo.n_pairs, params.n_rbs
    p, n0, bw = params.tx_power_mw, params.noise_mw, params.rb_bandwidth_hz
    own = p * topo.g_due_rx.diagonal()
    direct = bw * np.log2(1.0 + own[:, None] / (state.i_rx + n0))
    relayed = np.zeros((d_cnt, n))
    relay_arg = np.full((d_cnt, n), -1, dtype=np.int64)
    for d in range(d_cnt):
        relayed[d], relay_arg[d] = _relayed_best(
            _pair_two_hop(topo, params, state, d), candidate_mask[d]
        )
    for d in skip_rows:
        direct[d] = 0.0
        relayed[d] = 0.0
        relay_arg[d] = -1
    mats = RateMatrices(
        direct=direct, relayed=relayed, relay_arg=relay_arg,
        row_max_direct=np.zeros(d_cnt), row_arg_direct=np.zeros(d_cnt, dtype=np.int64),
        row_max_relayed=np.zeros(d_cnt), row_arg_relayed=np.zeros(d_cnt, dtype=np.int64),
    )
    mats.refresh_row_maxima(np.arange(d_cnt))
    return mats


def _update_column(mats: RateMatrices, topo: Topology, params: RadioParams,
                   state: _InterferenceState, rb: int, rows: np.ndarray,
                   candidate_mask: np.ndarray) -> None:
    """Recompute entries on one RB for the given (unassigned) rows."""
    p, n0, bw = params.tx_power_mw, params.noise_mw, params.rb_bandwidth_hz
    for d in rows:
        own = p * topo.g_due_rx[d, d]
        mats.direct[d, rb] = bw * np.log2(1.0 + own / (state.i_rx[d, rb] + n0))
        if topo.n_relays and candidate_mask[d].any():
            hop1 = bw * np.log2(
                1.0 + p * topo.g_due_rel[d, :] / (state.i_rel[:, rb] + n0)
            )
            hop2 = bw * np.log2(
                1.0 + p * topo.g_rel_rx[:, d] / (state.i_rx[d, rb] + n0)
            )
            rates = np.where(candidate_mask[d], np.minimum(hop1, hop2), -1.0)
            arg = int(rates.argmax())
            mats.relayed[d, rb] = rates[arg]
            mats.relay_arg[d, rb] = arg
    mats.refresh_row_maxima(rows)


def run_heuristic(
    topo: Topology,
    params: RadioParams,
    rng: np.random.Generator,
    candidates: Optional[Sequence[Sequence[int]]] = None,
) -> tuple[Allocation, RateReport]:
    """Greedy D2D-prioritising allocation.

    CUEs draw random orthogonal RBs; pairs are then committed one at a
    time, always the entry with the maximum potential rate across both
    matrices, with interference updated after every commitment. Final
    rates come from a full evaluation of the complete allocation.
    """
    c_cnt, d_cnt, n = topo.n_cues, topo.n_pairs, params.n_rbs
    if c_cnt > n:
        raise ConfigError(f"{c_cnt} CUEs cannot get orthogonal RBs out of {n}")
    cue_rb = tuple(int(x) for x in rng.choice(n, size=c_cnt, replace=False))
    due_rb = [0] * d_cnt
    due_relay: list[Optional[int]] = [None] * d_cnt

    state = _InterferenceState.from_cues(topo, params, cue_rb)
    mask = _candidate_mask(topo, candidates)
    mats = build_rate_matrices(topo, params, state, mask)
    unassigned = np.ones(d_cnt, dtype=bool)

    for _ in range(d_cnt):
        best = None  # (value, pair, rb, relay-or-None)
        for d in range(d_cnt):
            if not unassigned[d]:
                continue
            vd, nd = mats.row_max_direct[d], int(mats.row_arg_direct[d])
            vr, nr = mats.row_max_relayed[d], int(mats.row_arg_relayed[d])
            if vr > vd or (vr == vd and nr < nd):
                cand = (vr, d, nr, int(mats.relay_arg[d, nr]))
            else:
                cand = (vd, d, nd, None)
            if best is None or cand[0] > best[0]:
                best = cand
        _, pair, rb, relay = best
        due_rb[pair] = rb
        due_relay[pair] = relay
        unassigned[pair] = False
        state.commit(topo, params, pair, rb, relay)
        mats.direct[pair] = 0.0
        mats.relayed[pair] = 0.0
        mats.relay_arg[pair] = -1
        mats.row_max_direct[pair] = 0.0
        mats.row_max_relayed[pair] = 0.0
        rows = np.nonzero(unassigned)[0]
        _update_column(mats, topo, params, state, rb, rows, mask)

    alloc = Allocation(cue_rb, tuple(due_rb), tuple(due_relay))
    return alloc, evaluate(alloc, topo, params)


def run_random(
    topo: Topology,
    params: RadioParams,
    rng: np.random.Generator,
    candidates: Optional[Sequence[Sequence[int]]] = None,
) -> tuple[Allocation, RateReport]:
    """Random allocation baseline.

    CUEs draw random orthogonal RBs; each pair draws a uniform RB from
    the full pool and then keeps whichever of direct or best-relay mode
    yields the higher rate under the interference of CUEs and the pairs
    committed before it.
    """
    c_cnt, d_cnt, n = topo.n_cues, topo.n_pairs, params.n_rbs
    if c_cnt > n:
        raise ConfigError(f"{c_cnt} CUEs cannot get orthogonal RBs out of {n}")
    cue_rb = tuple(int(x) for x in rng.choice(n, size=c_cnt, replace=False))
    rb_draws = rng.integers(0, n, size=d_cnt)
    due_rb = [0] * d_cnt
    due_relay: list[Optional[int]] = [None] * d_cnt

    state = _InterferenceState.from_cues(topo, params, cue_rb)
    mask = _candidate_mask(topo, candidates)
    p, n0, bw = params.tx_power_mw, params.noise_mw, params.rb_bandwidth_hz

    for d in range(d_cnt):
        rb = int(rb_draws[d])
        i_rx = state.i_rx[d, rb]
        direct = bw * math.log2(1.0 + p * topo.g_due_rx[d, d] / (i_rx + n0))
        relay: Optional[int] = None
        if topo.n_relays and mask[d].any():
            hop1 = bw * np.log2(1.0 + p * topo.g_due_rel[d, :] / (state.i_rel[:, rb] + n0))
            hop2 = bw * np.log2(1.0 + p * topo.g_rel_rx[:, d] / (i_rx + n0))
            rates = np.where(mask[d], np.minimum(hop1, hop2), -1.0)
            arg = int(rates.argmax())
            if rates[arg] > direct:
                relay = arg
        due_rb[d] = rb
        due_relay[d] = relay
        state.commit(topo, params, d, rb, relay)

    alloc = Allocation(cue_rb, tuple(due_rb), tuple(due_relay))
    return alloc, evaluate(alloc, topo, params)


def search_space_size(n_rbs: int, n_cues: int, n_pairs: int, n_relays: int) -> int:
    """Number of structurally valid allocations."""
    return math.perm(n_rbs, n_cues) * (n_rbs * (n_relays + 1)) ** n_pairs


DEFAULT_ENUMERATION_CAP = 10_000_000


def run_exhaustive(
    topo: Topology, params: RadioParams, cap: int = DEFAULT_ENUMERATION_CAP
) -> tuple[Allocation, RateReport]:
    """Enumerate every structurally valid allocation.

    Returns the sum-rate maximiser among allocations meeting the
    per-link rate threshold if any exists, otherwise the best overall
    (its report carries feasible=False). Ties go to the
    lexicographically smallest gene vector (CUE RBs, pair RBs, pair
    modes with direct coded as 0).
    """
    n, c_cnt, d_cnt, l_cnt = params.n_rbs, topo.n_cues, topo.n_pairs, topo.n_relays
    space = search_space_size(n, c_cnt, d_cnt, l_cnt)
    if space > cap:
        raise ConfigError(
            f"search space of {space} allocations exceeds the enumeration cap "
            f"of {cap} (N={n}, C={c_cnt}, D={d_cnt}, L={l_cnt})"
        )

    best_any: Optional[tuple[float, Allocation, RateReport]] = None
    best_feasible: Optional[tuple[float, Allocation, RateReport]] = None
    mode_values = range(l_cnt + 1)
    for cue_rb in itertools.permutations(range(n), c_cnt):
        for due_rb in itertools.product(range(n), repeat=d_cnt):
            for modes in itertools.product(mode_values, repeat=d_cnt):
                alloc = Allocation(
                    cue_rb=cue_rb,
                    due_rb=due_rb,
                    due_relay=tuple(None if m == 0 else m - 1 for m in modes),
                )
                report = evaluate(alloc, topo, params)
                if best_any is None or report.sum_rate > best_any[0]:
                    best_any = (report.sum_rate, alloc, report)
                if report.feasible and (
                    best_feasible is None or report.sum_rate > best_feasible[0]
                ):
                    best_feasible = (report.sum_rate, alloc, report)

    chosen = best_feasible if best_feasible is not None else best_any
    return chosen[1], chosen[2]
