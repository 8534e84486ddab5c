"""Genetic algorithm over integer chromosomes.

A chromosome concatenates three gene groups: one RB index per CUE, one
RB index per D2D pair, and one mode gene per pair where 0 means direct
and k > 0 means relay k-1. Selection is roulette-wheel on fitness
shifted to be positive, crossover is one- or two-point segment exchange
over the whole vector, mutation redraws each gene independently to a
different legal value, and a repair step restores CUE orthogonality.
Replacement is generational with elitism, so the best fitness never
decreases across generations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _scoring
from .allocation import Allocation, RateReport, evaluate
from .channel import RadioParams, Topology
from .config import ConfigError, GaConfig

# Keeps roulette weights positive when penalties drive fitness negative:
# the population minimum is shifted to EPS_SHIFT * |population maximum|.
EPS_SHIFT = 1e-6


@dataclass(frozen=True)
class ChromosomeSpace:
    """Gene layout and ranges for one problem instance."""

    n_cues: int
    n_pairs: int
    n_rbs: int
    n_relays: int

    @property
    def length(self) -> int:
        return self.n_cues + 2 * self.n_pairs

    def gene_bounds(self) -> np.ndarray:
        """Exclusive upper bound of each gene position."""
        bounds = np.empty(self.length, dtype=np.int64)
        bounds[: self.n_cues] = self.n_rbs
        bounds[self.n_cues : self.n_cues + self.n_pairs] = self.n_rbs
        bounds[self.n_cues + self.n_pairs :] = self.n_relays + 1
        return bounds

    def random_genes(self, rng: np.random.Generator) -> np.ndarray:
        genes = np.empty(self.length, dtype=np.int64)
        c, d = self.n_cues, self.n_pairs
        genes[:c] = rng.choice(self.n_rbs, size=c, replace=False)
        genes[c : c + d] = rng.integers(0, self.n_rbs, size=d)
        genes[c + d :] = rng.integers(0, self.n_relays + 1, size=d)
        return genes

    def decode(self, genes: np.ndarray) -> Allocation:
        flat = genes.tolist()
        c, d = self.n_cues, self.n_pairs
        return Allocation(
            cue_rb=tuple(flat[:c]),
            due_rb=tuple(flat[c : c + d]),
            due_relay=tuple(None if m == 0 else m - 1 for m in flat[c + d :]),
        )

    @staticmethod
    def for_instance(topo: Topology, params: RadioParams) -> "ChromosomeSpace":
        return ChromosomeSpace(topo.n_cues, topo.n_pairs, params.n_rbs, topo.n_relays)


@dataclass
class Individual:
    genes: np.ndarray
    space: ChromosomeSpace
    fitness: Optional[float] = None

    def decode(self) -> Allocation:
        return self.space.decode(self.genes)


@dataclass
class ConvergenceTrace:
    """Best fitness after each generation (the initial population is
    generation 1) and the first generation attaining the final best."""

    best_fitness_per_generation: list[float] = field(default_factory=list)
    generation_of_convergence: int = 0


def fitness_from_report(report: RateReport, params: RadioParams, cfg: GaConfig) -> float:
    """Sum-rate plus rate-threshold penalty terms."""
    rth = params.rate_threshold_bps
    cue_pen = 0.0
    due_pen = 0.0
    if cfg.penalty_mode == "shortfall":
        for r in report.cue_rates:
            if r < rth:
                cue_pen += r - rth
        for r in report.due_rates:
            if r < rth:
                due_pen += r - rth
    else:  # excess: penalise rate beyond the threshold instead
        for r in report.cue_rates:
            if r > rth:
                cue_pen += rth - r
        for r in report.due_rates:
            if r > rth:
                due_pen += rth - r
    return report.sum_rate + cfg.penalty_weight_cue * cue_pen + cfg.penalty_weight_due * due_pen


def fitness(ind: Individual, topo: Topology, params: RadioParams, cfg: GaConfig) -> float:
    """Penalised fitness of an individual (does not mutate the cache)."""
    return fitness_from_report(evaluate(ind.decode(), topo, params), params, cfg)


def make_scorer(topo: Topology, params: RadioParams, cfg: GaConfig):
    """Fitness callable for repaired individuals of this instance.

    Uses the JIT kernel when available; it reproduces fitness() bit for
    bit but skips re-validation, which the GA guarantees via repair.
    """
    if not _scoring.HAVE_NUMBA:
        return lambda ind: fitness(ind, topo, params, cfg)
    static = (
        topo.n_cues,
        topo.n_pairs,
        params.n_rbs,
        topo.g_cue_bs,
        topo.g_due_bs,
        topo.g_rel_bs,
        topo.g_cue_rx,
        topo.g_cue_rel,
        topo.g_due_rx,
        topo.g_due_rel,
        topo.g_rel_rx,
        topo.g_rel_rel,
        params.tx_power_mw,
        params.noise_mw,
        params.rb_bandwidth_hz,
        params.rate_threshold_bps,
        cfg.penalty_weight_cue,
        cfg.penalty_weight_due,
        cfg.penalty_mode == "excess",
    )

    def score(ind: Individual) -> float:
        return float(_scoring.score_genes(ind.genes, *static))

    return score


def selection_weights(fitnesses: list[float]) -> np.ndarray:
    """Roulette probabilities proportional to positively shifted fitness.

    Degenerate populations (all equal, or a non-positive total after the
    shift) select uniformly.
    """
    f = np.asarray(fitnesses, dtype=np.float64)
    shifted = f - f.min() + EPS_SHIFT * abs(f.max())
    total = shifted.sum()
    if not math.isfinite(total) or total <= 0.0:
        return np.full(len(f), 1.0 / len(f))
    return shifted / total


def _draw(cumulative: np.ndarray, rng: np.random.Generator) -> int:
    idx = int(np.searchsorted(cumulative, rng.random(), side="right"))
    return min(idx, len(cumulative) - 1)


def select_parent(population: list[Individual], rng: np.random.Generator) -> Individual:
    """Roulette-wheel selection over the population's cached fitnesses."""
    weights = selection_weights([ind.fitness for ind in population])
    return population[_draw(np.cumsum(weights), rng)]


def swap_segment(
    genes_a: np.ndarray, genes_b: np.ndarray, start: int, stop: int
) -> tuple[np.ndarray, np.ndarray]:
    """Children with the [start, stop) segment exchanged between parents."""
    child_a = genes_a.copy()
    child_b = genes_b.copy()
    child_a[start:stop] = genes_b[start:stop]
    child_b[start:stop] = genes_a[start:stop]
    return child_a, child_b


def crossover(
    a: Individual, b: Individual, cfg: GaConfig, rng: np.random.Generator
) -> tuple[Individual, Individual]:
    """One- or two-point crossover; returns unevaluated children.

    With probability 1 - crossover_prob the children are plain copies.
    One-point exchanges the tail from a cut in [1, length); two-point
    exchanges the segment between two distinct cuts in [0, length].
    """
    length = a.space.length
    if rng.random() >= cfg.crossover_prob or length < 2:
        return (
            Individual(a.genes.copy(), a.space),
            Individual(b.genes.copy(), b.space),
        )
    if cfg.crossover_kind == "op":
        start = int(rng.integers(1, length))
        stop = length
    else:
        cuts = rng.choice(length + 1, size=2, replace=False)
        start, stop = int(cuts.min()), int(cuts.max())
    genes_a, genes_b = swap_segment(a.genes, b.genes, start, stop)
    return Individual(genes_a, a.space), Individual(genes_b, b.space)


def mutate(ind: Individual, cfg: GaConfig, rng: np.random.Generator) -> Individual:
    """Independently redraw each gene with probability mutation_prob.

    A mutated gene always receives a different value from its legal
    range; genes whose range has a single value are left alone.
    """
    space = ind.space
    genes = ind.genes.copy()
    if space.length == 0:
        return Individual(genes, space)
    bounds = space.gene_bounds()
    mask = (rng.random(space.length) < cfg.mutation_prob) & (bounds > 1)
    idx = np.nonzero(mask)[0]
    if idx.size:
        old = genes[idx]
        draws = rng.integers(0, bounds[idx] - 1)
        draws += draws >= old
        genes[idx] = draws
    return Individual(genes, space)


def repair(ind: Individual, rng: np.random.Generator) -> Individual:
    """Restore CUE orthogonality: later duplicates move to unused RBs.

    The first occupant of each RB keeps it; every later duplicate is
    reassigned to a uniformly chosen currently-free RB. Returns the
    individual unchanged when the CUE genes are already distinct.
    """
    space = ind.space
    c = space.n_cues
    cue = ind.genes[:c].tolist()
    seen: set[int] = set()
    dup_positions = []
    for pos, rb in enumerate(cue):
        if rb in seen:
            dup_positions.append(pos)
        else:
            seen.add(rb)
    if not dup_positions:
        return ind
    genes = ind.genes.copy()
    free = sorted(set(range(space.n_rbs)) - seen)
    for pos in dup_positions:
        pick = int(rng.integers(len(free)))
        genes[pos] = free.pop(pick)
    return Individual(genes, space)


def init_population(
    topo: Topology, params: RadioParams, cfg: GaConfig, rng: np.random.Generator
) -> list[Individual]:
    """Random structurally valid individuals with evaluated fitness."""
    if topo.n_cues > params.n_rbs:
        raise ConfigError(
            f"{topo.n_cues} CUEs cannot get orthogonal RBs out of {params.n_rbs}"
        )
    space = ChromosomeSpace.for_instance(topo, params)
    score = make_scorer(topo, params, cfg)
    population = []
    for _ in range(cfg.population_size):
        ind = Individual(space.random_genes(rng), space)
        ind.fitness = score(ind)
        population.append(ind)
    return population


def run_ga(
    topo: Topology, params: RadioParams, cfg: GaConfig, rng: np.random.Generator
) -> tuple[Allocation, RateReport, ConvergenceTrace]:
    """Full GA run; deterministic given topology, config and rng state.

    Each generation: roulette selection, crossover, per-gene mutation,
    repair, evaluation; the next population keeps the elite_count best
    parents and fills up with the best offspring. Stops after
    max_generations, or once the best fitness has not improved for
    stall_window consecutive generations.
    """
    m = cfg.population_size
    population = init_population(topo, params, cfg, rng)
    score = make_scorer(topo, params, cfg)
    best = max(population, key=lambda ind: ind.fitness)
    trace = [best.fitness]
    stall = 0

    for _ in range(2, cfg.max_generations + 1):
        weights = selection_weights([ind.fitness for ind in population])
        cumulative = np.cumsum(weights)
        offspring: list[Individual] = []
        while len(offspring) < m:
            parent_a = population[_draw(cumulative, rng)]
            parent_b = population[_draw(cumulative, rng)]
            for child in crossover(parent_a, parent_b, cfg, rng):
                child = repair(mutate(child, cfg, rng), rng)
                child.fitness = score(child)
                offspring.append(child)
        del offspring[m:]

        parents_ranked = sorted(population, key=lambda ind: ind.fitness, reverse=True)
        offspring.sort(key=lambda ind: ind.fitness, reverse=True)
        population = parents_ranked[: cfg.elite_count] + offspring[: m - cfg.elite_count]

        gen_best = max(population, key=lambda ind: ind.fitness)
        trace.append(gen_best.fitness)
        if gen_best.fitness > best.fitness:
            best = gen_best
            stall = 0
        else:
            stall += 1
        if stall >= cfg.stall_window:
            break

    convergence = 1 + trace.index(max(trace))
    alloc = best.decode()
    report = evaluate(alloc, topo, params)
    return alloc, report, ConvergenceTrace(trace, convergence)
