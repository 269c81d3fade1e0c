"""Generational GA over decoder genomes.

Rank-based roulette selection, order-preserving crossovers (1-point, PUX,
PMX), rank-weighted averaging of the weight genes, swap mutation, elitist
replacement and a stall-based stopping rule.
"""

from __future__ import annotations

import itertools
import logging
import math
import random
import time
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .decoder import CostRankTable, Variant, cost_rank_table
from .genome import (
    DEFAULT_WEIGHT_RANGE,
    Crossover,
    Genome,
    mutate_auxiliary,
    random_genome,
    swap_mutate,
)
from .hill_climber import fitness, population_costs
from .instance import Instance, Solution

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GaConfig:
    """GA parameters. Defaults follow the published parameter table."""

    population_size: int = 200
    elite_fraction: float = 0.20
    mutation_rate: float = 0.015
    pux_bias: float = 0.66
    stall_limit: int = 50
    variant: Variant = Variant.IGA
    weight_range: tuple[float, float] = DEFAULT_WEIGHT_RANGE
    fixed_weights: tuple[float, float, float, float] | None = None
    fixed_crossover: Crossover | None = None
    seed: int = 0
    max_generations: int = 10_000

    def __post_init__(self) -> None:
        if self.population_size < 2:
            raise ValueError(f"population_size must be >= 2, got {self.population_size}")
        if not 0 < self.elite_fraction < 1:
            raise ValueError(f"elite_fraction must be in (0, 1), got {self.elite_fraction}")
        if not 0 <= self.mutation_rate <= 1:
            raise ValueError(f"mutation_rate must be in [0, 1], got {self.mutation_rate}")
        if not 0 < self.pux_bias < 1:
            raise ValueError(f"pux_bias must be in (0, 1), got {self.pux_bias}")
        if self.stall_limit < 1:
            raise ValueError(f"stall_limit must be >= 1, got {self.stall_limit}")
        if self.max_generations < 1:
            raise ValueError(f"max_generations must be >= 1, got {self.max_generations}")
        lo, hi = self.weight_range
        if not 0 <= lo <= hi:
            raise ValueError(f"weight_range must satisfy 0 <= lo <= hi, got {self.weight_range}")
        if self.fixed_weights is not None:
            if len(self.fixed_weights) != 4 or any(w < 0 for w in self.fixed_weights):
                raise ValueError(f"fixed_weights needs 4 non-negative values, got {self.fixed_weights}")
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.fixed_crossover is not None:
            object.__setattr__(self, "fixed_crossover", Crossover(self.fixed_crossover))

    @property
    def elite_count(self) -> int:
        return math.ceil(self.elite_fraction * self.population_size)

    @property
    def self_selecting(self) -> bool:
        """True when the crossover gene picks the operator."""
        return self.variant == Variant.IGA and self.fixed_crossover is None

    def crossover_for(self, gene: Crossover) -> Crossover:
        if self.self_selecting:
            return gene
        return self.fixed_crossover if self.fixed_crossover is not None else Crossover.PUX


@dataclass(slots=True)
class RatedGenome:
    genome: Genome
    fitness: int
    birth_index: int
    rank: int = 0


@dataclass
class RunResult:
    best_solution: Solution
    best_cost: int
    generations_run: int
    evaluations: int
    elapsed: float
    best_genome: Genome
    crossover_usage: list[dict[str, int]] = field(default_factory=list)
    best_history: list[int] = field(default_factory=list)


def rank_population(members: Sequence[RatedGenome]) -> list[RatedGenome]:
    """Sort best-first and assign ranks N..1 (ties: lower birth index ranks higher)."""
    ordered = sorted(members, key=lambda r: (r.fitness, r.birth_index))
    size = len(ordered)
    for pos, member in enumerate(ordered):
        member.rank = size - pos
    return ordered


def rank_select(
    population: Sequence[RatedGenome], rng: random.Random, cum_weights: Sequence[int] | None = None
) -> RatedGenome:
    """Roulette draw with probability proportional to rank.

    ``cum_weights`` may be passed to reuse the cumulative rank sums of an
    unchanged population.
    """
    if not population:
        raise ValueError("cannot select from an empty population")
    if cum_weights is None:
        cum_weights = list(itertools.accumulate(m.rank for m in population))
    return rng.choices(population, cum_weights=cum_weights, k=1)[0]


def crossover_onepoint(p1: Sequence[int], p2: Sequence[int], rng: random.Random, cut: int | None = None):
    """Order-based one-point crossover: keep a prefix, fill in the other parent's order."""
    m = len(p1)
    if m < 2:
        return tuple(p1), tuple(p2)
    if cut is None:
        cut = rng.randint(1, m - 1)

    def child(head_parent, fill_parent):
        head = head_parent[:cut]
        used = set(head)
        return tuple(head) + tuple(g for g in fill_parent if g not in used)

    return child(p1, p2), child(p2, p1)


def _pmx_child(seg_parent, fill_parent, lo: int, hi: int) -> tuple[int, ...]:
    child = list(fill_parent)
    segment = seg_parent[lo:hi]
    child[lo:hi] = segment
    pos_in_seg = {g: lo + k for k, g in enumerate(segment)}
    for idx in itertools.chain(range(lo), range(hi, len(child))):
        g = fill_parent[idx]
        while g in pos_in_seg:
            g = fill_parent[pos_in_seg[g]]
        child[idx] = g
    return tuple(child)


def crossover_pmx(
    p1: Sequence[int], p2: Sequence[int], rng: random.Random, cuts: tuple[int, int] | None = None
):
    """Partially mapped crossover.

    ``cuts = (lo, hi)`` copies slice ``[lo, hi)`` from the first parent; the
    other positions take the second parent's gene, chased through the
    segment mapping until it no longer clashes.
    """
    m = len(p1)
    if cuts is None:
        if m < 2:
            return tuple(p1), tuple(p2)
        lo, hi = sorted(rng.sample(range(m + 1), 2))
    else:
        lo, hi = cuts
    return _pmx_child(p1, p2, lo, hi), _pmx_child(p2, p1, lo, hi)


def crossover_pux(
    p1: Sequence[int], p2: Sequence[int], bias: float, rng: random.Random, mask: Sequence[bool] | None = None
):
    """Permutation uniform-like crossover.

    A biased mask (P(keep) = ``bias``) fixes genes of one parent at their
    absolute positions; the gaps are filled with the missing genes in the
    other parent's relative order.
    """
    m = len(p1)
    if mask is None:
        mask = [rng.random() < bias for _ in range(m)]

    def child(keep_parent, fill_parent):
        kept = {g for g, k in zip(keep_parent, mask) if k}
        fill = iter([g for g in fill_parent if g not in kept])
        return tuple(g if k else next(fill) for g, k in zip(keep_parent, mask))

    return child(p1, p2), child(p2, p1)


def cross_auxiliary(p1: RatedGenome, p2: RatedGenome) -> tuple[tuple[float, ...], Crossover]:
    """Rank-weighted average of the weights; crossover gene of the higher-ranked parent."""
    r1, r2 = p1.rank, p2.rank
    total = r1 + r2
    weights = tuple(
        (r1 * a + r2 * b) / total for a, b in zip(p1.genome.weights, p2.genome.weights)
    )
    gene = p1.genome.crossover if r1 >= r2 else p2.genome.crossover
    return weights, gene


class _Evaluator:
    def __init__(self, instance: Instance, variant: Variant, table: CostRankTable):
        self.variant = int(variant)
        self.a = table.arrays
        self.count = 0

    def __call__(self, genomes: Sequence[Genome]) -> list[int]:
        perms = np.array([g.perm for g in genomes], dtype=np.int64)
        weights = np.array([g.weights for g in genomes], dtype=np.float64)
        a = self.a
        costs = population_costs(perms, weights, self.variant, a.row_ptr, a.row_cols, a.row_ranks,
                                 a.col_ptr, a.col_rows, a.costs, a.col_rank_sum)
        self.count += len(genomes)
        return costs.tolist()


def run(instance: Instance, config: GaConfig, rank_table: CostRankTable | None = None) -> RunResult:
    """One seeded GA run until the best cost stalls for ``config.stall_limit`` generations."""
    start = time.perf_counter()
    rng = random.Random(config.seed)
    table = rank_table if rank_table is not None else cost_rank_table(instance)
    evaluate = _Evaluator(instance, config.variant, table)
    m = instance.num_rows
    size = config.population_size
    fixed = tuple(float(w) for w in config.fixed_weights) if config.fixed_weights else None

    genomes = [random_genome(m, config.weight_range, rng) for _ in range(size)]
    if fixed is not None:
        genomes = [replace(g, weights=fixed) for g in genomes]
    births = itertools.count()
    population = [RatedGenome(g, f, next(births)) for g, f in zip(genomes, evaluate(genomes))]
    population = rank_population(population)

    best = population[0]
    history = [best.fitness]
    usage: list[dict[str, int]] = []
    stall = 0
    generation = 0
    elites = config.elite_count
    n_children = size - elites
    ops = {
        Crossover.ONE_POINT: lambda a, b: crossover_onepoint(a, b, rng),
        Crossover.PUX: lambda a, b: crossover_pux(a, b, config.pux_bias, rng),
        Crossover.PMX: lambda a, b: crossover_pmx(a, b, rng),
    }

    while stall < config.stall_limit and generation < config.max_generations:
        cum = list(itertools.accumulate(member.rank for member in population))
        children: list[Genome] = []
        counts = {c.label: 0 for c in Crossover}
        while len(children) < n_children:
            p1 = rank_select(population, rng, cum)
            p2 = rank_select(population, rng, cum)
            weights, gene = cross_auxiliary(p1, p2)
            op = config.crossover_for(gene)
            counts[op.label] += 1
            for perm in ops[op](p1.genome.perm, p2.genome.perm)[: n_children - len(children)]:
                child = Genome(perm, weights, gene)
                child = swap_mutate(child, config.mutation_rate, rng)
                child = mutate_auxiliary(child, config.mutation_rate, config.weight_range, rng)
                if fixed is not None:
                    child = replace(child, weights=fixed)
                children.append(child)

        offspring = [RatedGenome(g, f, next(births)) for g, f in zip(children, evaluate(children))]
        population = rank_population(population[:elites] + offspring)
        generation += 1
        usage.append(counts)
        history.append(population[0].fitness)
        if population[0].fitness < best.fitness:
            best = population[0]
            stall = 0
        else:
            stall += 1
        log.debug("generation %d best %d stall %d usage %s", generation, best.fitness, stall, counts)

    solution, cost = fitness(instance, best.genome, config.variant, table)
    assert cost == best.fitness
    return RunResult(
        best_solution=solution,
        best_cost=cost,
        generations_run=generation,
        evaluations=evaluate.count,
        elapsed=time.perf_counter() - start,
        best_genome=best.genome,
        crossover_usage=usage,
        best_history=history,
    )
