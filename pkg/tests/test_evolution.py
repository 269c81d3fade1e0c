import random
from collections import Counter
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cover_evolve.decoder import Variant
from cover_evolve.evolution import (
    GaConfig,
    RatedGenome,
    cross_auxiliary,
    crossover_onepoint,
    crossover_pmx,
    crossover_pux,
    rank_population,
    rank_select,
    run,
)
from cover_evolve.genome import Crossover, Genome, is_permutation
from cover_evolve.hill_climber import fitness
from cover_evolve.instance import generate_random

from .conftest import instances


def rated(weights=(0, 0, 0, 0), gene=Crossover.PUX, fit=0, birth=0, rank=1):
    return RatedGenome(Genome((0,), tuple(float(w) for w in weights), gene), fit, birth, rank)


def pmx_by_swaps(p1, p2, lo, hi):
    """PMX as a sequence of swaps inside a copy of the second parent."""
    child = list(p2)
    for k in range(lo, hi):
        idx = child.index(p1[k])
        child[k], child[idx] = child[idx], child[k]
    return tuple(child)


# --- ranking and selection ------------------------------------------------


def test_rank_population_orders_and_breaks_ties_by_birth():
    members = [rated(fit=5, birth=0), rated(fit=3, birth=1), rated(fit=5, birth=2), rated(fit=3, birth=3)]
    ordered = rank_population(members)
    assert [(m.fitness, m.birth_index, m.rank) for m in ordered] == [
        (3, 1, 4), (3, 3, 3), (5, 0, 2), (5, 2, 1)
    ]


def test_rank_select_single_member():
    pop = rank_population([rated()])
    rng = random.Random(0)
    assert all(rank_select(pop, rng) is pop[0] for _ in range(20))


def test_rank_select_empty():
    with pytest.raises(ValueError):
        rank_select([], random.Random(0))


def test_rank_probabilities_for_population_200():
    total = sum(range(1, 201))
    assert total == 20100
    assert 200 / total == pytest.approx(0.00995, abs=1e-5)
    assert (200 / total) / (100 / total) == 2


def test_rank_select_frequencies():
    pop = rank_population([rated(fit=f, birth=f) for f in range(4)])
    rng = random.Random(123)
    draws = Counter(rank_select(pop, rng).rank for _ in range(100_000))
    for rank in (4, 3, 2, 1):
        assert abs(draws[rank] / 100_000 - rank / 10) <= 0.02


def test_rank_select_with_precomputed_cumulative_matches():
    pop = rank_population([rated(fit=f, birth=f) for f in range(6)])
    cum = [6, 11, 15, 18, 20, 21]
    r1, r2 = random.Random(5), random.Random(5)
    a = [rank_select(pop, r1).birth_index for _ in range(200)]
    b = [rank_select(pop, r2, cum).birth_index for _ in range(200)]
    assert a == b


# --- crossovers -----------------------------------------------------------


def test_onepoint_example():
    c1, c2 = crossover_onepoint((1, 2, 3, 4), (4, 3, 2, 1), random.Random(0), cut=2)
    assert c1 == (1, 2, 4, 3)
    assert c2 == (4, 3, 1, 2)


def test_pmx_example():
    p1, p2 = (1, 2, 3, 4, 5), (3, 4, 5, 1, 2)
    c1, c2 = crossover_pmx(p1, p2, random.Random(0), cuts=(1, 4))
    assert c1 == (5, 2, 3, 4, 1)
    assert c2 == (2, 4, 5, 1, 3)
    assert c1 == pmx_by_swaps(p1, p2, 1, 4)
    assert c2 == pmx_by_swaps(p2, p1, 1, 4)


def test_pux_example():
    c1, c2 = crossover_pux((1, 2, 3, 4), (4, 3, 2, 1), 0.66, random.Random(0), mask=(1, 0, 1, 0))
    assert c1 == (1, 4, 3, 2)
    assert c2 == (4, 1, 2, 3)


def test_pux_full_mask_copies_parents():
    p1, p2 = (2, 0, 1, 3), (3, 1, 0, 2)
    assert crossover_pux(p1, p2, 0.5, random.Random(0), mask=(1, 1, 1, 1)) == (p1, p2)


@pytest.mark.parametrize("op", ["onepoint", "pmx", "pux"])
def test_identical_parents_give_identical_children(op):
    p = (4, 2, 0, 1, 3)
    rng = random.Random(8)
    fn = {
        "onepoint": lambda: crossover_onepoint(p, p, rng),
        "pmx": lambda: crossover_pmx(p, p, rng),
        "pux": lambda: crossover_pux(p, p, 0.66, rng),
    }[op]
    for _ in range(20):
        assert fn() == (p, p)


def test_crossovers_keep_permutations_on_random_pairs():
    rng = random.Random(77)
    for _ in range(1000):
        m = rng.randint(1, 30)
        p1 = rng.sample(range(m), m)
        p2 = rng.sample(range(m), m)
        for children in (
            crossover_onepoint(p1, p2, rng),
            crossover_pmx(p1, p2, rng),
            crossover_pux(p1, p2, 0.66, rng),
        ):
            assert all(is_permutation(c, m) for c in children)


@given(st.permutations(range(9)), st.permutations(range(9)), st.integers(0, 9), st.integers(0, 9))
def test_pmx_matches_swap_reference(p1, p2, a, b):
    lo, hi = min(a, b), max(a, b)
    c1, c2 = crossover_pmx(p1, p2, random.Random(0), cuts=(lo, hi))
    assert c1 == pmx_by_swaps(p1, p2, lo, hi)
    assert c2 == pmx_by_swaps(p2, p1, lo, hi)


@given(st.permutations(range(10)), st.permutations(range(10)), st.lists(st.booleans(), min_size=10, max_size=10))
def test_pux_keeps_masked_positions(p1, p2, mask):
    c1, c2 = crossover_pux(p1, p2, 0.5, random.Random(0), mask=mask)
    for k, keep in enumerate(mask):
        if keep:
            assert c1[k] == p1[k] and c2[k] == p2[k]
    # gaps follow the other parent's relative order
    gaps1 = [c1[k] for k in range(10) if not mask[k]]
    assert gaps1 == [g for g in p2 if g in set(gaps1)]


# --- auxiliary genes ------------------------------------------------------


def test_cross_auxiliary_equal_ranks_average():
    w, _ = cross_auxiliary(rated((10, 30, 15, 0), rank=5), rated((20, 10, 15, 0), rank=5))
    assert w == (15, 20, 15, 0)


def test_cross_auxiliary_rank_weighting():
    a, b = (9.0, 3.0, 0.0, 6.0), (0.0, 6.0, 3.0, 3.0)
    w, _ = cross_auxiliary(rated(a, rank=8), rated(b, rank=4))
    assert w == pytest.approx(tuple((2 * x + y) / 3 for x, y in zip(a, b)))


def test_cross_auxiliary_gene_from_fitter_parent():
    fitter = rated(gene=Crossover.PMX, rank=7)
    other = rated(gene=Crossover.ONE_POINT, rank=2)
    assert cross_auxiliary(fitter, other)[1] is Crossover.PMX
    assert cross_auxiliary(other, fitter)[1] is Crossover.PMX
    tie = rated(gene=Crossover.PUX, rank=7)
    assert cross_auxiliary(tie, fitter)[1] is Crossover.PUX


# --- configuration --------------------------------------------------------


def test_config_defaults():
    c = GaConfig()
    assert (c.population_size, c.elite_fraction, c.mutation_rate, c.pux_bias, c.stall_limit) == (
        200, 0.2, 0.015, 0.66, 50
    )
    assert c.elite_count == 40
    assert c.weight_range == (0.0, 100.0)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"population_size": 1},
        {"elite_fraction": 0.0},
        {"elite_fraction": 1.0},
        {"mutation_rate": 1.5},
        {"pux_bias": 1.0},
        {"stall_limit": 0},
        {"max_generations": 0},
        {"fixed_weights": (1, 2, 3)},
        {"fixed_weights": (1, 2, 3, -1)},
    ],
)
def test_config_rejects(kwargs):
    with pytest.raises(ValueError):
        GaConfig(**kwargs)


def test_crossover_choice_by_variant():
    assert GaConfig(variant=Variant.BASIC).crossover_for(Crossover.PMX) is Crossover.PUX
    assert GaConfig(variant=Variant.IGA).crossover_for(Crossover.PMX) is Crossover.PMX
    pinned = GaConfig(variant=Variant.IGA, fixed_crossover=Crossover.ONE_POINT)
    assert pinned.crossover_for(Crossover.PMX) is Crossover.ONE_POINT
    assert GaConfig(elite_fraction=0.001, population_size=2).elite_count == 1


# --- whole runs -----------------------------------------------------------

SMALL = GaConfig(population_size=30, stall_limit=8, seed=3)


def test_dominant_instance_solved_immediately(dominant):
    result = run(dominant, GaConfig(population_size=20, stall_limit=5, seed=1))
    assert result.best_cost == 1
    assert result.best_history[0] == 1
    assert result.generations_run == 5
    assert result.best_solution.chosen == (0,)


def test_run_is_deterministic():
    inst = generate_random(15, 25, 0.2, seed=4)
    a, b = run(inst, SMALL), run(inst, SMALL)
    assert (a.best_cost, a.best_solution, a.best_genome, a.generations_run, a.evaluations) == (
        b.best_cost, b.best_solution, b.best_genome, b.generations_run, b.evaluations
    )
    assert a.crossover_usage == b.crossover_usage
    assert a.best_history == b.best_history


@given(instances(max_rows=12, max_cols=16), st.integers(0, 1000), st.sampled_from(list(Variant)))
@settings(max_examples=25, deadline=None)
def test_run_invariants(inst, seed, variant):
    config = replace(SMALL, seed=seed, variant=variant)
    result = run(inst, config)
    hist = result.best_history
    assert all(b <= a for a, b in zip(hist, hist[1:]))
    assert result.best_cost == hist[-1] == result.best_solution.cost
    assert result.best_solution.feasible
    sol, cost = fitness(inst, result.best_genome, variant)
    assert sol == result.best_solution
    # stop exactly stall_limit generations after the last strict improvement
    last_improvement = max(k for k in range(len(hist)) if k == 0 or hist[k] < hist[k - 1])
    assert result.generations_run == last_improvement + config.stall_limit
    children = config.population_size - config.elite_count
    assert result.evaluations == config.population_size + result.generations_run * children
    pairings = -(-children // 2)
    assert all(sum(u.values()) == pairings for u in result.crossover_usage)
    assert len(result.crossover_usage) == result.generations_run
    if variant != Variant.IGA:
        assert all(u["pux"] == pairings for u in result.crossover_usage)


def test_iga_uses_several_crossovers():
    inst = generate_random(30, 60, 0.1, seed=9)
    result = run(inst, replace(SMALL, population_size=60))
    total = Counter()
    for u in result.crossover_usage:
        total.update(u)
    assert sum(v > 0 for v in total.values()) >= 2


def test_fixed_weights_are_frozen():
    inst = generate_random(15, 25, 0.2, seed=2)
    result = run(inst, replace(SMALL, fixed_weights=(1.0, 2.0, 3.0, 4.0)))
    assert result.best_genome.weights == (1.0, 2.0, 3.0, 4.0)


def test_max_generations_caps_run():
    inst = generate_random(15, 25, 0.2, seed=2)
    result = run(inst, replace(SMALL, stall_limit=1000, max_generations=3))
    assert result.generations_run == 3


def test_odd_child_count():
    inst = generate_random(10, 15, 0.3, seed=2)
    config = GaConfig(population_size=7, elite_fraction=0.2, stall_limit=3, seed=0)
    assert config.elite_count == 2
    result = run(inst, config)
    assert result.evaluations == 7 + 5 * result.generations_run
