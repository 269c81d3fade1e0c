"""Indirect genetic algorithm for the set covering problem."""

from .bench import BenchReport, BenchSpec, brute_force_optimum, run_bench, summarize
from .decoder import CostRankTable, ScoreTerms, Variant, cost_rank_table, decode, score
from .evolution import GaConfig, RunResult, run
from .genome import Crossover, Genome, random_genome
from .hill_climber import fitness, remove_redundant
from .instance import (
    Instance,
    InstanceFormatError,
    Solution,
    evaluate,
    generate_random,
    load_instance,
    parse_orlib,
    serialize_orlib,
)

__all__ = [
    "BenchReport",
    "BenchSpec",
    "CostRankTable",
    "Crossover",
    "GaConfig",
    "Genome",
    "Instance",
    "InstanceFormatError",
    "RunResult",
    "ScoreTerms",
    "Solution",
    "Variant",
    "brute_force_optimum",
    "cost_rank_table",
    "decode",
    "evaluate",
    "fitness",
    "generate_random",
    "load_instance",
    "parse_orlib",
    "random_genome",
    "remove_redundant",
    "run",
    "run_bench",
    "score",
    "serialize_orlib",
    "summarize",
]
