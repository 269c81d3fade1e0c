"""GA representation: a row permutation plus self-adaptive auxiliary genes."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, replace

NUM_WEIGHTS = 4
DEFAULT_WEIGHT_RANGE = (0.0, 100.0)


class Crossover(enum.IntEnum):
    """Crossover operator carried in the selector gene."""

    ONE_POINT = 1
    PUX = 2
    PMX = 3

    @classmethod
    def parse(cls, text: str) -> "Crossover":
        key = text.strip().lower().replace("-", "").replace("_", "")
        aliases = {"1point": cls.ONE_POINT, "onepoint": cls.ONE_POINT, "pux": cls.PUX, "pmx": cls.PMX}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown crossover {text!r}; expected one of 1point, pux, pmx") from None

    @property
    def label(self) -> str:
        return {Crossover.ONE_POINT: "1point", Crossover.PUX: "pux", Crossover.PMX: "pmx"}[self]


@dataclass(frozen=True)
class Genome:
    """Row visiting order, score weights (w1..w4) and crossover selector.

    ``weights[0]`` scales the cost criterion, ``weights[1]`` new coverage,
    ``weights[2]`` total coverage and ``weights[3]`` overlap with rows that
    are already covered.
    """

    perm: tuple[int, ...]
    weights: tuple[float, float, float, float]
    crossover: Crossover = Crossover.PUX

    def __post_init__(self) -> None:
        if len(self.weights) != NUM_WEIGHTS:
            raise ValueError(f"expected {NUM_WEIGHTS} weights, got {len(self.weights)}")


def is_permutation(perm, m: int | None = None) -> bool:
    m = len(perm) if m is None else m
    return len(perm) == m and sorted(perm) == list(range(m))


def random_weights(weight_range: tuple[float, float], rng: random.Random) -> tuple[float, float, float, float]:
    lo, hi = weight_range
    return tuple(rng.uniform(lo, hi) for _ in range(NUM_WEIGHTS))  # type: ignore[return-value]


def random_genome(m: int, weight_range: tuple[float, float], rng: random.Random) -> Genome:
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    perm = list(range(m))
    rng.shuffle(perm)  # Fisher-Yates
    weights = random_weights(weight_range, rng)
    gene = Crossover(rng.randint(1, 3))
    return Genome(tuple(perm), weights, gene)


def swap_mutate(genome: Genome, rate: float, rng: random.Random) -> Genome:
    """With probability ``rate`` exchange two distinct positions of the permutation."""
    m = len(genome.perm)
    if m < 2 or rng.random() >= rate:
        return genome
    a, b = rng.sample(range(m), 2)
    perm = list(genome.perm)
    perm[a], perm[b] = perm[b], perm[a]
    return replace(genome, perm=tuple(perm))


def mutate_auxiliary(
    genome: Genome, rate: float, weight_range: tuple[float, float], rng: random.Random
) -> Genome:
    """Reset each weight, and the crossover gene, independently with probability ``rate``."""
    lo, hi = weight_range
    weights = list(genome.weights)
    changed = False
    for k in range(NUM_WEIGHTS):
        if rng.random() < rate:
            weights[k] = rng.uniform(lo, hi)
            changed = True
    gene = genome.crossover
    if rng.random() < rate:
        gene = Crossover(rng.randint(1, 3))
        changed = True
    if not changed:
        return genome
    return replace(genome, weights=tuple(weights), crossover=gene)
