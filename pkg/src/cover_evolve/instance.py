"""Set covering instances, solutions and the OR-Library text format.

An instance is a sparse 0-1 matrix kept in both orientations: for every row
the sorted columns that cover it, and for every column the sorted rows it
covers. Indices are 0-based everywhere except in the OR-Library files, which
are translated on the way in and out.
"""

from __future__ import annotations

import gzip
import random
from dataclasses import dataclass, field
from os import PathLike
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class InstanceFormatError(ValueError):
    """Raised when instance text or data is malformed."""


def transpose(lists: Sequence[Sequence[int]], size: int) -> tuple[tuple[int, ...], ...]:
    """Flip an adjacency list: ``i in result[j]`` iff ``j in lists[i]``."""
    out: list[list[int]] = [[] for _ in range(size)]
    for i, items in enumerate(lists):
        for j in items:
            out[j].append(i)
    return tuple(tuple(x) for x in out)


@dataclass(frozen=True, eq=False)
class Instance:
    """Immutable set covering instance.

    ``cols_of_row[i]`` lists the columns covering row ``i``; ``rows_of_col`` is
    derived from it. Construction validates coverability, index ranges,
    duplicates and costs.
    """

    costs: tuple[int, ...]
    cols_of_row: tuple[tuple[int, ...], ...]
    name: str = ""
    rows_of_col: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        costs = tuple(int(c) for c in self.costs)
        rows = tuple(tuple(int(j) for j in r) for r in self.cols_of_row)
        n, m = len(costs), len(rows)
        if m < 1 or n < 1:
            raise InstanceFormatError(f"need at least one row and one column, got m={m}, n={n}")
        for j, c in enumerate(costs):
            if c < 1:
                raise InstanceFormatError(f"column {j}: cost must be positive, got {c}")
        for i, cols in enumerate(rows):
            if not cols:
                raise InstanceFormatError(f"row {i} is not covered by any column")
            for j in cols:
                if not 0 <= j < n:
                    raise InstanceFormatError(f"row {i}: column index {j} out of range [0, {n})")
            if len(set(cols)) != len(cols):
                raise InstanceFormatError(f"row {i}: duplicate column index")
        rows = tuple(tuple(sorted(r)) for r in rows)
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "cols_of_row", rows)
        object.__setattr__(self, "rows_of_col", transpose(rows, n))

    @property
    def num_rows(self) -> int:
        return len(self.cols_of_row)

    @property
    def num_cols(self) -> int:
        return len(self.costs)

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.cols_of_row)

    @property
    def density(self) -> float:
        """Fraction of nonzero cells, i.e. mean share of rows covered per column."""
        return self.nnz / (self.num_rows * self.num_cols)

    @classmethod
    def from_columns(
        cls, costs: Sequence[int], rows_of_col: Sequence[Iterable[int]], num_rows: int, name: str = ""
    ) -> "Instance":
        """Build an instance from column-wise coverage."""
        rows: list[list[int]] = [[] for _ in range(num_rows)]
        for j, col in enumerate(rows_of_col):
            for i in col:
                if not 0 <= i < num_rows:
                    raise InstanceFormatError(f"column {j}: row index {i} out of range [0, {num_rows})")
                rows[i].append(j)
        return cls(tuple(costs), tuple(tuple(r) for r in rows), name=name)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return self.costs == other.costs and self.cols_of_row == other.cols_of_row

    def __hash__(self) -> int:
        return hash((self.costs, self.cols_of_row))

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<Instance{label} {self.num_rows}x{self.num_cols} density={self.density:.3f}>"


@dataclass(frozen=True)
class Solution:
    """A set of chosen columns with its per-row cover counts and total cost."""

    chosen: tuple[int, ...]
    cover_count: tuple[int, ...]
    cost: int

    @property
    def feasible(self) -> bool:
        return all(c >= 1 for c in self.cover_count)

    def __len__(self) -> int:
        return len(self.chosen)


def evaluate(instance: Instance, chosen: Iterable[int]) -> Solution:
    """Cost and cover counts of a column selection."""
    cols = sorted(set(int(j) for j in chosen))
    n = instance.num_cols
    counts = [0] * instance.num_rows
    cost = 0
    for j in cols:
        if not 0 <= j < n:
            raise IndexError(f"column index {j} out of range [0, {n})")
        cost += instance.costs[j]
        for i in instance.rows_of_col[j]:
            counts[i] += 1
    return Solution(tuple(cols), tuple(counts), cost)


def parse_orlib(text: str | bytes, name: str = "") -> Instance:
    """Parse the OR-Library SCP layout (sets 4-6, A-H).

    Tokens: ``m n``, then ``n`` costs, then per row a count ``k`` followed by
    ``k`` 1-based column indices.
    """
    if isinstance(text, bytes):
        text = text.decode("ascii", errors="replace")
    tokens = text.split()
    pos = 0

    def take(what: str) -> int:
        nonlocal pos
        if pos >= len(tokens):
            raise InstanceFormatError(f"truncated input: expected {what} at token {pos + 1}")
        tok = tokens[pos]
        try:
            value = int(tok)
        except ValueError:
            raise InstanceFormatError(f"token {pos + 1} ({what}): not an integer: {tok!r}") from None
        pos += 1
        return value

    m = take("row count")
    n = take("column count")
    if m < 1 or n < 1:
        raise InstanceFormatError(f"header: row and column counts must be positive, got {m} {n}")
    costs = []
    for j in range(n):
        c = take(f"cost of column {j + 1}")
        if c < 1:
            raise InstanceFormatError(f"token {pos}: cost of column {j + 1} must be positive, got {c}")
        costs.append(c)
    rows = []
    for i in range(m):
        k = take(f"cover count of row {i + 1}")
        if k < 1:
            raise InstanceFormatError(f"token {pos}: row {i + 1} has no covering columns")
        cols = []
        seen = set()
        for _ in range(k):
            j = take(f"column index for row {i + 1}")
            if not 1 <= j <= n:
                raise InstanceFormatError(f"token {pos}: row {i + 1}: column index {j} out of range [1, {n}]")
            if j in seen:
                raise InstanceFormatError(f"token {pos}: row {i + 1}: duplicate column index {j}")
            seen.add(j)
            cols.append(j - 1)
        rows.append(cols)
    if pos != len(tokens):
        raise InstanceFormatError(f"unexpected trailing data at token {pos + 1}: {tokens[pos]!r}")
    return Instance(tuple(costs), tuple(tuple(r) for r in rows), name=name)


def serialize_orlib(instance: Instance, per_line: int = 12) -> str:
    """Write an instance in OR-Library layout (1-based column indices)."""

    def block(values: Sequence[int]) -> list[str]:
        return [" " + " ".join(map(str, values[k:k + per_line])) for k in range(0, len(values), per_line)]

    lines = [f" {instance.num_rows} {instance.num_cols}"]
    lines += block(instance.costs)
    for cols in instance.cols_of_row:
        lines.append(f" {len(cols)}")
        lines += block([j + 1 for j in cols])
    return "\n".join(lines) + "\n"


def load_instance(path: str | PathLike) -> Instance:
    """Read an OR-Library file; ``.gz`` files are decompressed transparently."""
    p = Path(path)
    if p.suffix == ".gz":
        with gzip.open(p, "rb") as fh:
            data = fh.read()
        return parse_orlib(data, name=Path(p.stem).stem)
    return parse_orlib(p.read_bytes(), name=p.stem)


def generate_random(
    m: int,
    n: int,
    density: float,
    cost_range: tuple[int, int] = (1, 100),
    seed: int = 0,
) -> Instance:
    """Random instance: each cell set with probability ``density``.

    Rows left uncovered get one uniformly chosen column. Costs are uniform
    integers in the inclusive ``cost_range``.
    """
    if m < 1 or n < 1:
        raise ValueError(f"m and n must be positive, got m={m}, n={n}")
    if not 0 < density <= 1:
        raise ValueError(f"density must be in (0, 1], got {density}")
    lo, hi = cost_range
    if lo > hi:
        raise ValueError(f"empty cost range [{lo}, {hi}]")
    if lo < 1:
        raise ValueError(f"costs must be positive, got range [{lo}, {hi}]")
    rng = random.Random(seed)
    rows = []
    for _ in range(m):
        cols = [j for j in range(n) if rng.random() < density]
        if not cols:
            cols = [rng.randrange(n)]
        rows.append(tuple(cols))
    costs = tuple(rng.randint(lo, hi) for _ in range(n))
    return Instance(costs, tuple(rows), name=f"rand{m}x{n}-s{seed}")


def as_csr(lists: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    """Pack a list of index lists into (offsets, flat indices) arrays."""
    ptr = np.zeros(len(lists) + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(x) for x in lists])
    flat = np.fromiter((j for x in lists for j in x), dtype=np.int64, count=int(ptr[-1]))
    return ptr, flat
