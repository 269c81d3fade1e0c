"""Permutation decoder: turns a genome into a feasible cover.

Rows are visited in genome order. For each row that is still uncovered,
every column covering it is scored and the best one is added (ties go to
the lowest column index). Coverage-dependent terms are maintained
incrementally so a decode costs O(nnz) plus the candidate scans.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numba
import numpy as np

from .genome import Genome
from .instance import Instance, Solution, as_csr


class Variant(enum.IntEnum):
    BASIC = 0
    NEW_COST = 1
    FOUR_CRITERIA = 2
    IGA = 3

    @classmethod
    def parse(cls, text: str) -> "Variant":
        key = text.strip().lower().replace("-", "").replace("_", "").replace(" ", "")
        aliases = {
            "basic": cls.BASIC,
            "newcost": cls.NEW_COST,
            "4criteria": cls.FOUR_CRITERIA,
            "fourcriteria": cls.FOUR_CRITERIA,
            "iga": cls.IGA,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown variant {text!r}; expected basic, newcost, 4criteria or iga") from None

    @property
    def label(self) -> str:
        return ("basic", "newcost", "4criteria", "iga")[self]


@dataclass(frozen=True)
class ScoreTerms:
    """Criteria for one candidate column at one decoding step.

    ``c1`` raw cost, ``c1a``/``c1b`` mean cost rank over the uncovered /
    all rows the column covers, ``c2`` uncovered rows covered, ``c3`` rows
    covered, ``c4a`` rows covered that are already covered.
    """

    c1: float
    c1a: float
    c1b: float
    c2: int
    c3: int
    c4a: int


def score(terms: ScoreTerms, weights, variant: Variant) -> float:
    w1, w2, w3 = weights[0], weights[1], weights[2]
    s = w2 * terms.c2 + w3 * terms.c3
    if variant == Variant.BASIC:
        s -= w1 * terms.c1
    else:
        s -= w1 * (terms.c1a + terms.c1b)
    if variant >= Variant.FOUR_CRITERIA:
        s += weights[3] * terms.c4a
    return s


def competition_ranks(values) -> list[int]:
    """1-based ranks where equal values share the smallest rank ("1, 2, 2, 4")."""
    order = sorted(range(len(values)), key=lambda k: values[k])
    ranks = [0] * len(values)
    for pos, k in enumerate(order):
        if pos > 0 and values[k] == values[order[pos - 1]]:
            ranks[k] = ranks[order[pos - 1]]
        else:
            ranks[k] = pos + 1
    return ranks


@dataclass(frozen=True, eq=False)
class CostRankTable:
    """Per-row cost ranks of the covering columns.

    ``ranks[i][k]`` is the rank of column ``instance.cols_of_row[i][k]``
    among the columns covering row ``i`` (1 = cheapest).
    """

    instance: Instance = field(repr=False)
    ranks: tuple[tuple[int, ...], ...] = field(repr=False)

    def rank_of(self, row: int, col: int) -> int:
        cols = self.instance.cols_of_row[row]
        k = cols.index(col)
        return self.ranks[row][k]

    @cached_property
    def col_rank_sum(self) -> tuple[int, ...]:
        sums = [0] * self.instance.num_cols
        for cols, rks in zip(self.instance.cols_of_row, self.ranks):
            for j, r in zip(cols, rks):
                sums[j] += r
        return tuple(sums)

    def mean_rank(self, col: int) -> float:
        """Mean cost rank of ``col`` over all rows it covers."""
        return self.col_rank_sum[col] / len(self.instance.rows_of_col[col])

    @cached_property
    def arrays(self) -> "DecodeArrays":
        return DecodeArrays.build(self)


def cost_rank_table(instance: Instance) -> CostRankTable:
    ranks = tuple(
        tuple(competition_ranks([instance.costs[j] for j in cols])) for cols in instance.cols_of_row
    )
    return CostRankTable(instance, ranks)


@dataclass(frozen=True, eq=False)
class DecodeArrays:
    """Flat array view of an instance and its rank table for the kernels."""

    row_ptr: np.ndarray
    row_cols: np.ndarray
    row_ranks: np.ndarray
    col_ptr: np.ndarray
    col_rows: np.ndarray
    costs: np.ndarray
    col_rank_sum: np.ndarray

    @classmethod
    def build(cls, table: CostRankTable) -> "DecodeArrays":
        inst = table.instance
        row_ptr, row_cols = as_csr(inst.cols_of_row)
        _, row_ranks = as_csr(table.ranks)
        col_ptr, col_rows = as_csr(inst.rows_of_col)
        return cls(
            row_ptr,
            row_cols,
            row_ranks,
            col_ptr,
            col_rows,
            np.asarray(inst.costs, dtype=np.int64),
            np.asarray(table.col_rank_sum, dtype=np.int64),
        )


@numba.njit(cache=True)
def decode_kernel(perm, weights, variant, row_ptr, row_cols, row_ranks, col_ptr, col_rows, costs,
                  col_rank_sum, chosen, cover):
    """Fill ``chosen`` (bool[n]) and ``cover`` (int[m], zeroed) for one genome."""
    n = costs.shape[0]
    w1 = weights[0]
    w2 = weights[1]
    w3 = weights[2]
    w4 = weights[3]
    unc_count = np.empty(n, dtype=np.int64)
    for j in range(n):
        unc_count[j] = col_ptr[j + 1] - col_ptr[j]
    unc_rank_sum = col_rank_sum.copy()
    for p in range(perm.shape[0]):
        i = perm[p]
        if cover[i] > 0:
            continue
        best = -np.inf
        best_j = -1
        for k in range(row_ptr[i], row_ptr[i + 1]):
            j = row_cols[k]
            c2 = unc_count[j]
            c3 = col_ptr[j + 1] - col_ptr[j]
            s = w2 * c2 + w3 * c3
            if variant == 0:
                s -= w1 * costs[j]
            else:
                s -= w1 * (unc_rank_sum[j] / c2 + col_rank_sum[j] / c3)
            if variant >= 2:
                s += w4 * (c3 - c2)
            if best_j < 0 or s > best:
                best = s
                best_j = j
        chosen[best_j] = True
        for q in range(col_ptr[best_j], col_ptr[best_j + 1]):
            r = col_rows[q]
            if cover[r] == 0:
                for k in range(row_ptr[r], row_ptr[r + 1]):
                    jj = row_cols[k]
                    unc_count[jj] -= 1
                    unc_rank_sum[jj] -= row_ranks[k]
            cover[r] += 1


def decode(instance: Instance, genome: Genome, variant: Variant, rank_table: CostRankTable | None = None) -> Solution:
    """Decode ``genome`` into a feasible (not yet hill-climbed) solution."""
    if rank_table is None:
        rank_table = cost_rank_table(instance)
    a = rank_table.arrays
    chosen = np.zeros(instance.num_cols, dtype=np.bool_)
    cover = np.zeros(instance.num_rows, dtype=np.int64)
    decode_kernel(
        np.asarray(genome.perm, dtype=np.int64),
        np.asarray(genome.weights, dtype=np.float64),
        int(variant),
        a.row_ptr, a.row_cols, a.row_ranks, a.col_ptr, a.col_rows, a.costs, a.col_rank_sum,
        chosen, cover,
    )
    cols = tuple(int(j) for j in np.flatnonzero(chosen))
    return Solution(cols, tuple(int(c) for c in cover), int(a.costs[list(cols)].sum()))
