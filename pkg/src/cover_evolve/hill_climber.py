"""Single-pass redundancy removal, and the GA fitness built on it."""

from __future__ import annotations

import numba
import numpy as np

from .decoder import CostRankTable, Variant, cost_rank_table, decode, decode_kernel
from .genome import Genome
from .instance import Instance, Solution, as_csr


@numba.njit(cache=True)
def climb_kernel(chosen, cover, costs, col_ptr, col_rows):
    """One pass over chosen columns, most expensive first (cost ties: higher index first).

    A column is dropped when every row it covers is covered at least twice;
    ``chosen`` and ``cover`` are updated in place.
    """
    cols = np.flatnonzero(chosen)
    n = costs.shape[0]
    keys = np.empty(cols.shape[0], dtype=np.int64)
    for t in range(cols.shape[0]):
        keys[t] = -(costs[cols[t]] * n + cols[t])
    order = np.argsort(keys)
    for t in range(order.shape[0]):
        j = cols[order[t]]
        redundant = True
        for q in range(col_ptr[j], col_ptr[j + 1]):
            if cover[col_rows[q]] < 2:
                redundant = False
                break
        if redundant:
            chosen[j] = False
            for q in range(col_ptr[j], col_ptr[j + 1]):
                cover[col_rows[q]] -= 1


@numba.njit(cache=True)
def population_costs(perms, weights, variant, row_ptr, row_cols, row_ranks, col_ptr, col_rows, costs,
                     col_rank_sum):
    """Decode and climb every row of ``perms``; return the resulting costs."""
    count = perms.shape[0]
    n = costs.shape[0]
    m = row_ptr.shape[0] - 1
    out = np.empty(count, dtype=np.int64)
    chosen = np.zeros(n, dtype=np.bool_)
    cover = np.zeros(m, dtype=np.int64)
    for g in range(count):
        chosen[:] = False
        cover[:] = 0
        decode_kernel(perms[g], weights[g], variant, row_ptr, row_cols, row_ranks, col_ptr, col_rows,
                      costs, col_rank_sum, chosen, cover)
        climb_kernel(chosen, cover, costs, col_ptr, col_rows)
        total = 0
        for j in range(n):
            if chosen[j]:
                total += costs[j]
        out[g] = total
    return out


def remove_redundant(instance: Instance, solution: Solution) -> Solution:
    if not solution.feasible:
        raise AssertionError("remove_redundant needs a feasible solution")
    costs = np.asarray(instance.costs, dtype=np.int64)
    chosen = np.zeros(instance.num_cols, dtype=np.bool_)
    chosen[list(solution.chosen)] = True
    cover = np.asarray(solution.cover_count, dtype=np.int64).copy()
    col_ptr, col_rows = as_csr(instance.rows_of_col)
    climb_kernel(chosen, cover, costs, col_ptr, col_rows)
    cols = tuple(int(j) for j in np.flatnonzero(chosen))
    return Solution(cols, tuple(int(c) for c in cover), int(costs[list(cols)].sum()))


def fitness(
    instance: Instance, genome: Genome, variant: Variant, rank_table: CostRankTable | None = None
) -> tuple[Solution, int]:
    """Decode, then climb. The climbed cost is what the GA minimises."""
    if rank_table is None:
        rank_table = cost_rank_table(instance)
    sol = remove_redundant(instance, decode(instance, genome, variant, rank_table))
    return sol, sol.cost
