"""Equality queries over a :class:`~ewahindex.indexer.BitmapIndex`."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .ewah import combine
from .indexer import BitmapIndex

__all__ = ["QueryStats", "batch_equality_benchmark", "equality_query", "resolve_value"]


@dataclass
class QueryStats:
    """Work done by one query.

    ``bitmaps_touched`` follows the pairwise AND accounting: k operands plus
    k - 1 intermediate results. ``words_scanned`` counts compressed words
    read from the operands.
    """

    bitmaps_touched: int = 0
    words_scanned: int = 0
    result_cardinality: int = 0


def _column(idx: BitmapIndex, column) -> int:
    if isinstance(column, str) and not column.lstrip("-").isdigit():
        raise KeyError(f"unknown column {column!r}")
    j = int(column)
    if not 0 <= j < idx.c:
        raise KeyError(f"unknown column {column!r}; the index has {idx.c} columns")
    return j


def resolve_value(idx: BitmapIndex, column: int, value) -> int | None:
    """Value ID for a value string (or pass an int ID through)."""
    d = idx.dicts[column]
    if isinstance(value, (int, np.integer)):
        return int(value) if 0 <= value < d.cardinality else None
    return d.lookup(value)


def equality_query(idx: BitmapIndex, column, value) -> tuple[np.ndarray, QueryStats]:
    """Rows whose ``column`` holds ``value``, as ascending original row numbers.

    ``column`` is a 0-based column number. ``value`` is a value string or a
    value ID. A value absent from the dictionary yields no rows.
    """
    j = _column(idx, column)
    vid = resolve_value(idx, j, value)
    stats = QueryStats()
    if vid is None:
        return np.zeros(0, dtype=np.int64), stats
    base = idx.column_offsets()[j]
    operands = sorted(base + p for p in idx.plans[j].code(vid))
    stats.bitmaps_touched = 2 * len(operands) - 1
    parts = []
    for block in idx.blocks:
        acc = block.bitmaps[operands[0]]
        if len(operands) == 1:
            stats.words_scanned += acc.size_in_words()
        for b in operands[1:]:
            acc, visited = combine(acc, block.bitmaps[b], "and")
            stats.words_scanned += visited
        positions = acc.set_bits()
        if positions.size:
            parts.append(positions + block.row_start)
    if not parts:
        return np.zeros(0, dtype=np.int64), stats
    positions = np.concatenate(parts)
    positions = positions[positions < idx.n]
    rows = np.sort(idx.row_ids[positions])
    stats.result_cardinality = int(rows.size)
    return rows, stats


def batch_equality_benchmark(
    idx: BitmapIndex, column, trials: int, seed=None
) -> tuple[float, float]:
    """Mean words scanned and mean wall time over random equality queries.

    Values are drawn uniformly, with replacement, from the column dictionary.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    j = _column(idx, column)
    rng = np.random.default_rng(seed)
    values = rng.integers(0, idx.dicts[j].cardinality, size=trials)
    words = 0
    elapsed = 0.0
    for v in values.tolist():
        t0 = time.perf_counter()
        _, stats = equality_query(idx, j, v)
        elapsed += time.perf_counter() - t0
        words += stats.words_scanned
    return words / trials, elapsed / trials
