"""Storage and query cost: analytic estimates and measured counters."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from itertools import islice
from typing import TextIO

import numpy as np

from .codes import enumerate_codes
from .ewah import EwahBitmap
from .indexer import BitmapIndex

__all__ = [
    "CostReport",
    "chunk_dirty_expectation",
    "chunk_dirty_samples",
    "clean_word_count",
    "column_gain",
    "expected_dirty_words",
    "gain_peak_estimate",
    "measure_storage_cost",
    "pessimistic_query_cost_ratio",
    "query_cost_ratio",
    "sorted_column_bounds",
    "total_hamming_cost",
    "write_tsv",
]


@dataclass
class CostReport:
    """Dirty words and clean runs summed over an index's bitmaps.

    ``per_bitmap`` holds ``(dirty_words, clean_runs)`` for each bitmap.
    ``clean_switches`` counts places where a zero run directly meets a one
    run; each such place adds a run without a dirty word to separate it.
    """

    dirty_words: int = 0
    clean_runs: int = 0
    clean_switches: int = 0
    per_bitmap: list[tuple[int, int]] = field(default_factory=list)

    @property
    def storage_cost(self) -> int:
        return self.dirty_words + self.clean_runs


def expected_dirty_words(r: float, L: float, n: float, w: int = 32) -> float:
    """Expected dirty words when ``r`` 1-bits fall at random in ``L`` bitmaps of ``n`` rows.

    Every word holding at least one 1-bit counts as dirty, so the estimate is
    only meaningful for sparse indexes (``r / (L * n)`` small).
    """
    if L * n == 0:
        return 0.0
    density = r / (L * n)
    return (1.0 - (1.0 - density) ** w) * (L * n / w)


def column_gain(n: float, n_i: float, k: int, w: int = 32) -> float:
    """Estimated words saved by sorting a uniform column rather than shuffling it.

    ``2 * delta(k n, ceil(k n_i**(1/k)), n) - 4 n_i``.
    """
    L = math.ceil(k * n_i ** (1.0 / k))
    return 2.0 * expected_dirty_words(k * n, L, n, w) - 4.0 * n_i


def gain_peak_estimate(n: float, k: int, w: int = 32) -> float:
    """Closed-form location of the gain maximum, ``(n (w - 1) / 2) ** (k / (k + 1))``."""
    return (n * (w - 1) / 2.0) ** (k / (k + 1.0))


def sorted_column_bounds(n_i: int, k: int) -> tuple[int, int]:
    """(max dirty words, max storage cost) of a sorted column with GC codes."""
    return 2 * n_i, 4 * n_i + math.ceil(k * n_i ** (1.0 / k))


def query_cost_ratio(n_i: float, k: int) -> float:
    """Cost of an equality query at ``k`` relative to ``k = 1``: (2 - 1/k) n_i**((k-1)/k)."""
    if k == 1:
        return 1.0
    return (2.0 - 1.0 / k) * n_i ** ((k - 1.0) / k)


def pessimistic_query_cost_ratio(n_i: float, k: int) -> float:
    """Upper bound 3 (2k - 1) n_i**((k-1)/k)."""
    return 3.0 * (2 * k - 1) * n_i ** ((k - 1.0) / k)


def _clean_switches(bm: EwahBitmap) -> int:
    switches = 0
    prev = -1
    for bit, run, _, count in bm.segments():
        if run and prev not in (-1, bit):
            switches += 1
        prev = bit if run and count == 0 else -1
    return switches


def measure_storage_cost(idx: BitmapIndex) -> CostReport:
    """Sum dirty words and clean runs over every bitmap of every block.

    Runs are at most one more than the dirty words in each bitmap, plus one
    per direct zero/one switch.
    """
    report = CostReport()
    nbitmaps = 0
    for block in idx.blocks:
        for bm in block.bitmaps:
            d, c = bm.dirty_word_count(), bm.clean_run_count()
            report.per_bitmap.append((d, c))
            report.dirty_words += d
            report.clean_runs += c
            report.clean_switches += _clean_switches(bm)
            nbitmaps += 1
    assert report.clean_runs <= nbitmaps + report.dirty_words + report.clean_switches
    return report


def total_hamming_cost(rows) -> int:
    """Sum of Hamming distances between consecutive rows of a 0/1 matrix."""
    rows = np.asarray(rows, dtype=bool)
    if rows.ndim != 2:
        raise ValueError("rows must form a 2-D matrix of equal width")
    if len(rows) < 2:
        return 0
    return int(np.count_nonzero(rows[1:] != rows[:-1]))


def clean_word_count(rows, w: int) -> int:
    """Number of (bitmap, word) cells that are clean when rows are packed ``w`` at a time.

    ``rows`` is an ``n x L`` 0/1 matrix with ``n`` a multiple of ``w``.
    """
    rows = np.asarray(rows, dtype=bool)
    n, L = rows.shape
    if n % w:
        raise ValueError("row count must be a multiple of the word size")
    words = rows.reshape(n // w, w, L)
    return int(np.count_nonzero(words.all(axis=1) | ~words.any(axis=1)))


def _code_matrix(k: int, N: int, count: int, order: str) -> np.ndarray:
    m = np.zeros((count, N), dtype=np.int32)
    for i, code in enumerate(islice(enumerate_codes(k, N, order), count)):
        m[i, list(code)] = 1
    return m


def chunk_dirty_samples(
    j: int,
    k: int,
    N: int,
    adjacency: str,
    trials: int,
    seed=None,
    n_values: int = 1000,
) -> np.ndarray:
    """Per-trial counts of bitmaps holding a dirty word in one 32-row chunk.

    The chunk holds ``j`` distinct values out of ``n_values``. With
    ``adjacency`` "gc" or "lex" the values are ``j`` consecutive codes of that
    enumeration starting at a random rank; with "random" they are ``j``
    distinct codes drawn uniformly. A bitmap is dirty when some but not all
    of the chosen codes set it. Equal seeds give equal starting ranks for
    "gc" and "lex", so their samples are paired.
    """
    if not 1 <= j <= min(n_values, 32):
        raise ValueError("need 1 <= j <= min(n_values, 32)")
    if math.comb(N, k) < n_values:
        raise ValueError(f"C({N},{k}) codes cannot cover {n_values} values")
    rng = np.random.default_rng(seed)
    if adjacency in ("gc", "lex"):
        codes = _code_matrix(k, N, n_values, "gray" if adjacency == "gc" else "lex")
        cum = np.vstack([np.zeros((1, N), dtype=np.int32), np.cumsum(codes, axis=0)])
        starts = rng.integers(0, n_values - j + 1, size=trials)
        ones = cum[starts + j] - cum[starts]
    elif adjacency == "random":
        codes = _code_matrix(k, N, n_values, "lex")
        ones = np.empty((trials, N), dtype=np.int32)
        for t in range(trials):
            pick = rng.choice(n_values, size=j, replace=False)
            ones[t] = codes[pick].sum(axis=0)
    else:
        raise ValueError(f"unknown adjacency {adjacency!r}")
    return np.count_nonzero((ones > 0) & (ones < j), axis=1)


def chunk_dirty_expectation(
    j: int,
    k: int,
    N: int,
    adjacency: str,
    trials: int = 10_000,
    seed=None,
    n_values: int = 1000,
) -> float:
    """Monte-Carlo mean of :func:`chunk_dirty_samples`."""
    return float(chunk_dirty_samples(j, k, N, adjacency, trials, seed, n_values).mean())


def write_tsv(fh: TextIO, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    fh.write("\t".join(header) + "\n")
    for row in rows:
        fh.write("\t".join(_fmt(x) for x in row) + "\n")


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)
