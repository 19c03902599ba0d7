"""Row and column ordering heuristics applied before index construction.

Every row sort returns a permutation ``perm`` (an int64 array) such that
``t.cells[perm]`` is the reordered table. All sorts are stable: rows that
compare equal keep their original relative order.
"""

from __future__ import annotations

from collections.abc import Sequence
from functools import cmp_to_key
from typing import TextIO

import numpy as np

from .codes import CodeAssignment
from .tableio import Table

__all__ = [
    "format_column_order",
    "gc_compare",
    "gc_less",
    "order_columns_heuristic",
    "order_from_extended_lines",
    "parse_column_order",
    "row_positions",
    "shuffle",
    "sort_frequent_component",
    "sort_gray_frequency",
    "sort_graycode_rows",
    "sort_lexicographic",
    "write_extended_rows",
]

GRAYCODE_SORT_MAX_ROWS = 100_000


def _col_order(t: Table, col_order: Sequence[int] | None) -> list[int]:
    if col_order is None:
        return list(range(t.c))
    order = [int(j) for j in col_order]
    if sorted(order) != list(range(t.c)):
        raise ValueError(f"{order} is not a permutation of the {t.c} columns")
    return order


def sort_lexicographic(t: Table, col_order: Sequence[int] | None = None) -> np.ndarray:
    order = _col_order(t, col_order)
    # np.lexsort treats the last key as primary
    keys = [t.cells[:, j] for j in reversed(order)]
    return np.lexsort(keys)


def gc_less(a: Sequence[int], b: Sequence[int]) -> bool:
    """True when ``a`` ranks below ``b`` in reflected Gray-code order.

    ``a`` and ``b`` list the positions of the ones, ascending, with position
    0 the most significant bit. Only the shorter list is walked.
    """
    f = True
    for p in range(min(len(a), len(b))):
        if a[p] > b[p]:
            return f
        if a[p] < b[p]:
            return not f
        f = not f
    if len(a) > len(b):
        return not f
    if len(b) > len(a):
        return f
    return False


def gc_compare(a: Sequence[int], b: Sequence[int]) -> int:
    """-1, 0 or 1 as ``a`` precedes, equals or follows ``b`` in Gray-code order."""
    if gc_less(a, b):
        return -1
    if gc_less(b, a):
        return 1
    return 0


def row_positions(
    t: Table, plans: Sequence[CodeAssignment], col_order: Sequence[int] | None = None
) -> list[tuple[int, ...]]:
    """Each row's set bit positions with columns laid out in ``col_order``."""
    order = _col_order(t, col_order)
    offsets = {}
    base = 0
    for j in order:
        offsets[j] = base
        base += plans[j].spec.N
    per_col = []
    for j in order:
        codes = plans[j].codes_by_id()
        off = offsets[j]
        per_col.append([tuple(p + off for p in c) for c in codes])
    rows = []
    for r in range(t.n):
        pos: tuple[int, ...] = ()
        for col_codes, j in zip(per_col, order):
            pos += col_codes[t.cells[r, j]]
        rows.append(pos)
    return rows


def sort_graycode_rows(
    t: Table,
    plans: Sequence[CodeAssignment],
    col_order: Sequence[int] | None = None,
    max_rows: int = GRAYCODE_SORT_MAX_ROWS,
) -> np.ndarray:
    """Sort rows by their encoded bit vectors in Gray-code order.

    The direction matches :func:`~ewahindex.codes.enumerate_gc`: sorting one
    row per k-of-N code reproduces the enumeration sequence, which is
    descending under :func:`gc_less`. Meant for validation at small sizes.
    """
    if t.n > max_rows:
        raise ValueError(f"Gray-code row sort is capped at {max_rows} rows")
    rows = row_positions(t, plans, col_order)
    keyed = sorted(
        range(t.n), key=cmp_to_key(lambda x, y: gc_compare(rows[y], rows[x]))
    )
    return np.array(keyed, dtype=np.int64)


def sort_gray_frequency(t: Table, col_order: Sequence[int] | None = None) -> np.ndarray:
    """Sort rows on a key that pairs each cell's frequency with its value ID.

    Columns are taken in ``col_order`` priority. Higher frequencies sort
    first, so the most common value of a column leads each block.
    """
    order = _col_order(t, col_order)
    freqs = t.frequencies()
    keys = []
    for j in reversed(order):
        keys.append(t.cells[:, j])
        keys.append(-freqs[:, j])
    return np.lexsort(keys)


def _frequent_component_keys(t: Table) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    freqs = t.frequencies()
    pos = np.broadcast_to(np.arange(t.c), t.cells.shape)
    within = np.lexsort(np.stack([pos, t.cells, freqs]), axis=-1)
    take = lambda m: np.take_along_axis(m, within, axis=1)  # noqa: E731
    return take(freqs), take(t.cells), take(np.ascontiguousarray(pos))


def sort_frequent_component(t: Table) -> np.ndarray:
    """Sort rows by their components taken in ascending frequency.

    Each row becomes the sequence of triples (f(a), a, column) ordered by
    (f(a), a, column), least frequent first; rows are then compared
    lexicographically on those sequences, so the column a value came from
    matters only to break ties.
    """
    f, a, p = _frequent_component_keys(t)
    keys = []
    for i in reversed(range(t.c)):
        keys.extend((p[:, i], a[:, i], f[:, i]))
    return np.lexsort(keys)


def order_columns_heuristic(
    cardinalities: Sequence[int], k: int, w: int = 32
) -> tuple[int, ...]:
    """Order columns by decreasing min(d, (1 - d) / (4w - 1)), d = n_i**(-1/k).

    Ties go to the smaller column.
    """
    if k < 1:
        raise ValueError("k must be positive")

    def score(n_i: int) -> float:
        d = n_i ** (-1.0 / k)
        return min(d, (1.0 - d) / (4 * w - 1))

    return tuple(
        sorted(range(len(cardinalities)),
               key=lambda j: (-score(cardinalities[j]), cardinalities[j], j))
    )


def parse_column_order(spec: str, c: int) -> tuple[int, ...]:
    """``"2134"`` (1-based column numbers) -> ``(1, 0, 2, 3)``."""
    digits = spec.split(",") if "," in spec else list(spec)
    order = tuple(int(d) - 1 for d in digits)
    if sorted(order) != list(range(c)):
        raise ValueError(f"column order {spec!r} is not a permutation of 1..{c}")
    return order


def format_column_order(order: Sequence[int]) -> str:
    if len(order) > 9:
        return ",".join(str(j + 1) for j in order)
    return "".join(str(j + 1) for j in order)


def shuffle(t: Table | int, seed=None) -> np.ndarray:
    n = t if isinstance(t, int) else t.n
    return np.random.default_rng(seed).permutation(n)


def write_extended_rows(
    t: Table,
    fh: TextIO,
    mode: str = "gray-frequency",
    col_order: Sequence[int] | None = None,
    delimiter: str = "\t",
) -> None:
    """Write rows as fixed-width text keys for an external line sort.

    Sorting the lines byte-wise (``LC_ALL=C sort``) gives the same order as
    :func:`sort_gray_frequency` (``mode="gray-frequency"``) or
    :func:`sort_frequent_component` (``mode="frequent-component"``). The
    last field of each line is the original row number; recover the
    permutation with :func:`order_from_extended_lines`.

    Gray-frequency writes ``n - f(a)`` so an ascending text sort puts
    frequent values first.
    """
    n = t.n
    width = len(str(max(n, max(t.cardinalities), t.c)))
    fmt = lambda x: str(int(x)).zfill(width)  # noqa: E731
    if mode == "gray-frequency":
        order = _col_order(t, col_order)
        freqs = t.frequencies()
        for r in range(n):
            fields = []
            for j in order:
                fields.append(fmt(n - freqs[r, j]))
                fields.append(fmt(t.cells[r, j]))
            fields.append(fmt(r))
            fh.write(delimiter.join(fields) + "\n")
    elif mode == "frequent-component":
        f, a, p = _frequent_component_keys(t)
        for r in range(n):
            fields = []
            for i in range(t.c):
                fields.extend((fmt(f[r, i]), fmt(a[r, i]), fmt(p[r, i])))
            fields.append(fmt(r))
            fh.write(delimiter.join(fields) + "\n")
    else:
        raise ValueError(f"unknown extended-row mode {mode!r}")


def order_from_extended_lines(lines, delimiter: str = "\t") -> np.ndarray:
    return np.array(
        [int(line.rstrip("\n").rsplit(delimiter, 1)[1]) for line in lines],
        dtype=np.int64,
    )
