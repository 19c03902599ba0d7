"""Tables of attribute-value IDs: CSV loading, dictionaries, synthetic data."""

from __future__ import annotations

import csv
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

__all__ = [
    "ColumnDictionary",
    "Table",
    "TableError",
    "generate_uniform",
    "generate_zipf",
    "generate_zipf_table",
    "load_csv",
    "write_csv",
    "zipf_probabilities",
]


class TableError(ValueError):
    """Malformed or empty input data."""


@dataclass
class ColumnDictionary:
    """Value strings and occurrence counts for one column, indexed by ID."""

    values: list[str]
    freq: np.ndarray

    @property
    def cardinality(self) -> int:
        return len(self.values)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.values)}

    def lookup(self, value: str) -> int | None:
        return self._index.get(value)


class Table:
    """Row-major matrix of dense value IDs plus one dictionary per column."""

    def __init__(self, cells: np.ndarray, dicts: list[ColumnDictionary]) -> None:
        cells = np.asarray(cells, dtype=np.int64)
        if cells.ndim != 2 or cells.shape[0] < 1 or cells.shape[1] < 1:
            raise TableError("a table needs at least one row and one column")
        if len(dicts) != cells.shape[1]:
            raise TableError("one dictionary per column is required")
        for j, d in enumerate(dicts):
            if cells[:, j].max() >= d.cardinality or cells[:, j].min() < 0:
                raise TableError(f"column {j} holds an ID outside its dictionary")
        self.cells = cells
        self.dicts = dicts

    @property
    def n(self) -> int:
        return self.cells.shape[0]

    @property
    def c(self) -> int:
        return self.cells.shape[1]

    @property
    def cardinalities(self) -> list[int]:
        return [d.cardinality for d in self.dicts]

    @classmethod
    def from_ids(cls, cells, labels: Sequence[Sequence[str]] | None = None) -> Table:
        """Build a table from raw integer codes, densifying IDs per column.

        Distinct codes keep their numeric order; unused codes are dropped.
        """
        cells = np.asarray(cells)
        if cells.ndim == 1:
            cells = cells[:, None]
        out = np.empty(cells.shape, dtype=np.int64)
        dicts = []
        for j in range(cells.shape[1]):
            uniq, inv, counts = np.unique(cells[:, j], return_inverse=True, return_counts=True)
            out[:, j] = inv.ravel()
            names = [str(u) for u in uniq] if labels is None else [labels[j][u] for u in uniq]
            dicts.append(ColumnDictionary(names, counts.astype(np.int64)))
        return cls(out, dicts)

    def decode_row(self, r: int) -> list[str]:
        return [self.dicts[j].values[v] for j, v in enumerate(self.cells[r])]

    def relabel_alphabetical(self) -> Table:
        """Renumber every column so IDs follow the sorted value strings."""
        cells = np.empty_like(self.cells)
        dicts = []
        for j, d in enumerate(self.dicts):
            order = sorted(range(d.cardinality), key=d.values.__getitem__)
            remap = np.empty(d.cardinality, dtype=np.int64)
            remap[order] = np.arange(d.cardinality)
            cells[:, j] = remap[self.cells[:, j]]
            dicts.append(ColumnDictionary([d.values[i] for i in order], d.freq[order]))
        return Table(cells, dicts)

    def frequencies(self) -> np.ndarray:
        """Matrix of f(a) for every cell."""
        out = np.empty_like(self.cells)
        for j, d in enumerate(self.dicts):
            out[:, j] = d.freq[self.cells[:, j]]
        return out

    def take(self, rows) -> Table:
        """Rows reindexed, dictionaries shared."""
        return Table(self.cells[np.asarray(rows)], self.dicts)

    def __repr__(self) -> str:
        return f"Table(n={self.n}, c={self.c}, cardinalities={self.cardinalities})"


def load_csv(path, delimiter: str = ",", has_header: bool = False) -> Table:
    """Read a delimited text file; value IDs follow first appearance.

    Quoting is not interpreted: every delimiter splits a field.
    """
    if len(delimiter) != 1:
        raise TableError("delimiter must be a single character")
    path = Path(path)
    index: list[dict[str, int]] = []
    values: list[list[str]] = []
    rows: list[list[int]] = []
    width = None
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter, quoting=csv.QUOTE_NONE)
        for lineno, fields in enumerate(reader, start=1):
            if has_header and lineno == 1:
                continue
            if width is None:
                width = len(fields)
                index = [{} for _ in range(width)]
                values = [[] for _ in range(width)]
            elif len(fields) != width:
                raise TableError(
                    f"{path}: line {lineno} has {len(fields)} fields, expected {width}"
                )
            ids = []
            for j, v in enumerate(fields):
                vid = index[j].get(v)
                if vid is None:
                    vid = index[j][v] = len(values[j])
                    values[j].append(v)
                ids.append(vid)
            rows.append(ids)
    if not rows or not width:
        raise TableError(f"{path}: no data rows")
    cells = np.array(rows, dtype=np.int64)
    dicts = [
        ColumnDictionary(values[j], np.bincount(cells[:, j], minlength=len(values[j])))
        for j in range(width)
    ]
    return Table(cells, dicts)


def write_csv(t: Table, path, delimiter: str = ",") -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter=delimiter, quoting=csv.QUOTE_NONE,
                       lineterminator="\n", escapechar=None)
        for r in range(t.n):
            w.writerow(t.decode_row(r))


def generate_uniform(n: int, cardinalities: Sequence[int], seed=None) -> Table:
    """Independent uniform columns."""
    rng = np.random.default_rng(seed)
    cols = [rng.integers(0, card, size=n) for card in cardinalities]
    return Table.from_ids(np.column_stack(cols))


def zipf_probabilities(cardinality: int, skew: float) -> np.ndarray:
    """P(rank r) proportional to r**-skew, exactly normalised over the ranks."""
    w = np.arange(1, cardinality + 1, dtype=float) ** -float(skew)
    return w / w.sum()


def generate_zipf(n: int, cardinality: int, skew: float, seed=None) -> np.ndarray:
    """One column of ranks 0..cardinality-1 (rank 0 most frequent)."""
    if skew < 0:
        raise ValueError("skew must be non-negative")
    rng = np.random.default_rng(seed)
    return rng.choice(cardinality, size=n, p=zipf_probabilities(cardinality, skew))


def generate_zipf_table(
    n: int, cardinalities: Sequence[int], skews: Sequence[float], seed=None
) -> Table:
    if len(cardinalities) != len(skews):
        raise ValueError("one skew per column")
    rng = np.random.default_rng(seed)
    cols = [generate_zipf(n, card, s, rng) for card, s in zip(cardinalities, skews)]
    return Table.from_ids(np.column_stack(cols))
