"""Bitmap index construction and the on-disk index format.

:func:`build_index` appends words only to the bitmaps touched inside each
32-row chunk, catching up skipped chunks with runs of clean zero words, so
its cost grows with the number of set bits rather than with ``n * L``.
:func:`build_index_naive` materialises every bitmap and serves as the
reference implementation in tests.

File layout (all integers little-endian)::

    magic "EWAHIDX\\0" | u32 version | u32 byte-order mark 0x01020304
    u64 n | u32 c
    per column: u32 k, u32 N, u32 n_i, u8 value order, u8 code order, u16 0,
                n_i x (u32 byte length, UTF-8 value, u64 frequency),
                n_i x k u32 code positions
    n x u64 original row number of each indexed row
    u32 block count
    per block: u64 row_start, u64 row_stop, u32 payload words,
               L x u32 word offsets into the payload, payload words
"""

from __future__ import annotations

import struct
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .codes import CodeAssignment, CodeSpec, make_spec, assign_codes
from .ewah import WORD_BITS, EwahBitmap
from .tableio import ColumnDictionary, Table

__all__ = [
    "DEFAULT_BLOCK_BUDGET",
    "BitmapIndex",
    "IndexBlock",
    "IndexFormatError",
    "build_index",
    "build_index_naive",
    "plan_codes",
    "rank_values",
    "read_index",
    "write_index",
]

DEFAULT_BLOCK_BUDGET = 256 * 2**20
MAGIC = b"EWAHIDX\0"
FORMAT_VERSION = 1
BYTE_ORDER_MARK = 0x01020304

_VALUE_ORDERS = ("id", "alpha", "frequency")
_CODE_ORDERS = ("lex", "gray")


class IndexFormatError(ValueError):
    """Unreadable or inconsistent index file."""


@dataclass
class IndexBlock:
    """Bitmaps for the rows ``row_start:row_stop`` of the indexed order."""

    row_start: int
    row_stop: int
    bitmaps: list[EwahBitmap]

    def offsets(self) -> list[int]:
        out = []
        pos = 0
        for bm in self.bitmaps:
            out.append(pos)
            pos += bm.size_in_words()
        return out

    def payload_words(self) -> int:
        return sum(bm.size_in_words() for bm in self.bitmaps)


@dataclass
class BitmapIndex:
    n: int
    plans: list[CodeAssignment]
    dicts: list[ColumnDictionary]
    blocks: list[IndexBlock] = field(default_factory=list)
    row_ids: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @property
    def c(self) -> int:
        return len(self.plans)

    @property
    def L(self) -> int:
        return sum(p.spec.N for p in self.plans)

    def column_offsets(self) -> list[int]:
        """Index of each column's first bitmap."""
        out, base = [], 0
        for p in self.plans:
            out.append(base)
            base += p.spec.N
        return out

    def bitmaps(self) -> list[EwahBitmap]:
        """Every bitmap over all rows (blocks concatenated)."""
        if len(self.blocks) == 1:
            return list(self.blocks[0].bitmaps)
        out = [EwahBitmap() for _ in range(self.L)]
        for block in self.blocks:
            for bm, part in zip(out, block.bitmaps):
                bm.extend(part)
        return out

    def size_in_words(self) -> int:
        return sum(b.payload_words() for b in self.blocks)


def rank_values(d: ColumnDictionary, value_order: str = "id") -> list[int]:
    """Value IDs in the order codes are handed out."""
    ids = range(d.cardinality)
    if value_order == "id":
        return list(ids)
    if value_order == "alpha":
        return sorted(ids, key=d.values.__getitem__)
    if value_order == "frequency":
        return sorted(ids, key=lambda v: (-int(d.freq[v]), v))
    raise ValueError(f"unknown value order {value_order!r}")


def plan_codes(
    t: Table, k: int, code_order: str = "gray", value_order: str = "id"
) -> list[CodeAssignment]:
    """One code assignment per column, with ``k`` capped for small columns."""
    plans = []
    for d in t.dicts:
        spec = make_spec(k, d.cardinality)
        plans.append(assign_codes(rank_values(d, value_order), spec, code_order, value_order))
    return plans


def _global_codes(plans: Sequence[CodeAssignment]) -> list[list[tuple[int, ...]]]:
    out, base = [], 0
    for p in plans:
        out.append([tuple(base + q for q in c) for c in p.codes_by_id()])
        base += p.spec.N
    return out


def _check(t: Table, row_order, plans: Sequence[CodeAssignment]) -> np.ndarray:
    if len(plans) != t.c:
        raise ValueError(f"{len(plans)} code plans for {t.c} columns")
    for j, (p, d) in enumerate(zip(plans, t.dicts)):
        missing = set(range(d.cardinality)) - p.map.keys()
        if missing:
            v = min(missing)
            raise KeyError(f"column {j}: value {d.values[v]!r} (ID {v}) has no code")
    if row_order is None:
        return np.arange(t.n, dtype=np.int64)
    row_order = np.asarray(row_order, dtype=np.int64)
    if row_order.shape != (t.n,):
        raise ValueError("row order must list every row once")
    return row_order


def build_index(
    t: Table,
    row_order=None,
    plans: Sequence[CodeAssignment] | None = None,
    block_budget_bytes: int = DEFAULT_BLOCK_BUDGET,
    k: int = 1,
) -> BitmapIndex:
    """Build the compressed index chunk by chunk.

    Within each 32-row chunk only the bitmaps that receive a 1-bit get a
    pending word; at the chunk boundary each of them is caught up with
    clean zero words and then receives its word. A new block starts once
    the current block's compressed words reach ``block_budget_bytes``.
    """
    if plans is None:
        plans = plan_codes(t, k)
    row_order = _check(t, row_order, plans)
    L = sum(p.spec.N for p in plans)
    if block_budget_bytes < 4 * L:
        raise ValueError(f"block budget must hold at least {L} words")
    codes = _global_codes(plans)
    ncols = range(t.c)
    rows = t.cells[row_order].tolist()
    budget_words = block_budget_bytes // 4

    blocks: list[IndexBlock] = []
    bitmaps = [EwahBitmap() for _ in range(L)]
    block_start = 0
    block_words = L
    dirty: dict[int, int] = {}
    chunk = 0  # chunk number inside the current block

    def flush() -> int:
        grown = 0
        for b, word in dirty.items():
            bm = bitmaps[b]
            before = len(bm.words)
            gap = chunk - bm.n_words
            if gap:
                bm.add_clean_words(0, gap)
            bm.add_literal_word(word)
            grown += len(bm.words) - before
        dirty.clear()
        return grown

    def close(stop: int) -> None:
        nwords = -(-(stop - block_start) // WORD_BITS)
        for bm in bitmaps:
            if bm.n_words < nwords:
                bm.add_clean_words(0, nwords - bm.n_words)
        blocks.append(IndexBlock(block_start, stop, bitmaps))

    for r, row in enumerate(rows):
        bit = 1 << ((r - block_start) % WORD_BITS)
        for j in ncols:
            for b in codes[j][row[j]]:
                dirty[b] = dirty.get(b, 0) | bit
        if (r - block_start) % WORD_BITS == WORD_BITS - 1:
            block_words += flush()
            chunk += 1
            if block_words >= budget_words and r + 1 < t.n:
                close(r + 1)
                bitmaps = [EwahBitmap() for _ in range(L)]
                block_start = r + 1
                block_words = L
                chunk = 0
    if dirty:
        flush()
    close(t.n)
    return BitmapIndex(t.n, list(plans), list(t.dicts), blocks, row_order.copy())


def build_index_naive(
    t: Table, row_order=None, plans: Sequence[CodeAssignment] | None = None, k: int = 1
) -> BitmapIndex:
    """Materialise every bitmap and compress it one word per 32 rows."""
    if plans is None:
        plans = plan_codes(t, k)
    row_order = _check(t, row_order, plans)
    L = sum(p.spec.N for p in plans)
    npad = -(-t.n // WORD_BITS) * WORD_BITS
    dense = np.zeros((npad, L), dtype=bool)
    cells = t.cells[row_order]
    for j, col_codes in enumerate(_global_codes(plans)):
        for v, code in enumerate(col_codes):
            rows = cells[:, j] == v
            for b in code:
                dense[:t.n, b] |= rows
    bitmaps = []
    for b in range(L):
        words = np.packbits(dense[:, b], bitorder="little").view("<u4")
        bm = EwahBitmap()
        for w in words.tolist():
            bm.add_literal_word(w)
        bitmaps.append(bm)
    block = IndexBlock(0, t.n, bitmaps)
    return BitmapIndex(t.n, list(plans), list(t.dicts), [block], row_order.copy())


# -- serialisation ------------------------------------------------------------


def write_index(idx: BitmapIndex, path) -> None:
    out = bytearray()
    out += MAGIC
    out += struct.pack("<IIQI", FORMAT_VERSION, BYTE_ORDER_MARK, idx.n, idx.c)
    for p, d in zip(idx.plans, idx.dicts):
        spec = p.spec
        out += struct.pack(
            "<IIIBBH", spec.k, spec.N, spec.n_i,
            _VALUE_ORDERS.index(p.value_order), _CODE_ORDERS.index(p.code_order), 0,
        )
        for value, f in zip(d.values, d.freq.tolist()):
            raw = value.encode("utf-8")
            out += struct.pack("<I", len(raw)) + raw + struct.pack("<Q", f)
        positions = np.array(p.codes_by_id(), dtype="<u4").reshape(-1)
        out += positions.tobytes()
    out += np.asarray(idx.row_ids, dtype="<u8").tobytes()
    out += struct.pack("<I", len(idx.blocks))
    for block in idx.blocks:
        out += struct.pack("<QQI", block.row_start, block.row_stop, block.payload_words())
        out += np.array(block.offsets(), dtype="<u4").tobytes()
        for bm in block.bitmaps:
            out += np.array(bm.words, dtype="<u4").tobytes()
    Path(path).write_bytes(bytes(out))


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise IndexFormatError(f"truncated index file at byte {self.pos}")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def array(self, dtype: str, count: int) -> np.ndarray:
        itemsize = np.dtype(dtype).itemsize
        return np.frombuffer(self.take(itemsize * count), dtype=dtype)


def read_index(path) -> BitmapIndex:
    rd = _Reader(Path(path).read_bytes())
    if rd.take(len(MAGIC)) != MAGIC:
        raise IndexFormatError(f"{path}: not an index file (bad magic)")
    version, bom, n, c = rd.unpack("<IIQI")
    if version != FORMAT_VERSION:
        raise IndexFormatError(f"{path}: unsupported format version {version}")
    if bom != BYTE_ORDER_MARK:
        raise IndexFormatError(f"{path}: unexpected byte-order mark {bom:#010x}")
    plans, dicts = [], []
    for _ in range(c):
        k, N, n_i, vo, co, _pad = rd.unpack("<IIIBBH")
        values, freq = [], []
        for _ in range(n_i):
            (size,) = rd.unpack("<I")
            values.append(rd.take(size).decode("utf-8"))
            freq.append(rd.unpack("<Q")[0])
        positions = rd.array("<u4", n_i * k).reshape(n_i, k)
        try:
            spec = CodeSpec(k, N, n_i)
            plan = CodeAssignment(spec, _VALUE_ORDERS[vo], _CODE_ORDERS[co],
                                  {v: tuple(int(x) for x in positions[v]) for v in range(n_i)})
        except (ValueError, IndexError) as exc:
            raise IndexFormatError(f"{path}: bad column header: {exc}") from exc
        plans.append(plan)
        dicts.append(ColumnDictionary(values, np.array(freq, dtype=np.int64)))
    row_ids = rd.array("<u8", n).astype(np.int64)
    L = sum(p.spec.N for p in plans)
    (nblocks,) = rd.unpack("<I")
    blocks = []
    for _ in range(nblocks):
        start, stop, payload = rd.unpack("<QQI")
        offsets = rd.array("<u4", L).tolist()
        words = rd.array("<u4", payload).tolist()
        bounds = offsets + [payload]
        if any(a > b for a, b in zip(bounds, bounds[1:])):
            raise IndexFormatError(f"{path}: bitmap offsets are not increasing")
        bit_length = -(-(stop - start) // WORD_BITS) * WORD_BITS
        try:
            bitmaps = [EwahBitmap.from_compressed(words[a:b], bit_length)
                       for a, b in zip(bounds, bounds[1:])]
        except ValueError as exc:
            raise IndexFormatError(f"{path}: corrupt bitmap: {exc}") from exc
        blocks.append(IndexBlock(start, stop, bitmaps))
    if rd.pos != len(rd.data):
        raise IndexFormatError(f"{path}: {len(rd.data) - rd.pos} trailing bytes")
    return BitmapIndex(n, plans, dicts, blocks, row_ids)
