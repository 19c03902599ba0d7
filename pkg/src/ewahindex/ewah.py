"""Enhanced Word-Aligned Hybrid (EWAH) compressed bitmaps over 32-bit words.

A compressed bitmap is a flat list of 32-bit words. Each marker word
describes a run of identical *clean* words (all zeros or all ones)
followed by a number of *verbatim* (dirty) words stored as-is::

    bit 0       clean word type (0 -> 0x00000000, 1 -> 0xFFFFFFFF)
    bits 1-16   clean run length
    bits 17-31  number of verbatim words following the marker

Logical bit ``i`` lives in uncompressed word ``i // 32`` at bit ``i % 32``
(LSB first). Bitmaps are kept in normal form: clean words are never stored
verbatim, so two bitmaps holding the same bits have identical word lists.
"""

from __future__ import annotations

import operator
import warnings
from collections.abc import Iterable, Iterator

import numpy as np

__all__ = [
    "ALL_ONES",
    "MAX_CLEAN_RUN",
    "MAX_DIRTY_COUNT",
    "WORD_BITS",
    "EwahBitmap",
    "LengthMismatchWarning",
    "clean_run_count",
    "combine",
    "dirty_word_count",
    "iterate_set_bits",
    "logical_and",
    "logical_not",
    "logical_or",
    "logical_xor",
    "make_marker",
    "marker_fields",
    "new_empty",
    "size_in_words",
]

WORD_BITS = 32
ALL_ONES = 0xFFFFFFFF
MAX_CLEAN_RUN = 0xFFFF
MAX_DIRTY_COUNT = 0x7FFF


class LengthMismatchWarning(UserWarning):
    """Binary operation on bitmaps of different bit lengths."""


def make_marker(clean_bit: int, clean_len: int, dirty: int) -> int:
    return clean_bit | (clean_len << 1) | (dirty << 17)


def marker_fields(marker: int) -> tuple[int, int, int]:
    """Split a marker word into ``(clean_bit, clean_len, dirty_count)``."""
    return marker & 1, (marker >> 1) & MAX_CLEAN_RUN, marker >> 17


class EwahBitmap:
    """A compressed bitmap built by appending whole 32-bit words.

    ``bit_length`` may stop inside the last word; bits past it are always 0.
    """

    __slots__ = ("words", "bit_length", "last_marker_pos")

    def __init__(self) -> None:
        self.words: list[int] = [0]
        self.bit_length = 0
        self.last_marker_pos = 0

    # -- construction -------------------------------------------------------

    @property
    def n_words(self) -> int:
        """Number of uncompressed words covered by the bitmap."""
        return (self.bit_length + WORD_BITS - 1) // WORD_BITS

    def add_clean_words(self, bit: int, count: int) -> EwahBitmap:
        if count < 0:
            raise ValueError("count must be non-negative")
        if count == 0:
            return self
        words = self.words
        total = self.n_words + count
        while count:
            pos = self.last_marker_pos
            m = words[pos]
            run = (m >> 1) & MAX_CLEAN_RUN
            if m >> 17 == 0 and (run == 0 or m & 1 == bit) and run < MAX_CLEAN_RUN:
                take = min(count, MAX_CLEAN_RUN - run)
                words[pos] = make_marker(bit, run + take, 0)
                count -= take
            else:
                words.append(make_marker(bit, 0, 0))
                self.last_marker_pos = len(words) - 1
        self.bit_length = total * WORD_BITS
        return self

    def add_literal_word(self, word: int) -> EwahBitmap:
        if word == 0:
            return self.add_clean_words(0, 1)
        if word == ALL_ONES:
            return self.add_clean_words(1, 1)
        words = self.words
        m = words[self.last_marker_pos]
        if m >> 17 == MAX_DIRTY_COUNT:
            words.append(0)
            self.last_marker_pos = len(words) - 1
            m = 0
        words[self.last_marker_pos] = m + (1 << 17)
        words.append(word)
        self.bit_length = (self.n_words + 1) * WORD_BITS
        return self

    def add_literal_words(self, chunk: list[int]) -> EwahBitmap:
        """Append several uncompressed words, folding clean ones into runs."""
        if not chunk:
            return self
        if 0 in chunk or ALL_ONES in chunk:
            for w in chunk:
                self.add_literal_word(w)
            return self
        total = self.n_words + len(chunk)
        words = self.words
        start = 0
        while start < len(chunk):
            m = words[self.last_marker_pos]
            room = MAX_DIRTY_COUNT - (m >> 17)
            if room == 0:
                words.append(0)
                self.last_marker_pos = len(words) - 1
                continue
            take = chunk[start:start + room]
            words[self.last_marker_pos] = m + (len(take) << 17)
            words.extend(take)
            start += len(take)
        self.bit_length = total * WORD_BITS
        return self

    def extend(self, other: EwahBitmap) -> EwahBitmap:
        """Append ``other`` after the last full word of ``self``."""
        if self.bit_length % WORD_BITS:
            raise ValueError("can only extend a word-aligned bitmap")
        base = self.bit_length
        ow = other.words
        for bit, run, start, count in other.segments():
            self.add_clean_words(bit, run)
            self.add_literal_words(ow[start:start + count])
        self.bit_length = base + other.bit_length
        return self

    @classmethod
    def from_words(cls, words: Iterable[int], bit_length: int | None = None) -> EwahBitmap:
        """Compress a sequence of uncompressed 32-bit words."""
        bm = cls()
        bm.add_literal_words([int(w) for w in words])
        if bit_length is not None:
            bm._set_bit_length(bit_length)
        return bm

    @classmethod
    def from_bools(cls, bits) -> EwahBitmap:
        bits = np.asarray(bits, dtype=bool).ravel()
        n = bits.size
        padded = np.zeros(-(-n // WORD_BITS) * WORD_BITS, dtype=bool)
        padded[:n] = bits
        raw = np.packbits(padded, bitorder="little").view("<u4")
        return cls.from_words(raw.tolist(), n)

    @classmethod
    def from_positions(cls, positions: Iterable[int], bit_length: int) -> EwahBitmap:
        bits = np.zeros(bit_length, dtype=bool)
        bits[np.fromiter(positions, dtype=np.int64)] = True
        return cls.from_bools(bits)

    @classmethod
    def from_compressed(cls, words: Iterable[int], bit_length: int) -> EwahBitmap:
        """Wrap already-compressed words (e.g. read from disk)."""
        bm = cls()
        bm.words = [int(w) for w in words]
        if not bm.words:
            raise ValueError("compressed bitmap needs at least one marker word")
        pos = 0
        covered = 0
        while True:
            _, run, dirty = marker_fields(bm.words[pos])
            covered += run + dirty
            if pos + 1 + dirty >= len(bm.words):
                break
            pos += 1 + dirty
        if pos + 1 + dirty != len(bm.words):
            raise ValueError("truncated compressed bitmap")
        bm.last_marker_pos = pos
        if -(-bit_length // WORD_BITS) != covered:
            raise ValueError(
                f"bit length {bit_length} does not match {covered} encoded words"
            )
        bm.bit_length = bit_length
        return bm

    def _set_bit_length(self, bit_length: int) -> None:
        if -(-bit_length // WORD_BITS) != self.n_words:
            raise ValueError("bit length must fall within the last word")
        self.bit_length = bit_length

    # -- inspection ---------------------------------------------------------

    def segments(self) -> Iterator[tuple[int, int, int, int]]:
        """Yield ``(clean_bit, clean_len, literal_start, literal_count)`` per marker."""
        words = self.words
        i = 0
        n = len(words)
        while i < n:
            m = words[i]
            dirty = m >> 17
            yield m & 1, (m >> 1) & MAX_CLEAN_RUN, i + 1, dirty
            i += 1 + dirty

    def uncompressed_words(self) -> list[int]:
        out: list[int] = []
        words = self.words
        for bit, run, start, count in self.segments():
            if run:
                out.extend([ALL_ONES if bit else 0] * run)
            out.extend(words[start:start + count])
        return out

    def to_bools(self) -> np.ndarray:
        raw = np.array(self.uncompressed_words(), dtype="<u4")
        bits = np.unpackbits(raw.view(np.uint8), bitorder="little").astype(bool)
        return bits[: self.bit_length]

    def iterate_set_bits(self) -> Iterator[int]:
        words = self.words
        pos = 0
        for bit, run, start, count in self.segments():
            if run:
                if bit:
                    yield from range(pos, min(pos + run * WORD_BITS, self.bit_length))
                pos += run * WORD_BITS
            for w in words[start:start + count]:
                while w:
                    low = w & -w
                    yield pos + low.bit_length() - 1
                    w ^= low
                pos += WORD_BITS

    def set_bits(self) -> np.ndarray:
        """Positions of the 1-bits as an int64 array (ascending)."""
        return np.fromiter(self.iterate_set_bits(), dtype=np.int64)

    def cardinality(self) -> int:
        words = self.words
        total = 0
        for bit, run, start, count in self.segments():
            if bit:
                total += run * WORD_BITS
            for w in words[start:start + count]:
                total += w.bit_count()
        return total

    def size_in_words(self) -> int:
        return len(self.words)

    def dirty_word_count(self) -> int:
        return sum(count for _, _, _, count in self.segments())

    def clean_run_count(self) -> int:
        """Count maximal runs of identical clean words.

        A run split across markers only because the 16-bit counter
        overflowed counts once.
        """
        runs = 0
        prev_bit = -1
        for bit, run, _, count in self.segments():
            if run and bit != prev_bit:
                runs += 1
            # a run continues into the next marker only if no dirty word intervenes
            prev_bit = bit if run and count == 0 else -1
        return runs

    # -- logical operations -------------------------------------------------

    def __and__(self, other: EwahBitmap) -> EwahBitmap:
        return combine(self, other, "and")[0]

    def __or__(self, other: EwahBitmap) -> EwahBitmap:
        return combine(self, other, "or")[0]

    def __xor__(self, other: EwahBitmap) -> EwahBitmap:
        return combine(self, other, "xor")[0]

    def __invert__(self) -> EwahBitmap:
        return logical_not(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EwahBitmap):
            return NotImplemented
        return self.bit_length == other.bit_length and self.words == other.words

    __hash__ = None  # type: ignore[assignment]

    def copy(self) -> EwahBitmap:
        bm = EwahBitmap()
        bm.words = list(self.words)
        bm.bit_length = self.bit_length
        bm.last_marker_pos = self.last_marker_pos
        return bm

    def __repr__(self) -> str:
        return (
            f"EwahBitmap(bit_length={self.bit_length}, "
            f"size_in_words={len(self.words)})"
        )


def new_empty() -> EwahBitmap:
    return EwahBitmap()


def size_in_words(a: EwahBitmap) -> int:
    return a.size_in_words()


def dirty_word_count(a: EwahBitmap) -> int:
    return a.dirty_word_count()


def clean_run_count(a: EwahBitmap) -> int:
    return a.clean_run_count()


def iterate_set_bits(a: EwahBitmap) -> Iterator[int]:
    return a.iterate_set_bits()


class _Cursor:
    """Read position inside a compressed word list."""

    __slots__ = ("words", "n", "next_marker", "run_bit", "run_left", "lit_pos",
                 "lit_left", "visited")

    def __init__(self, bm: EwahBitmap) -> None:
        self.words = bm.words
        self.n = len(bm.words)
        self.next_marker = 0
        self.run_bit = 0
        self.run_left = 0
        self.lit_pos = 0
        self.lit_left = 0
        self.visited = 0

    def ready(self) -> bool:
        """Load markers until some words are pending; False at the end."""
        while not self.run_left and not self.lit_left:
            if self.next_marker >= self.n:
                return False
            m = self.words[self.next_marker]
            self.visited += 1
            self.run_bit = m & 1
            self.run_left = (m >> 1) & MAX_CLEAN_RUN
            self.lit_left = m >> 17
            self.lit_pos = self.next_marker + 1
            self.next_marker = self.lit_pos + self.lit_left
        return True

    def discard(self, n: int) -> None:
        while n:
            self.ready()
            if self.run_left:
                t = min(n, self.run_left)
                self.run_left -= t
            else:
                t = min(n, self.lit_left)
                self.lit_pos += t
                self.lit_left -= t
            n -= t

    def transfer(self, n: int, out: EwahBitmap, negate: bool) -> None:
        while n:
            self.ready()
            if self.run_left:
                t = min(n, self.run_left)
                out.add_clean_words(self.run_bit ^ negate, t)
                self.run_left -= t
            else:
                t = min(n, self.lit_left)
                chunk = self.words[self.lit_pos:self.lit_pos + t]
                if negate:
                    chunk = [w ^ ALL_ONES for w in chunk]
                out.add_literal_words(chunk)
                self.visited += t
                self.lit_pos += t
                self.lit_left -= t
            n -= t


# For each operator and predator clean bit: ("fill", bit) or ("copy", negate).
_RUN_EFFECT = {
    "and": {0: ("fill", 0), 1: ("copy", False)},
    "or": {0: ("copy", False), 1: ("fill", 1)},
    "xor": {0: ("copy", False), 1: ("copy", True)},
}
_WORD_OP = {"and": operator.and_, "or": operator.or_, "xor": operator.xor}


def _padded(bm: EwahBitmap, n_words: int) -> EwahBitmap:
    out = bm.copy()
    out.add_clean_words(0, n_words - bm.n_words)
    return out


def combine(a: EwahBitmap, b: EwahBitmap, op: str) -> tuple[EwahBitmap, int]:
    """Apply ``op`` ("and", "or", "xor") word-by-word on the compressed forms.

    Returns the result and the number of input words actually read (marker
    words plus verbatim words that took part in the computation). Verbatim
    words skipped under an annihilating clean run are not counted.

    Operands of different lengths are zero-extended to the longer one and a
    :class:`LengthMismatchWarning` is issued.
    """
    effects = _RUN_EFFECT[op]
    word_op = _WORD_OP[op]
    bit_length = max(a.bit_length, b.bit_length)
    if a.bit_length != b.bit_length:
        warnings.warn(
            f"bit lengths differ ({a.bit_length} vs {b.bit_length}); "
            "zero-extending the shorter operand",
            LengthMismatchWarning,
            stacklevel=2,
        )
        n_words = max(a.n_words, b.n_words)
        a, b = _padded(a, n_words), _padded(b, n_words)
    out = EwahBitmap()
    ca, cb = _Cursor(a), _Cursor(b)
    while ca.ready() and cb.ready():
        if ca.run_left or cb.run_left:
            if ca.run_left >= cb.run_left:
                pred, prey = ca, cb
            else:
                pred, prey = cb, ca
            n = pred.run_left
            pred.run_left = 0
            kind, arg = effects[pred.run_bit]
            if kind == "fill":
                out.add_clean_words(arg, n)
                prey.discard(n)
            else:
                prey.transfer(n, out, arg)
        else:
            n = min(ca.lit_left, cb.lit_left)
            xs = ca.words[ca.lit_pos:ca.lit_pos + n]
            ys = cb.words[cb.lit_pos:cb.lit_pos + n]
            out.add_literal_words(list(map(word_op, xs, ys)))
            ca.visited += n
            cb.visited += n
            ca.lit_pos += n
            cb.lit_pos += n
            ca.lit_left -= n
            cb.lit_left -= n
    out.bit_length = bit_length
    return out, ca.visited + cb.visited


def logical_and(a: EwahBitmap, b: EwahBitmap) -> EwahBitmap:
    return combine(a, b, "and")[0]


def logical_or(a: EwahBitmap, b: EwahBitmap) -> EwahBitmap:
    return combine(a, b, "or")[0]


def logical_xor(a: EwahBitmap, b: EwahBitmap) -> EwahBitmap:
    return combine(a, b, "xor")[0]


def logical_not(a: EwahBitmap) -> EwahBitmap:
    """Complement every bit below ``bit_length``; padding bits stay 0."""
    out = EwahBitmap()
    words = a.words
    tail = a.bit_length % WORD_BITS
    last_mask = (1 << tail) - 1 if tail else ALL_ONES
    remaining = a.n_words
    for bit, run, start, count in a.segments():
        chunk = [w ^ ALL_ONES for w in words[start:start + count]]
        remaining -= run + count
        if remaining == 0 and last_mask != ALL_ONES:
            # the final uncompressed word is partial: mask its padding
            if count:
                chunk[-1] &= last_mask
            elif run:
                out.add_clean_words(bit ^ 1, run - 1)
                out.add_literal_word(last_mask if bit == 0 else 0)
                run = 0
        out.add_clean_words(bit ^ 1, run)
        out.add_literal_words(chunk)
    out.bit_length = a.bit_length
    return out
