import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ewahindex.ewah import (
    ALL_ONES,
    MAX_CLEAN_RUN,
    MAX_DIRTY_COUNT,
    EwahBitmap,
    LengthMismatchWarning,
    clean_run_count,
    combine,
    dirty_word_count,
    iterate_set_bits,
    logical_and,
    logical_not,
    logical_or,
    logical_xor,
    make_marker,
    marker_fields,
    new_empty,
    size_in_words,
)

M = make_marker


def oracle_encode(bits) -> list[int]:
    """Independent word-by-word encoder producing the normal form."""
    bits = np.asarray(bits, dtype=bool)
    n = -(-bits.size // 32)
    padded = np.zeros(n * 32, dtype=bool)
    padded[: bits.size] = bits
    segs = [[0, 0, []]]
    for i in range(n):
        chunk = padded[32 * i : 32 * i + 32]
        w = sum(1 << j for j in range(32) if chunk[j])
        cur = segs[-1]
        if w in (0, ALL_ONES):
            b = int(w == ALL_ONES)
            if not cur[2] and (cur[1] == 0 or cur[0] == b) and cur[1] < MAX_CLEAN_RUN:
                cur[0] = b
                cur[1] += 1
            else:
                segs.append([b, 1, []])
        elif len(cur[2]) == MAX_DIRTY_COUNT:
            segs.append([0, 0, [w]])
        else:
            cur[2].append(w)
    out = []
    for b, run, lits in segs:
        out.append(M(b, run, len(lits)))
        out.extend(lits)
    return out


def oracle_counts(bits) -> tuple[int, int]:
    """(dirty words, maximal clean runs) from the uncompressed words."""
    bits = np.asarray(bits, dtype=bool)
    n = -(-bits.size // 32)
    padded = np.zeros(n * 32, dtype=bool)
    padded[: bits.size] = bits
    kinds = []
    for i in range(n):
        chunk = padded[32 * i : 32 * i + 32]
        kinds.append(1 if chunk.all() else 0 if not chunk.any() else None)
    dirty = kinds.count(None)
    runs = sum(1 for i, k in enumerate(kinds) if k is not None and (i == 0 or kinds[i - 1] != k))
    return dirty, runs


def random_bits(rng, n, density):
    return rng.random(n) < density


bit_arrays = st.integers(0, 2000).flatmap(
    lambda n: st.lists(st.booleans(), min_size=n, max_size=n)
)


@st.composite
def runny_bits(draw, max_len=4000):
    """Bit strings made of long constant stretches plus noise, so clean runs appear."""
    n = draw(st.integers(0, max_len))
    out = np.zeros(n, dtype=bool)
    pos = 0
    while pos < n:
        length = draw(st.integers(1, 300))
        kind = draw(st.sampled_from(["zeros", "ones", "noise"]))
        if kind == "ones":
            out[pos : pos + length] = True
        elif kind == "noise":
            seed = draw(st.integers(0, 2**16))
            out[pos : pos + length] = np.random.default_rng(seed).random(min(length, n - pos)) < 0.5
        pos += length
    return out


# -- construction ---------------------------------------------------------------


def test_new_empty():
    b = new_empty()
    assert b.words == [M(0, 0, 0)]
    assert b.bit_length == 0
    assert size_in_words(b) == 1
    assert list(iterate_set_bits(b)) == []
    assert (size_in_words(b), dirty_word_count(b), clean_run_count(b)) == (1, 0, 0)


def test_marker_layout():
    m = M(1, 0xFFFF, 0x7FFF)
    assert m == 0xFFFFFFFF
    assert marker_fields(M(1, 3, 5)) == (1, 3, 5)
    assert M(0, 3, 1) == (3 << 1) | (1 << 17)


def test_add_clean_words():
    b = new_empty().add_clean_words(0, 3)
    assert b.words == [M(0, 3, 0)]
    assert b.bit_length == 96


def test_clean_run_counter_overflow():
    # the 16-bit field holds at most 65535, so 2**16 + 1 words split 65535 + 2
    b = new_empty().add_clean_words(0, 2**16 + 1)
    assert b.words == [M(0, 65535, 0), M(0, 2, 0)]
    b = new_empty().add_clean_words(0, 2**16)
    assert b.words == [M(0, 65535, 0), M(0, 1, 0)]
    assert clean_run_count(b) == 1


def test_clean_type_change():
    b = new_empty().add_clean_words(1, 1).add_clean_words(0, 1)
    assert b.words == [M(1, 1, 0), M(0, 1, 0)]
    assert clean_run_count(b) == 2


def test_add_literal_word():
    assert new_empty().add_literal_word(1).words == [M(0, 0, 1), 1]
    assert new_empty().add_literal_word(0) == new_empty().add_clean_words(0, 1)
    assert new_empty().add_literal_word(ALL_ONES) == new_empty().add_clean_words(1, 1)


def test_dirty_counter_saturates():
    b = new_empty()
    for _ in range(MAX_DIRTY_COUNT + 2):
        b.add_literal_word(5)
    assert marker_fields(b.words[0]) == (0, 0, MAX_DIRTY_COUNT)
    assert marker_fields(b.words[MAX_DIRTY_COUNT + 1]) == (0, 0, 2)
    assert dirty_word_count(b) == MAX_DIRTY_COUNT + 2
    bulk = new_empty().add_literal_words([5] * (MAX_DIRTY_COUNT + 2))
    assert bulk == b


def test_single_bit_at_32():
    b = EwahBitmap.from_positions([32], 64)
    assert b.words == [M(0, 1, 1), 0x00000001]
    assert list(b.iterate_set_bits()) == [32]


def test_counts_example():
    b = EwahBitmap.from_compressed([M(0, 3, 1), 0x10], 128)
    assert (b.size_in_words(), b.dirty_word_count(), b.clean_run_count()) == (2, 1, 1)


def test_from_compressed_rejects_bad_input():
    with pytest.raises(ValueError):
        EwahBitmap.from_compressed([M(0, 1, 2), 7], 96)
    with pytest.raises(ValueError):
        EwahBitmap.from_compressed([M(0, 3, 0)], 64)
    with pytest.raises(ValueError):
        EwahBitmap.from_compressed([], 0)


def test_extend_concatenates():
    rng = np.random.default_rng(3)
    a, b = random_bits(rng, 320, 0.1), random_bits(rng, 100, 0.4)
    joined = EwahBitmap.from_bools(a).extend(EwahBitmap.from_bools(b))
    assert np.array_equal(joined.to_bools(), np.concatenate([a, b]))
    assert joined == EwahBitmap.from_bools(np.concatenate([a, b]))


# -- operations -------------------------------------------------------------------


def test_and_annihilator():
    rng = np.random.default_rng(0)
    x = EwahBitmap.from_bools(random_bits(rng, 5000, 0.2))
    z = EwahBitmap.from_bools(np.zeros(5000, bool))
    r = logical_and(x, z)
    assert r == z
    assert r.size_in_words() <= x.size_in_words()


def test_xor_self_is_zero():
    rng = np.random.default_rng(1)
    bits = random_bits(rng, 32 * (2**16 + 40), 0.001)
    x = EwahBitmap.from_bools(bits)
    r = logical_xor(x, x)
    assert r.cardinality() == 0
    assert r.words == [M(0, 65535, 0), M(0, 41, 0)]


def test_or_of_five_bounded():
    rng = np.random.default_rng(2)
    bms = [random_bits(rng, 2048, d) for d in (0.001, 0.01, 0.05, 0.3, 0.002)]
    acc = EwahBitmap.from_bools(bms[0])
    total = acc.size_in_words()
    for bits in bms[1:]:
        e = EwahBitmap.from_bools(bits)
        total += e.size_in_words()
        acc = logical_or(acc, e)
    assert np.array_equal(acc.to_bools(), np.logical_or.reduce(bms))
    assert acc.size_in_words() <= total + 2


def test_not_examples():
    z = EwahBitmap.from_bools(np.zeros(96, bool))
    assert logical_not(z).words == [M(1, 3, 0)]
    x = EwahBitmap.from_compressed([M(0, 1, 1), 1], 64)
    assert logical_not(x).words == [M(1, 1, 1), 0xFFFFFFFE]


def test_not_masks_partial_word():
    z = EwahBitmap.from_bools(np.zeros(40, bool))
    n = ~z
    assert n.cardinality() == 40
    assert list(n.iterate_set_bits()) == list(range(40))


def test_all_ones_iteration():
    b = EwahBitmap.from_bools(np.ones(64, bool))
    assert list(b.iterate_set_bits()) == list(range(64))


def test_length_mismatch_zero_extends():
    a = EwahBitmap.from_positions([1, 70], 96)
    b = EwahBitmap.from_positions([1], 32)
    with pytest.warns(LengthMismatchWarning):
        r = logical_or(a, b)
    assert r.bit_length == 96
    assert list(r.iterate_set_bits()) == [1, 70]


def test_equal_lengths_do_not_warn():
    a = EwahBitmap.from_positions([3], 50)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        logical_and(a, a)


# -- properties ------------------------------------------------------------------


def size_bound(n_bits: int) -> int:
    return -(-n_bits // 32) + -(-n_bits // (32 * 2**15)) + 1


@given(runny_bits())
@settings(max_examples=150, deadline=None)
def test_round_trip_and_normal_form(bits):
    b = EwahBitmap.from_bools(bits)
    assert np.array_equal(b.to_bools(), bits)
    assert b.words == oracle_encode(bits)
    assert b.words[0] == b.words[0] & 0xFFFFFFFF
    assert b.size_in_words() <= size_bound(bits.size)
    assert list(b.iterate_set_bits()) == np.flatnonzero(bits).tolist()
    assert b.cardinality() == int(bits.sum())
    assert (b.dirty_word_count(), b.clean_run_count()) == oracle_counts(bits)


@given(bit_arrays)
@settings(max_examples=100, deadline=None)
def test_round_trip_plain(bits):
    bits = np.array(bits, dtype=bool)
    b = EwahBitmap.from_bools(bits)
    assert np.array_equal(b.to_bools(), bits)
    assert EwahBitmap.from_compressed(b.words, b.bit_length) == b


def test_size_bound_worst_case():
    # alternating bits: every word dirty, plus a marker per 2**15 literals
    n = 32 * (2**15 + 5)
    bits = np.zeros(n, dtype=bool)
    bits[::2] = True
    b = EwahBitmap.from_bools(bits)
    assert b.size_in_words() == 2**15 + 5 + 2
    assert b.size_in_words() <= size_bound(n)


@given(st.integers(0, 3000).flatmap(lambda n: st.tuples(runny_bits(n), runny_bits(n))))
@settings(max_examples=150, deadline=None)
def test_binary_ops_match_oracle(pair):
    x, y = pair
    n = min(x.size, y.size)
    x, y = x[:n], y[:n]
    a, b = EwahBitmap.from_bools(x), EwahBitmap.from_bools(y)
    for op, ref in (("and", np.logical_and), ("or", np.logical_or), ("xor", np.logical_xor)):
        r, visited = combine(a, b, op)
        expect = ref(x, y)
        assert np.array_equal(r.to_bools(), expect)
        assert r.words == oracle_encode(expect)
        assert r.bit_length == n
        assert visited <= a.size_in_words() + b.size_in_words()
    assert logical_and(a, b).size_in_words() <= a.size_in_words() + b.size_in_words()
    assert logical_or(a, b).size_in_words() <= a.size_in_words() + b.size_in_words() + 2


@st.composite
def sparse_pairs(draw):
    """Equal-length pairs with no all-ones words, as in a sparse index."""
    n = draw(st.integers(0, 3000))
    out = []
    for _ in range(2):
        bits = draw(runny_bits(n))[:n]
        bits = np.pad(bits, (0, n - bits.size))
        words = bits.size // 32
        full = bits[: words * 32].reshape(words, 32).all(axis=1)
        bits[: words * 32].reshape(words, 32)[full, 0] = False
        out.append(bits)
    return out


@given(sparse_pairs())
@settings(max_examples=150, deadline=None)
def test_and_size_bound_without_one_runs(pair):
    a, b = (EwahBitmap.from_bools(x) for x in pair)
    assert logical_and(a, b).size_in_words() <= min(a.size_in_words(), b.size_in_words()) + 2


def test_and_with_ones_run_can_exceed_min():
    # a one-word all-ones bitmap ANDed with x returns x, larger than min + 2
    ones = EwahBitmap.from_bools(np.ones(32 * 10, bool))
    bits = np.zeros(32 * 10, bool)
    bits[::3] = True
    x = EwahBitmap.from_bools(bits)
    assert logical_and(ones, x) == x
    assert x.size_in_words() > ones.size_in_words() + 2


@given(runny_bits())
@settings(max_examples=100, deadline=None)
def test_not_is_involution(bits):
    a = EwahBitmap.from_bools(bits)
    na = logical_not(a)
    assert np.array_equal(na.to_bools(), ~bits)
    assert na.words == oracle_encode(~bits)
    assert logical_not(na) == a


def test_clean_only_bitmap_has_no_dirty_words():
    b = new_empty().add_clean_words(1, 70000).add_clean_words(0, 5)
    assert b.dirty_word_count() == 0
    assert b.clean_run_count() == 2
