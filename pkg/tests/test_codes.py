import math
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ewahindex.codes import (
    CodeOverflowError,
    CodeSpec,
    assign_codes,
    cap_k,
    choose_N,
    code_from_string,
    code_to_string,
    enumerate_codes,
    enumerate_gc,
    enumerate_lex,
    hamming,
    make_spec,
)


def strings(codes, N):
    return [code_to_string(c, N) for c in codes]


def test_cap_k_examples():
    assert cap_k(4, 4) == 1
    assert cap_k(3, 20) == 2
    assert cap_k(2, 1000) == 2
    assert cap_k(4, 84) == 3
    assert cap_k(4, 85) == 4


@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 500), st.integers(1, 500))
def test_cap_k_monotone(k1, k2, n1, n2):
    if k1 <= k2 and n1 <= n2:
        assert cap_k(k1, n1) <= cap_k(k2, n2)


def test_choose_N_examples():
    assert choose_N(1, 7) == 7
    assert choose_N(2, 2_000_000) == 2001
    assert choose_N(2, 5) == 4
    assert math.comb(2000, 2) < 2_000_000 <= math.comb(2001, 2)


@given(st.integers(1, 4), st.integers(1, 10**6))
def test_choose_N_minimal_and_within_formula(k, n):
    N = choose_N(k, n)
    assert math.comb(N, k) >= n
    assert N == k or math.comb(N - 1, k) < n
    assert N <= math.ceil(k * n ** (1 / k))


def test_gc_two_of_four():
    assert strings(enumerate_gc(2, 4), 4) == ["1001", "1010", "1100", "0101", "0110", "0011"]


def test_gc_one_of_three():
    assert strings(enumerate_gc(1, 3), 3) == ["100", "010", "001"]


def test_lex_two_of_four():
    assert strings(enumerate_lex(2, 4), 4) == ["1100", "1010", "1001", "0110", "0101", "0011"]
    lex = list(enumerate_lex(2, 4))
    assert hamming(lex[2], lex[3]) == 4


@pytest.mark.parametrize("N", range(1, 13))
def test_gc_exact_for_all_k(N):
    for k in range(1, N + 1):
        codes = list(enumerate_gc(k, N))
        assert set(codes) == set(combinations(range(N), k))
        assert len(codes) == math.comb(N, k)
        assert all(hamming(a, b) == 2 for a, b in zip(codes, codes[1:]))
        assert list(enumerate_lex(k, N)) == list(combinations(range(N), k))


def test_gc_k1_is_ascending():
    assert list(enumerate_gc(1, 6)) == [(i,) for i in range(6)]


def test_hamming():
    assert hamming("1001", "0110") == 4
    assert hamming((0, 3), (1, 2)) == 4
    assert hamming((2, 5), (2, 5)) == 0
    gc = list(enumerate_gc(2, 5))
    assert {hamming(a, b) for a, b in zip(gc, gc[1:])} == {2}


def test_code_string_round_trip():
    assert code_to_string((0, 3), 4) == "1001"
    assert code_from_string("0110") == (1, 2)


def test_spec_validation():
    assert make_spec(4, 4) == CodeSpec(1, 4, 4)
    assert make_spec(2, 1000).N == choose_N(2, 1000)
    with pytest.raises(ValueError):
        CodeSpec(2, 3, 4)


def test_city_codes():
    # the printed 2-of-N codes are the lexicographic 2-of-4 prefix padded to 6 bitmaps
    cities = ["Montreal", "Paris", "Toronto", "New York", "Berlin"]
    a = assign_codes(list(range(5)), CodeSpec(2, 4, 5), "lex")
    got = {cities[v]: code_to_string(c, 6) for v, c in a.map.items()}
    assert got == {
        "Montreal": "110000",
        "Paris": "101000",
        "Toronto": "100100",
        "New York": "011000",
        "Berlin": "010100",
    }
    six = assign_codes(list(range(5)), CodeSpec(2, 6, 5), "lex")
    assert code_to_string(six.code(3), 6) == "100010"
    unary = assign_codes(list(range(5)), CodeSpec(1, 15, 5), "gray")
    assert [unary.code(i) for i in range(5)] == [(i,) for i in range(5)]


def test_assign_gray_prefix():
    a = assign_codes([2, 0, 1], CodeSpec(2, 4, 3), "gray")
    assert [code_to_string(a.code(v), 4) for v in (2, 0, 1)] == ["1001", "1010", "1100"]
    assert a.codes_by_id() == [a.code(0), a.code(1), a.code(2)]


def test_assign_overflow():
    with pytest.raises(CodeOverflowError):
        assign_codes(list(range(7)), CodeSpec(2, 4, 6), "gray")


def test_enumerate_codes_rejects_unknown_order():
    with pytest.raises(ValueError):
        list(enumerate_codes(2, 4, "random"))
