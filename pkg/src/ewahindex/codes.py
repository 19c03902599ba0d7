"""k-of-N bitmap codes: choosing k and N, enumerating codes, assigning them.

A code is a tuple of ``k`` strictly ascending bit positions in ``range(N)``;
position 0 is the leftmost character when a code is printed as a bit string
(``(0, 3)`` with ``N=4`` prints as ``"1001"``).
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from itertools import combinations, islice

__all__ = [
    "Code",
    "CodeAssignment",
    "CodeSpec",
    "CodeOverflowError",
    "assign_codes",
    "cap_k",
    "choose_N",
    "code_from_string",
    "code_to_string",
    "enumerate_codes",
    "enumerate_gc",
    "enumerate_lex",
    "hamming",
    "make_spec",
]

Code = tuple[int, ...]


class CodeOverflowError(ValueError):
    """More values than available k-of-N codes."""


def cap_k(k_requested: int, n_i: int) -> int:
    """Limit ``k`` for small columns: <5 values -> 1, <21 -> 2, <85 -> 3."""
    if n_i < 5:
        cap = 1
    elif n_i < 21:
        cap = 2
    elif n_i < 85:
        cap = 3
    else:
        cap = 4
    return min(k_requested, cap)


def choose_N(k: int, n_i: int) -> int:
    """Smallest ``N >= k`` with ``C(N, k) >= n_i``."""
    if k < 1 or n_i < 1:
        raise ValueError("k and n_i must be positive")
    # math.comb(N, k) is increasing in N; start from a cheap lower bound
    lo = max(k, int((math.factorial(k) * n_i) ** (1 / k)) - 1)
    while lo > k and math.comb(lo, k) >= n_i:
        lo -= 1
    N = lo
    while math.comb(N, k) < n_i:
        N += 1
    return N


@dataclass(frozen=True)
class CodeSpec:
    k: int
    N: int
    n_i: int

    def __post_init__(self) -> None:
        if not 1 <= self.k <= self.N:
            raise ValueError(f"need 1 <= k <= N, got k={self.k}, N={self.N}")
        if math.comb(self.N, self.k) < self.n_i:
            raise CodeOverflowError(
                f"C({self.N},{self.k}) < {self.n_i} values"
            )


def make_spec(k_requested: int, n_i: int) -> CodeSpec:
    """Cap ``k`` for the column size and pick the minimal ``N``."""
    k = cap_k(k_requested, n_i)
    return CodeSpec(k, choose_N(k, n_i), n_i)


def enumerate_gc(k: int, N: int) -> Iterator[Code]:
    """All k-of-N codes, successive codes at Hamming distance 2.

    Nested odometer: the first position ascends, the second descends from
    its maximum down to just past the first, the third ascends, and so on.
    """
    if not 1 <= k <= N:
        raise ValueError("need 1 <= k <= N")
    a = [0] * k

    def rec(i: int, lo: int) -> Iterator[Code]:
        hi = N - k + i
        rng = range(lo, hi + 1) if i % 2 == 0 else range(hi, lo - 1, -1)
        if i == k - 1:
            for v in rng:
                a[i] = v
                yield tuple(a)
        else:
            for v in rng:
                a[i] = v
                yield from rec(i + 1, v + 1)

    return rec(0, 0)


def enumerate_lex(k: int, N: int) -> Iterator[Code]:
    """All k-of-N codes in decreasing order of their printed bit strings.

    ``(2, 4)`` gives 1100, 1010, 1001, 0110, 0101, 0011.
    """
    if not 1 <= k <= N:
        raise ValueError("need 1 <= k <= N")
    return combinations(range(N), k)


def enumerate_codes(k: int, N: int, order: str) -> Iterator[Code]:
    if order == "gray":
        return enumerate_gc(k, N)
    if order == "lex":
        return enumerate_lex(k, N)
    raise ValueError(f"unknown code order {order!r}")


def hamming(a: Sequence[int] | str, b: Sequence[int] | str) -> int:
    """Hamming distance between two codes, or two bit strings/rows.

    Codes (tuples of positions) compare as position sets; strings and 0/1
    sequences of equal width compare position by position.
    """
    if isinstance(a, str) or isinstance(b, str):
        if len(a) != len(b):
            raise ValueError("bit strings must have equal width")
        return sum(x != y for x, y in zip(a, b))
    if isinstance(a, tuple) and isinstance(b, tuple):
        return len(set(a) ^ set(b))
    if len(a) != len(b):
        raise ValueError("rows must have equal width")
    return sum(bool(x) != bool(y) for x, y in zip(a, b))


def code_to_string(code: Code, N: int) -> str:
    bits = ["0"] * N
    for p in code:
        bits[p] = "1"
    return "".join(bits)


def code_from_string(s: str) -> Code:
    return tuple(i for i, ch in enumerate(s) if ch == "1")


@dataclass
class CodeAssignment:
    """Maps each value ID of a column to its k-of-N code.

    ``value_order`` records how values were ranked before drawing codes
    (``"id"``, ``"alpha"`` or ``"frequency"``); ``code_order`` is ``"lex"``
    or ``"gray"``.
    """

    spec: CodeSpec
    value_order: str
    code_order: str
    map: dict[int, Code] = field(default_factory=dict)

    def code(self, value_id: int) -> Code:
        return self.map[value_id]

    def codes_by_id(self) -> list[Code]:
        """Codes indexed by dense value ID."""
        return [self.map[v] for v in range(len(self.map))]


def assign_codes(
    ranked_values: Sequence[int],
    spec: CodeSpec,
    code_order: str = "gray",
    value_order: str = "id",
) -> CodeAssignment:
    """Give the value ranked ``i`` the ``i``-th code of the chosen enumeration."""
    n = len(ranked_values)
    if n > math.comb(spec.N, spec.k):
        raise CodeOverflowError(
            f"{n} values do not fit in C({spec.N},{spec.k}) codes"
        )
    codes = islice(enumerate_codes(spec.k, spec.N, code_order), n)
    mapping = dict(zip(ranked_values, codes))
    if len(mapping) != n:
        raise ValueError("ranked values must be distinct")
    return CodeAssignment(spec, value_order, code_order, mapping)
