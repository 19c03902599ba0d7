# A 32-row chunk holding j distinct values: how many bitmaps turn dirty?
# Consecutive Gray-code ranks against consecutive lexicographic ranks against
# codes picked at random, for 1000 values.

from ewahindex.codes import choose_N
from ewahindex.costmodel import chunk_dirty_expectation

n_values = 1000
for k in (1, 2, 3):
    N = choose_N(k, n_values)
    print(f"k={k}, N={N}")
    print("    j     gc    lex  random")
    for j in (2, 4, 8, 16, 24, 32):
        row = [chunk_dirty_expectation(j, k, N, adj, 10_000, seed=j, n_values=n_values)
               for adj in ("gc", "lex", "random")]
        print(f"  {j:>3} " + " ".join(f"{x:6.2f}" for x in row))
