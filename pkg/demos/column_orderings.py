# Which column should lead the sort?
#
# For every permutation of four columns we sort lexicographically, build a
# Gray-coded index and record its size. The heuristic's pick is starred.

import itertools

from ewahindex import build_index, generate_uniform, generate_zipf_table, plan_codes
from ewahindex.rowsort import format_column_order, order_columns_heuristic, sort_lexicographic

tables = {
    "uniform 200/400/600/800": generate_uniform(100_000, [200, 400, 600, 800], seed=7),
    "zipf 1.6/1.2/0.8/0.4": generate_zipf_table(100_000, [100] * 4, [1.6, 1.2, 0.8, 0.4], seed=7),
}

for label, t in tables.items():
    for k in (1, 2):
        plans = plan_codes(t, k)
        pick = order_columns_heuristic(t.cardinalities, k)
        sizes = {
            perm: build_index(t, sort_lexicographic(t, perm), plans).size_in_words()
            for perm in itertools.permutations(range(t.c))
        }
        ranked = sorted(sizes, key=sizes.get)
        best, worst = sizes[ranked[0]], sizes[ranked[-1]]
        print(f"{label}, k={k}: best {format_column_order(ranked[0])} ({best:,}), "
              f"worst {format_column_order(ranked[-1])} ({worst:,}), spread {worst / best - 1:.1%}")
        for perm in ranked[:3]:
            star = "*" if perm == pick else " "
            print(f"   {star} {format_column_order(perm)}  {sizes[perm]:,}")
        if pick not in ranked[:3]:
            print(f"   * {format_column_order(pick)}  {sizes[pick]:,}  "
                  f"(rank {ranked.index(pick) + 1} of {len(ranked)})")
