"""How much does row order matter?

Builds the same skewed table under five row orders and prints index sizes
for k = 1 and k = 2. Run with ``python demos/sorting_shrinks_indexes.py``.
"""

import time

from ewahindex import build_index, generate_zipf_table, plan_codes, shuffle
from ewahindex.rowsort import sort_frequent_component, sort_gray_frequency, sort_lexicographic

n = 100_000
t = generate_zipf_table(n, [100] * 4, [1.6, 1.2, 0.8, 0.4], seed=7)
print(t)

orders = {
    "as generated": None,
    "shuffled": shuffle(t, seed=7),
    "lexicographic": sort_lexicographic(t),
    "gray-frequency": sort_gray_frequency(t),
    "frequent-component": sort_frequent_component(t),
}

for k in (1, 2):
    # frequency-ranked codes pair naturally with the frequency-aware sorts
    plans = {
        "id": plan_codes(t, k, "gray", "id"),
        "frequency": plan_codes(t, k, "gray", "frequency"),
    }
    print(f"\nk = {k}")
    base = None
    for name, order in orders.items():
        ranked = "frequency" if "freq" in name else "id"
        t0 = time.perf_counter()
        idx = build_index(t, order, plans[ranked])
        secs = time.perf_counter() - t0
        words = idx.size_in_words()
        base = base or words
        print(f"  {name:<20} {words:>9,} words  {base / words:5.2f}x smaller  ({secs:.2f}s)")
