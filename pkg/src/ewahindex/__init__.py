"""EWAH compressed bitmap indexes with k-of-N codes and row-ordering heuristics."""

from .codes import (
    CodeAssignment,
    CodeOverflowError,
    CodeSpec,
    assign_codes,
    cap_k,
    choose_N,
    enumerate_codes,
    enumerate_gc,
    enumerate_lex,
    hamming,
    make_spec,
)
from .costmodel import (
    CostReport,
    chunk_dirty_expectation,
    column_gain,
    expected_dirty_words,
    measure_storage_cost,
    query_cost_ratio,
    sorted_column_bounds,
    total_hamming_cost,
)
from .ewah import EwahBitmap, LengthMismatchWarning, new_empty
from .indexer import (
    BitmapIndex,
    IndexFormatError,
    build_index,
    build_index_naive,
    plan_codes,
    read_index,
    write_index,
)
from .query import QueryStats, batch_equality_benchmark, equality_query
from .rowsort import (
    gc_compare,
    order_columns_heuristic,
    shuffle,
    sort_frequent_component,
    sort_gray_frequency,
    sort_graycode_rows,
    sort_lexicographic,
)
from .tableio import (
    ColumnDictionary,
    Table,
    TableError,
    generate_uniform,
    generate_zipf,
    generate_zipf_table,
    load_csv,
    write_csv,
)

__version__ = "0.1.0"

__all__ = [
    "assign_codes",
    "batch_equality_benchmark",
    "BitmapIndex",
    "build_index",
    "build_index_naive",
    "cap_k",
    "choose_N",
    "chunk_dirty_expectation",
    "CodeAssignment",
    "CodeOverflowError",
    "CodeSpec",
    "column_gain",
    "ColumnDictionary",
    "CostReport",
    "enumerate_codes",
    "enumerate_gc",
    "enumerate_lex",
    "equality_query",
    "EwahBitmap",
    "expected_dirty_words",
    "gc_compare",
    "generate_uniform",
    "generate_zipf",
    "generate_zipf_table",
    "hamming",
    "IndexFormatError",
    "LengthMismatchWarning",
    "load_csv",
    "make_spec",
    "measure_storage_cost",
    "new_empty",
    "order_columns_heuristic",
    "plan_codes",
    "query_cost_ratio",
    "QueryStats",
    "read_index",
    "shuffle",
    "sort_frequent_component",
    "sort_gray_frequency",
    "sort_graycode_rows",
    "sort_lexicographic",
    "sorted_column_bounds",
    "Table",
    "TableError",
    "total_hamming_cost",
    "write_csv",
    "write_index",
]
