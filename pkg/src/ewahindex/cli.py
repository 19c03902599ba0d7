"""Command-line front end.

Exit status: 0 on success, 1 on usage errors, 2 on data errors.
"""

from __future__ import annotations

import argparse
import itertools
import math
import sys
import time
from collections.abc import Sequence

import numpy as np

from . import costmodel
from .codes import choose_N
from .indexer import (
    DEFAULT_BLOCK_BUDGET,
    IndexFormatError,
    build_index,
    plan_codes,
    read_index,
    write_index,
)
from .query import batch_equality_benchmark, equality_query
from .rowsort import (
    format_column_order,
    order_columns_heuristic,
    parse_column_order,
    shuffle,
    sort_frequent_component,
    sort_gray_frequency,
    sort_lexicographic,
)
from .tableio import Table, TableError, generate_uniform, generate_zipf_table, load_csv, write_csv

SORTS = ("none", "shuffle", "lex", "gray-lex", "gray-freq", "freq-component")
MAX_ORDERING_COLUMNS = 6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# -- generator specs ----------------------------------------------------------


def _split_list(text: str, cast) -> list:
    if "x" in text and "/" not in text:
        value, times = text.split("x")
        return [cast(value)] * int(times)
    return [cast(v) for v in text.split("/")]


def parse_generator_spec(spec: str) -> dict:
    """Parse ``uniform:n=...,card=a/b/c,seed=7`` or ``zipf:n=...,card=100x4,skew=...``."""
    kind, _, body = spec.partition(":")
    if kind not in ("uniform", "zipf"):
        raise UsageError(f"unknown generator {kind!r} (expected uniform or zipf)")
    params: dict = {"kind": kind, "seed": 0}
    for item in filter(None, body.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise UsageError(f"bad generator parameter {item!r}")
        if key == "n":
            params["n"] = int(value)
        elif key == "card":
            params["card"] = _split_list(value, int)
        elif key == "skew":
            params["skew"] = _split_list(value, float)
        elif key == "seed":
            params["seed"] = int(value)
        else:
            raise UsageError(f"unknown generator parameter {key!r}")
    if "n" not in params or "card" not in params:
        raise UsageError("generator spec needs n= and card=")
    if kind == "zipf":
        skew = params.get("skew")
        if skew is None:
            raise UsageError("zipf generator needs skew=")
        if len(skew) == 1:
            skew = skew * len(params["card"])
        if len(params["card"]) == 1:
            params["card"] = params["card"] * len(skew)
        if len(skew) != len(params["card"]):
            raise UsageError("zipf generator needs one skew per column")
        params["skew"] = skew
    return params


def generate_from_spec(spec: str) -> Table:
    p = parse_generator_spec(spec)
    if p["kind"] == "uniform":
        return generate_uniform(p["n"], p["card"], p["seed"])
    return generate_zipf_table(p["n"], p["card"], p["skew"], p["seed"])


def _load_table(args) -> Table:
    if args.generate:
        return generate_from_spec(args.generate)
    if not args.csv:
        raise UsageError("give a CSV path or --generate SPEC")
    return load_csv(args.csv, args.delimiter, args.header)


# -- pipeline -----------------------------------------------------------------


def resolve_column_order(t: Table, how: str, k: int) -> tuple[int, ...]:
    if how == "given":
        return tuple(range(t.c))
    if how == "heuristic":
        return order_columns_heuristic(t.cardinalities, k)
    try:
        return parse_column_order(how, t.c)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def prepare(t: Table, sort: str, k: int, col_order, code_order: str, seed=0):
    """Row order and code plans for one of the named sorting strategies."""
    value_order = "id"
    if sort == "gray-lex":
        code_order = "gray"
    elif sort == "gray-freq":
        code_order, value_order = "gray", "frequency"
    elif sort == "freq-component":
        value_order = "frequency"
    plans = plan_codes(t, k, code_order, value_order)
    if sort == "none":
        order = np.arange(t.n)
    elif sort == "shuffle":
        order = shuffle(t, seed)
    elif sort in ("lex", "gray-lex"):
        order = sort_lexicographic(t, col_order)
    elif sort == "gray-freq":
        order = sort_gray_frequency(t, col_order)
    elif sort == "freq-component":
        order = sort_frequent_component(t)
    else:
        raise UsageError(f"unknown sort {sort!r}")
    return order, plans


def cmd_build(args) -> int:
    t = _load_table(args)
    col_order = resolve_column_order(t, args.col_order, args.k)
    if args.col_order == "heuristic":
        print(f"# column order {format_column_order(col_order)}", file=sys.stderr)
    t0 = time.perf_counter()
    order, plans = prepare(t, args.sort, args.k, col_order, args.code_order, args.seed)
    idx = build_index(t, order, plans, args.block_budget)
    elapsed = time.perf_counter() - t0
    write_index(idx, args.output)
    report = costmodel.measure_storage_cost(idx)
    costmodel.write_tsv(
        sys.stdout,
        ["n", "L", "size_words", "dirty_words", "build_seconds", "col_order"],
        [[idx.n, idx.L, idx.size_in_words(), report.dirty_words, round(elapsed, 4),
          format_column_order(col_order)]],
    )
    return 0


def _column_arg(idx, text: str) -> int:
    j = int(text) - 1
    if not 0 <= j < idx.c:
        raise UsageError(f"column must be between 1 and {idx.c}")
    return j


def cmd_query(args) -> int:
    idx = read_index(args.index)
    if args.random:
        columns = [_column_arg(idx, args.column)] if args.column else range(idx.c)
        rows = []
        for j in columns:
            words, secs = batch_equality_benchmark(idx, j, args.random, args.seed)
            rows.append([j + 1, idx.plans[j].spec.k, idx.dicts[j].cardinality, words, secs])
        costmodel.write_tsv(
            sys.stdout, ["column", "k", "n_i", "mean_words_scanned", "mean_seconds"], rows
        )
        return 0
    if args.column is None or args.value is None:
        raise UsageError("query needs COLUMN and VALUE (or --random TRIALS)")
    result, _ = equality_query(idx, _column_arg(idx, args.column), args.value)
    sys.stdout.write("".join(f"{r}\n" for r in result.tolist()))
    return 0


def cmd_stats(args) -> int:
    idx = read_index(args.index)
    report = costmodel.measure_storage_cost(idx)
    rows = []
    offsets = idx.column_offsets()
    for j, plan in enumerate(idx.plans):
        sizes = dirty = runs = 0
        for block in idx.blocks:
            for b in range(offsets[j], offsets[j] + plan.spec.N):
                bm = block.bitmaps[b]
                sizes += bm.size_in_words()
                dirty += bm.dirty_word_count()
                runs += bm.clean_run_count()
        rows.append([j + 1, plan.spec.k, plan.spec.N, plan.spec.n_i, sizes, dirty, runs])
    rows.append(["all", "", idx.L, sum(idx.dicts[j].cardinality for j in range(idx.c)),
                 idx.size_in_words(), report.dirty_words, report.clean_runs])
    costmodel.write_tsv(
        sys.stdout, ["column", "k", "N", "n_i", "size_words", "dirty_words", "clean_runs"], rows
    )
    return 0


def cmd_generate(args) -> int:
    write_csv(generate_from_spec(args.spec), args.output)
    return 0


def ordering_sizes(t: Table, ks: Sequence[int], code_order: str = "gray"):
    """Index size in words for every column ordering and each ``k``.

    Yields ``(ordering, k, size, is_heuristic_pick)`` sorted by k then ordering.
    """
    if t.c > MAX_ORDERING_COLUMNS:
        raise UsageError(f"at most {MAX_ORDERING_COLUMNS} columns (got {t.c})")
    out = []
    for k in ks:
        plans = plan_codes(t, k, code_order)
        pick = order_columns_heuristic(t.cardinalities, k)
        for perm in itertools.permutations(range(t.c)):
            size = build_index(t, sort_lexicographic(t, perm), plans).size_in_words()
            out.append((format_column_order(perm), k, size, int(perm == pick)))
    out.sort(key=lambda r: (r[1], r[0]))
    return out


def cmd_experiment_orderings(args) -> int:
    t = generate_from_spec(args.spec) if ":" in args.spec else load_csv(args.spec)
    rows = ordering_sizes(t, args.k, args.code_order)
    costmodel.write_tsv(sys.stdout, ["ordering", "k", "size_words", "heuristic"], rows)
    return 0


def _geometric_grid(lo: int, hi: int, points: int) -> list[int]:
    return sorted({int(round(x)) for x in np.geomspace(lo, hi, points)})


def model_rows(args):
    if args.figure == "gain":
        for k in args.k:
            for n_i in _geometric_grid(1, args.n, args.points):
                yield n_i, f"k={k}", costmodel.column_gain(args.n, n_i, k, args.w)
    elif args.figure == "query-ratio":
        for k in args.k:
            for n_i in _geometric_grid(1, args.n_values, args.points):
                yield n_i, f"k={k}", costmodel.query_cost_ratio(n_i, k)
                yield n_i, f"k={k},bound", costmodel.pessimistic_query_cost_ratio(n_i, k)
    elif args.figure == "chunk-dirty":
        for k in args.k:
            if args.width == "formula":
                N = math.ceil(k * args.n_values ** (1 / k))
            else:
                N = choose_N(k, args.n_values)
            for adj in ("gc", "lex", "random"):
                for j in range(1, 33):
                    mean = costmodel.chunk_dirty_expectation(
                        j, k, N, adj, args.trials, args.seed, args.n_values
                    )
                    yield j, f"k={k},{adj}", mean
    else:
        raise UsageError(f"unknown figure {args.figure!r}")


def cmd_emit_model(args) -> int:
    costmodel.write_tsv(sys.stdout, ["x", "series", "value"], model_rows(args))
    return 0


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",")]


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ewahindex", description="EWAH bitmap index toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="build an index from a CSV file or generator spec")
    b.add_argument("csv", nargs="?", help="input CSV file")
    b.add_argument("--generate", metavar="SPEC",
                   help="synthetic table, e.g. uniform:n=100000,card=200/400,seed=7")
    b.add_argument("--delimiter", default=",", help="CSV field delimiter (default ',')")
    b.add_argument("--header", action="store_true", help="skip the first CSV line")
    b.add_argument("--k", type=int, default=1, help="bits per code (capped for small columns)")
    b.add_argument("--sort", choices=SORTS, default="gray-lex", help="row ordering")
    b.add_argument("--col-order", default="given",
                   help="given, heuristic, or a permutation such as 2134")
    b.add_argument("--code-order", choices=("lex", "gray"), default="gray",
                   help="code enumeration for sorts that do not fix it")
    b.add_argument("--block-budget", type=int, default=DEFAULT_BLOCK_BUDGET,
                   help="bytes of compressed bitmaps per block")
    b.add_argument("--seed", type=int, default=0, help="seed for --sort shuffle")
    b.add_argument("-o", "--output", required=True, help="index file to write")
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="equality query or random-query benchmark")
    q.add_argument("index")
    q.add_argument("column", nargs="?", help="1-based column number")
    q.add_argument("value", nargs="?", help="value to look up")
    q.add_argument("--random", type=int, metavar="TRIALS",
                   help="run TRIALS random queries per column and print mean cost")
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=cmd_query)

    s = sub.add_parser("stats", help="per-column sizes of an index file")
    s.add_argument("index")
    s.set_defaults(func=cmd_stats)

    g = sub.add_parser("generate", help="write a synthetic table as CSV")
    g.add_argument("spec")
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("experiment-orderings",
                       help="index size for every column ordering (TSV)")
    e.add_argument("spec", help="generator spec or CSV path")
    e.add_argument("--k", type=_int_list, default=[1], help="comma-separated k values")
    e.add_argument("--code-order", choices=("lex", "gray"), default="gray")
    e.set_defaults(func=cmd_experiment_orderings)

    m = sub.add_parser("emit-model", help="model curves as TSV (x, series, value)")
    m.add_argument("--figure", choices=("gain", "chunk-dirty", "query-ratio"), required=True)
    m.add_argument("--n", type=int, default=100_000, help="rows (gain)")
    m.add_argument("--k", type=_int_list, default=[1, 2, 3])
    m.add_argument("--w", type=int, default=32, help="word size (gain)")
    m.add_argument("--points", type=int, default=200, help="grid points")
    m.add_argument("--n-values", type=int, default=1000,
                   help="column cardinality (chunk-dirty, query-ratio)")
    m.add_argument("--width", choices=("minimal", "formula"), default="minimal",
                   help="N for chunk-dirty: minimal C(N,k) >= n or ceil(k n^(1/k))")
    m.add_argument("--trials", type=int, default=10_000)
    m.add_argument("--seed", type=int, default=0)
    m.set_defaults(func=cmd_emit_model)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ewahindex: {exc}", file=sys.stderr)
        return 1
    except (TableError, IndexFormatError, OSError, ValueError, KeyError) as exc:
        print(f"ewahindex: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
