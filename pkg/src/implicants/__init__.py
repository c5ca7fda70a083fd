"""Prime implicants of Boolean functions, computed whole from truth tables.

Two interchangeable engines produce the complete prime implicant set of an
n-variable function: a dense one that runs bit-sliced merge/reduce passes
over all 3^n ternary strings, and a sparse hash-based one that walks
wildcard levels and only ever touches actual implicants. A slow oracle
built directly from definitions cross-checks both. Deterministic input
generation, four truth-table text formats, and a benchmark harness round
out the toolkit; the `implicants` console script exposes all of it.
"""

from .bench import ENGINES, BenchReport, format_table, run_benchmark, run_engine
from .dense import (
    DEFAULT_SPLIT,
    MERGE,
    REDUCE,
    DenseState,
    dense_prime_ranks,
    extract_ranks,
    extract_strings,
    find_primes_dense,
    load,
    merge_triple,
    reduce_triple,
    state_bytes,
)
from .errors import ImplicantsError, ParseError, ResourceLimitError
from .oracle import (
    covered_indices,
    is_antichain,
    is_implicant,
    literal_prime_strings,
    oracle_prime_ranks,
    oracle_primes,
    primes_cover_support,
)
from .sparse import (
    LevelSet,
    find_primes_sparse,
    generate_level,
    mark_parents_redundant,
    pack_points,
    packed_to_ranks,
    sparse_prime_ranks,
)
from .ternary import (
    MAX_N,
    SYMBOLS,
    TruthTable,
    covers,
    format_ternary,
    index_to_rank,
    pack,
    parse_ternary,
    rank,
    rank_digits,
    rank_weights,
    ranks_to_text,
    unpack,
    unrank,
    unrank_many,
    weight,
)
from .ttio import (
    FORMATS,
    FunctionSpec,
    parse_table,
    random_function,
    read_table,
    save_table,
    write_table,
)

__version__ = "0.1.0"

__all__ = [
    "BenchReport",
    "DEFAULT_SPLIT",
    "DenseState",
    "ENGINES",
    "FORMATS",
    "FunctionSpec",
    "ImplicantsError",
    "LevelSet",
    "MAX_N",
    "MERGE",
    "ParseError",
    "REDUCE",
    "ResourceLimitError",
    "SYMBOLS",
    "TruthTable",
    "covered_indices",
    "covers",
    "dense_prime_ranks",
    "extract_ranks",
    "extract_strings",
    "find_primes_dense",
    "find_primes_sparse",
    "format_table",
    "format_ternary",
    "generate_level",
    "index_to_rank",
    "is_antichain",
    "is_implicant",
    "literal_prime_strings",
    "load",
    "mark_parents_redundant",
    "merge_triple",
    "oracle_prime_ranks",
    "oracle_primes",
    "pack",
    "pack_points",
    "packed_to_ranks",
    "parse_table",
    "parse_ternary",
    "primes_cover_support",
    "random_function",
    "rank",
    "rank_digits",
    "rank_weights",
    "ranks_to_text",
    "read_table",
    "reduce_triple",
    "run_benchmark",
    "run_engine",
    "save_table",
    "sparse_prime_ranks",
    "state_bytes",
    "unpack",
    "unrank",
    "unrank_many",
    "weight",
    "write_table",
]
