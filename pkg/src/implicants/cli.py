"""Command-line interface.

Subcommands:
  primes   compute all prime implicants of one function
  verify   run several engines on the same input and compare outputs
  bench    time engines over sweeps of generated inputs, JSONL reports
  gen      emit a deterministic pseudorandom truth table

Exit codes: 0 success, 1 bad input or usage, 2 resource limit exceeded,
3 verify found disagreeing engines.

Inputs come from a file (--input, with --format when the extension does
not give it away) or are generated in-process from --n/--density/--seed,
which is bit-reproducible across machines. Prime listings are one string
per line, most-general first (wildcard count descending, rank ascending),
and are byte-identical across engines.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .bench import ENGINES, format_table, run_benchmark, run_engine
from .errors import ParseError, ResourceLimitError
from .ternary import rank_weights, ranks_to_text, unrank_many
from .ttio import (
    FORMATS,
    FunctionSpec,
    infer_format,
    parse_table,
    random_function,
    read_table,
    write_table,
)

# Internal test hook: name an engine here to corrupt its verify output,
# exercising the mismatch path end to end.
_CORRUPT_ENV = "IMPLICANTS_VERIFY_CORRUPT"


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit 1, like our parse errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_input_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("input (file or generated)")
    g.add_argument("--input", "-i", metavar="PATH", help="truth table file, '-' for stdin")
    g.add_argument("--format", choices=FORMATS, help="file format (default: from extension)")
    g.add_argument("--n", type=int, help="variable count (generated input, decimal minterms)")
    g.add_argument("--density", type=float, help="satisfying fraction for generated input")
    g.add_argument("--seed", type=int, default=0, help="generator seed (default 0)")
    g.add_argument(
        "--exact",
        action="store_true",
        help="generated input holds exactly round(density*2^n) points",
    )


def _add_engine_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("engine tuning")
    g.add_argument("--h", type=int, help="dense split: in-block dimensions (default min(n, 5))")
    g.add_argument(
        "--unroll",
        choices=("on", "off"),
        default="on",
        help="dense fast path on/off; off runs the plain reference kernels",
    )
    g.add_argument("--mem-cap", type=int, metavar="BYTES", help="refuse allocations beyond this")


def _load_table(args):
    if args.input:
        if args.input == "-":
            if not args.format:
                raise ParseError("--format is required when reading stdin")
            return parse_table(sys.stdin.read(), args.format, n=args.n)
        return read_table(args.input, fmt=args.format, n=args.n)
    if args.n is None or args.density is None:
        raise ParseError("provide --input PATH, or both --n and --density to generate")
    return random_function(args.n, args.density, args.seed, exact=args.exact)


def _engine_kwargs(args) -> dict:
    return {
        "h": args.h,
        "optimized": args.unroll == "on",
        "mem_cap": args.mem_cap,
    }


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse_int_sweep(text: str) -> list[int]:
    """'12..20', '8,10,12', '14', or any comma mix of those."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            a, _, b = part.partition("..")
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError(f"empty range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    return out


def _parse_float_list(text: str) -> list[float]:
    return [float(p) for p in text.split(",")]


# ---------------------------------------------------------------------------
# subcommands


def _cmd_primes(args) -> int:
    tt = _load_table(args)
    ranks = run_engine(args.algo, tt, **_engine_kwargs(args))
    weights = rank_weights(ranks, tt.n).astype(np.int64)
    order = np.lexsort((ranks, -weights))
    text = ranks_to_text(ranks[order], tt.n, wildcard=args.wildcard_char)
    _write_text(args.output, text)
    return 0


def _cmd_verify(args) -> int:
    engines = [e.strip() for e in args.algo.split(",") if e.strip()]
    if len(engines) < 2:
        raise ParseError("verify needs at least two comma-separated engines")
    for e in engines:
        if e not in ENGINES:
            raise ParseError(f"unknown engine {e!r}; expected one of {', '.join(ENGINES)}")
    tt = _load_table(args)
    corrupt = os.environ.get(_CORRUPT_ENV)
    results = {}
    for eng in engines:
        ranks = run_engine(eng, tt, **_engine_kwargs(args))
        if corrupt == eng:
            ranks = ranks[1:] if len(ranks) else np.array([0], dtype=np.int64)
        results[eng] = ranks
    ref_name = engines[0]
    ref = results[ref_name]
    ok = True
    for eng in engines[1:]:
        got = results[eng]
        if np.array_equal(ref, got):
            continue
        ok = False
        missing = np.setdiff1d(ref, got)
        extra = np.setdiff1d(got, ref)
        print(
            f"MISMATCH {ref_name} vs {eng}: "
            f"{len(missing)} only in {ref_name}, {len(extra)} only in {eng}",
            file=sys.stderr,
        )
        for label, diff in ((ref_name, missing), (eng, extra)):
            for s in unrank_many(diff[:5], tt.n):
                print(f"  only in {label}: {s}", file=sys.stderr)
    if not ok:
        return 3
    print(f"OK: {', '.join(engines)} agree on {len(ref)} prime implicants")
    return 0


def _cmd_bench(args) -> int:
    engines = [e.strip() for e in args.algo.split(",") if e.strip()]
    for e in engines:
        if e not in ENGINES:
            raise ParseError(f"unknown engine {e!r}; expected one of {', '.join(ENGINES)}")
    try:
        ns = _parse_int_sweep(args.n)
        densities = _parse_float_list(args.density)
    except ValueError as exc:
        raise ParseError(f"bad sweep: {exc}") from exc
    out_fh = None
    close_fh = False
    if args.output == "-":
        out_fh = sys.stdout
    elif args.output:
        out_fh = open(args.output, "w", encoding="utf-8")
        close_fh = True
    reports = []
    try:
        for eng in engines:
            for n in ns:
                for d in densities:
                    spec = FunctionSpec(n=n, density=d, seed=args.seed, exact=args.exact)
                    rep = run_benchmark(
                        spec,
                        eng,
                        repetitions=args.reps,
                        track_alloc=args.track_alloc,
                        **_engine_kwargs(args),
                    )
                    reports.append(rep)
                    if out_fh is not None:
                        out_fh.write(rep.to_json() + "\n")
                        out_fh.flush()
    finally:
        if close_fh:
            out_fh.close()
    if out_fh is not sys.stdout:
        print(format_table(reports))
    return 2 if any(r.error for r in reports) else 0


def _cmd_gen(args) -> int:
    tt = random_function(args.n, args.density, args.seed, exact=args.exact)
    fmt = args.format
    if fmt is None and args.output:
        fmt = infer_format(args.output)
    if fmt is None:
        fmt = "bits"
    _write_text(args.output, write_table(tt, fmt))
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(
        prog="implicants",
        description="Compute all prime implicants of Boolean functions from truth tables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "primes",
        help="compute all prime implicants",
        description="Compute all prime implicants; one ternary string per line, "
        "wildcard count descending then rank ascending.",
        parents=[],
    )
    p.add_argument("--algo", choices=ENGINES, default="dense", help="engine (default dense)")
    _add_input_options(p)
    _add_engine_options(p)
    p.add_argument("--output", "-o", metavar="PATH", help="write here instead of stdout")
    p.add_argument(
        "--wildcard-char",
        choices=("*", "-"),
        default="*",
        help="character printed for wildcard positions",
    )
    p.set_defaults(func=_cmd_primes)

    p = sub.add_parser(
        "verify",
        help="cross-check engines on one input",
        description="Run several engines on the same input; exit 3 with a diff "
        "summary if any pair disagrees.",
    )
    p.add_argument(
        "--algo",
        default="dense,sparse",
        help="comma-separated engines to compare (default dense,sparse)",
    )
    _add_input_options(p)
    _add_engine_options(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser(
        "bench",
        help="time engines over input sweeps",
        description="Benchmark engines on generated inputs; reports stream as "
        "JSON lines to --output and a summary table prints afterwards.",
    )
    p.add_argument("--algo", default="dense", help="comma-separated engines (default dense)")
    p.add_argument("--n", required=True, help="sweep: '16', '12..20', or '8,12,16'")
    p.add_argument("--density", default="0.5", help="comma-separated densities (default 0.5)")
    p.add_argument("--seed", type=int, default=0, help="generator seed (default 0)")
    p.add_argument("--exact", action="store_true", help="exact-count generated inputs")
    p.add_argument("--reps", type=int, default=1, help="repetitions; fastest is reported")
    p.add_argument(
        "--track-alloc",
        action="store_true",
        help="also record the Python allocator peak (slows the run)",
    )
    _add_engine_options(p)
    p.add_argument("--output", "-o", metavar="PATH", help="JSONL destination ('-' = stdout)")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser(
        "gen",
        help="emit a deterministic pseudorandom truth table",
        description="Generate the truth table that --n/--density/--seed also "
        "denote in the other subcommands, and print or save it.",
    )
    p.add_argument("--n", type=int, required=True, help="variable count")
    p.add_argument("--density", type=float, required=True, help="satisfying fraction")
    p.add_argument("--seed", type=int, default=0, help="generator seed (default 0)")
    p.add_argument("--exact", action="store_true", help="exactly round(density*2^n) points")
    p.add_argument("--format", choices=FORMATS, help="output format (default bits)")
    p.add_argument("--output", "-o", metavar="PATH", help="write here instead of stdout")
    p.set_defaults(func=_cmd_gen)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"implicants: error: {exc}", file=sys.stderr)
        return 1
    except ResourceLimitError as exc:
        print(f"implicants: resource limit: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"implicants: error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"implicants: error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
