"""Benchmark harness: timed engine runs with peak-memory tracking.

One report per (engine, input) pair, serialized as one JSON object per
line so runs can be appended and post-processed with standard tools. The
clock covers the engine run only — building or parsing the input is
excluded — and with repetitions > 1 the fastest run is reported, which
denoises short runs. peak_bytes is the maximum resident-set growth over a
2 ms polling thread, i.e. what the run actually cost the machine; the
optional alloc_peak_bytes adds the Python allocator's view (tracemalloc)
at a substantial slowdown, so it is off by default.

Engine failures from resource caps are captured as reports with the error
field set (and prime_count -1) rather than raised, so sweeps keep going.
"""

from __future__ import annotations

import gc
import json
import threading
import time
import tracemalloc
from dataclasses import asdict, dataclass

import numpy as np
import psutil

from .dense import dense_prime_ranks
from .errors import ResourceLimitError
from .oracle import oracle_prime_ranks
from .sparse import sparse_prime_ranks
from .ternary import TruthTable
from .ttio import FunctionSpec

ENGINES = ("dense", "sparse", "oracle")


@dataclass
class BenchReport:
    engine: str
    n: int
    density: float
    seed: int
    seconds: float
    peak_bytes: int
    prime_count: int
    error: str | None = None
    alloc_peak_bytes: int | None = None

    def to_json(self) -> str:
        d = asdict(self)
        if d["error"] is None:
            del d["error"]
        if d["alloc_peak_bytes"] is None:
            del d["alloc_peak_bytes"]
        return json.dumps(d)


class _RssPoller:
    """Samples resident-set size on a thread; reports growth over baseline."""

    def __init__(self, interval: float = 0.002):
        self._proc = psutil.Process()
        self._interval = interval
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        self._baseline = 0
        self._peak = 0

    def start(self) -> None:
        gc.collect()
        self._baseline = self._proc.memory_info().rss
        self._peak = self._baseline
        self._stop.clear()
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()

    def _run(self) -> None:
        while not self._stop.wait(self._interval):
            rss = self._proc.memory_info().rss
            if rss > self._peak:
                self._peak = rss

    def stop(self) -> int:
        self._stop.set()
        if self._thread is not None:
            self._thread.join()
        rss = self._proc.memory_info().rss
        if rss > self._peak:
            self._peak = rss
        return max(0, self._peak - self._baseline)


def run_engine(
    engine: str,
    tt: TruthTable,
    h: int | None = None,
    optimized: bool = True,
    mem_cap: int | None = None,
) -> np.ndarray:
    """Prime implicant ranks from the named engine, ascending."""
    if engine == "dense":
        return dense_prime_ranks(tt, h=h, optimized=optimized, mem_cap=mem_cap)
    if engine == "sparse":
        return sparse_prime_ranks(tt, mem_cap=mem_cap)
    if engine == "oracle":
        return oracle_prime_ranks(tt)
    raise ValueError(f"unknown engine {engine!r}; expected one of {', '.join(ENGINES)}")


def run_benchmark(
    spec: FunctionSpec,
    engine: str,
    repetitions: int = 1,
    h: int | None = None,
    optimized: bool = True,
    mem_cap: int | None = None,
    track_alloc: bool = False,
) -> BenchReport:
    """Generate the input, run the engine, and measure it.

    seconds is the minimum over repetitions, peak_bytes the maximum;
    generation happens once, outside the clock.
    """
    tt = spec.build()
    seconds = float("inf")
    peak = 0
    alloc_peak: int | None = None
    count = -1
    for _ in range(max(1, repetitions)):
        poller = _RssPoller()
        poller.start()
        try:
            if track_alloc:
                tracemalloc.start()
            t0 = time.perf_counter()
            ranks = run_engine(engine, tt, h=h, optimized=optimized, mem_cap=mem_cap)
            elapsed = time.perf_counter() - t0
            if track_alloc:
                alloc = tracemalloc.get_traced_memory()[1]
                alloc_peak = alloc if alloc_peak is None else max(alloc_peak, alloc)
        except (ResourceLimitError, MemoryError) as exc:
            poller.stop()
            return BenchReport(
                engine=engine,
                n=spec.n,
                density=spec.density,
                seed=spec.seed,
                seconds=0.0,
                peak_bytes=0,
                prime_count=-1,
                error=str(exc),
            )
        finally:
            if track_alloc and tracemalloc.is_tracing():
                tracemalloc.stop()
        peak = max(peak, poller.stop())
        seconds = min(seconds, elapsed)
        count = len(ranks)
    return BenchReport(
        engine=engine,
        n=spec.n,
        density=spec.density,
        seed=spec.seed,
        seconds=seconds,
        peak_bytes=peak,
        prime_count=count,
        alloc_peak_bytes=alloc_peak,
    )


def format_table(reports: list[BenchReport]) -> str:
    """Aligned human-readable view of a batch of reports."""
    head = ["engine", "n", "density", "seed", "seconds", "peak_MiB", "primes"]
    rows = [head]
    for r in reports:
        rows.append(
            [
                r.engine,
                str(r.n),
                f"{r.density:g}",
                str(r.seed),
                f"{r.seconds:.3f}",
                f"{r.peak_bytes / 2**20:.1f}",
                str(r.prime_count) if r.error is None else f"error: {r.error}",
            ]
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(head))]
    lines = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip() for row in rows]
    return "\n".join(lines)
