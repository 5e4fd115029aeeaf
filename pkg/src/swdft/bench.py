"""Operation counting, memory accounting, and wall-clock benchmarking.

One operation is one complex multiply plus one complex add, i.e. one
butterfly arm; the tree transforms report their counts through an
OpCounter. Benchmarks time the tree transform against the per-window
FFT and the naive direct sum on seeded inputs and emit CSV records.
"""

from __future__ import annotations

import io
import math
import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from . import core, oracle, tree1d, tree2d, treekd
from .core import WindowSpec

ALGORITHMS = ("tree", "fft", "naive")


class OpCounter:
    """Tally of complex multiply-add operations.

    With ``position_shape`` given, also attributes node computations to
    the window position whose tree they belong to.
    """

    def __init__(self, position_shape: tuple[int, ...] | None = None):
        self.total = 0
        self.position_ops = (
            np.zeros(position_shape, dtype=np.int64) if position_shape is not None else None
        )

    def add(self, count: int) -> None:
        self.total += int(count)

    def add_region(self, region, nodes_per_tree: int, positions: int) -> None:
        self.total += int(nodes_per_tree) * int(positions)
        if self.position_ops is not None:
            self.position_ops[region] += nodes_per_tree


def tree_op_breakdown(shape, window_sizes) -> tuple[int, int, int]:
    """(interior, boundary, total) operation counts for the tree transform.

    Interior is positions x 2(prod(n)-1); the boundary term comes from
    enumerating, level by level, the warm-up trees above each level's
    validity threshold that never produce output.
    """
    spec = WindowSpec.from_sizes(window_sizes)
    spec.check_fits(shape)
    total = 0
    for g in core.shift_schedule(spec)[1:]:
        positions = math.prod(N - thr for N, thr in zip(shape, g.thresholds))
        total += positions * g.nodes_per_tree
    out_positions = math.prod(N - n + 1 for N, n in zip(shape, spec.sizes))
    interior = out_positions * 2 * (spec.window_elements - 1)
    return interior, total - interior, total


def predict_ops(algorithm: str, shape, window_sizes) -> int:
    """Closed-form operation count for one full run.

    tree: the exact butterfly count (interior + enumerated boundary);
    naive: kernel evaluations, positions x (prod n)^2;
    fft: textbook butterfly count, positions x (prod n)/2 x log2(prod n).
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"algorithm must be one of {ALGORITHMS}")
    spec = WindowSpec.from_sizes(window_sizes)
    spec.check_fits(shape)
    positions = math.prod(N - n + 1 for N, n in zip(shape, spec.sizes))
    w = spec.window_elements
    if algorithm == "tree":
        return tree_op_breakdown(shape, window_sizes)[2]
    if algorithm == "naive":
        return positions * w * w
    return positions * (w // 2) * spec.total_levels


def peak_bytes(algorithm: str, shape, window_sizes) -> int:
    """Tracked peak allocation: level buffers for the tree, coefficient
    output for the per-window algorithms."""
    spec = WindowSpec.from_sizes(window_sizes)
    if algorithm == "tree":
        return core.lattice_bytes(shape, spec)
    return core.output_bytes(shape, spec)


@dataclass
class BenchRecord:
    algorithm: str
    shape: tuple[int, int]
    window: tuple[int, int]
    seconds: float
    ops: int
    peak_bytes: int
    skipped: str | None = None


@dataclass
class BenchConfig:
    """Speed-comparison configuration; the default is a 100 x 100 array
    with square windows 4..64 and all three algorithms."""

    shape: tuple[int, int] = (100, 100)
    windows: tuple = (4, 8, 16, 32, 64)
    algorithms: tuple = ALGORITHMS
    repetitions: int = 5
    seed: int = 0
    budget_bytes: int = core.DEFAULT_BUDGET_BYTES
    threads: int = 1

    def window_pairs(self) -> list[tuple[int, int]]:
        out = []
        for w in self.windows:
            out.append((int(w), int(w)) if np.isscalar(w) else (int(w[0]), int(w[1])))
        return out


def _run_algorithm(algorithm, x, spec, budget, threads):
    if algorithm == "tree":
        return tree2d.tree_swdft_2d(x, spec, budget=budget, threads=threads)
    if algorithm == "fft":
        return oracle.swfft_2d(x, spec, budget=budget)
    return oracle.swdft_2d_naive(x, spec, budget=budget)


def run_bench(config: BenchConfig) -> list[BenchRecord]:
    """Time every (algorithm, window) pair on one seeded input array.

    Records carry the median of ``repetitions`` timings, the closed-form
    operation count, and the tracked peak allocation. Pairs that would
    blow the memory budget are marked skipped instead of run.
    """
    rng = np.random.default_rng(config.seed)
    x = rng.standard_normal(config.shape) + 1j * rng.standard_normal(config.shape)
    records = []
    for algorithm in config.algorithms:
        if algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {algorithm!r}")
        for sizes in config.window_pairs():
            spec = WindowSpec.from_sizes(sizes)
            ops = predict_ops(algorithm, config.shape, sizes)
            peak = peak_bytes(algorithm, config.shape, sizes)
            required = core.output_bytes(config.shape, spec)
            if algorithm == "tree":
                required += core.lattice_bytes(config.shape, spec)
            if required > config.budget_bytes:
                records.append(
                    BenchRecord(
                        algorithm, config.shape, sizes, float("nan"), ops, peak,
                        skipped=f"requires {required} bytes, budget {config.budget_bytes}",
                    )
                )
                continue
            times = []
            for _ in range(max(1, config.repetitions)):
                t0 = time.perf_counter()
                _run_algorithm(algorithm, x, spec, config.budget_bytes, config.threads)
                times.append(time.perf_counter() - t0)
            records.append(
                BenchRecord(algorithm, config.shape, sizes, statistics.median(times), ops, peak)
            )
    return records


CSV_HEADER = "algorithm,N0,N1,n0,n1,seconds,ops,peak_bytes"


def to_csv(records: list[BenchRecord]) -> str:
    """Render records as CSV, ordered by algorithm then window size."""
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    ordered = sorted(records, key=lambda r: (r.algorithm, r.window[0] * r.window[1], r.window))
    for r in ordered:
        buf.write(
            f"{r.algorithm},{r.shape[0]},{r.shape[1]},{r.window[0]},{r.window[1]},"
            f"{r.seconds!r},{r.ops},{r.peak_bytes}\n"
        )
    return buf.getvalue()


def loglog_slope(records: list[BenchRecord], per_position: bool = False) -> float:
    """Least-squares slope of log(seconds) against log(window elements).

    With ``per_position`` the timing is first divided by the number of
    window positions, isolating the per-window cost from the shrinking
    position count as windows grow on a fixed array.
    """
    xs, ys = [], []
    for r in records:
        if r.skipped is not None or not math.isfinite(r.seconds):
            continue
        t = r.seconds
        if per_position:
            t /= math.prod(N - n + 1 for N, n in zip(r.shape, r.window))
        xs.append(math.log(r.window[0] * r.window[1]))
        ys.append(math.log(t))
    if len(xs) < 2:
        raise ValueError("need at least two usable records")
    return float(np.polyfit(xs, ys, 1)[0])
