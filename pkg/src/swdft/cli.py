"""Command-line front end: file transforms, oracle verification,
benchmarking, and operation-count prediction.

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 memory budget exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import bench, container, core, oracle, tree1d, tree2d, treekd
from .core import BudgetError, SwdftError, WindowSpec

ALGORITHMS = ("tree", "fft", "naive")


def _parse_extents(text: str) -> tuple[int, ...]:
    try:
        parts = tuple(int(p) for p in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse {text!r} as AxBx...")
    if not parts or any(p < 1 for p in parts):
        raise argparse.ArgumentTypeError(f"extents must be positive in {text!r}")
    return parts


def _parse_window(text: str) -> tuple[int, ...]:
    sizes = _parse_extents(text)
    for n in sizes:
        if not core.is_power_of_two(n):
            raise argparse.ArgumentTypeError(f"window size {n} is not a power of two")
    return sizes


def _parse_window_list(text: str) -> list[tuple[int, ...]]:
    return [_parse_window(part) for part in text.split(",") if part]


def _parse_algorithms(text: str) -> tuple[str, ...]:
    algs = tuple(a for a in text.split(",") if a)
    for a in algs:
        if a not in ALGORITHMS:
            raise argparse.ArgumentTypeError(f"unknown algorithm {a!r}")
    return algs


def _default_budget() -> int:
    env = os.environ.get("SWDFT_MEM_BUDGET")
    return int(env) if env else core.DEFAULT_BUDGET_BYTES


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swdft", description="Sliding-window DFT transforms, verification, and benchmarks"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    tf = sub.add_parser("transform", help="transform an array file to coefficients")
    tf.add_argument("--input", required=True, help="SWDF container or 2D real CSV")
    tf.add_argument("--output", required=True, help="output SWDF container path")
    tf.add_argument("--window", required=True, type=_parse_window, metavar="n0xn1[x...]")
    tf.add_argument("--algorithm", choices=ALGORITHMS, default="tree")
    tf.add_argument("--normalization", choices=core.NORMALIZATION_MODES, default="none")
    tf.add_argument("--budget", type=int, default=None, help="memory budget in bytes")
    tf.add_argument("--threads", type=int, default=1)

    vf = sub.add_parser("verify", help="cross-check tree, per-window FFT, and naive outputs")
    vf.add_argument("--input", required=True)
    vf.add_argument("--window", required=True, type=_parse_window, metavar="n0xn1[x...]")
    vf.add_argument("--budget", type=int, default=None)
    vf.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)

    bn = sub.add_parser("bench", help="time the algorithms and emit CSV records")
    bn.add_argument("--size", type=_parse_extents, default=(100, 100), metavar="N0xN1")
    bn.add_argument(
        "--windows", type=_parse_window_list, default=[(4, 4), (8, 8), (16, 16), (32, 32), (64, 64)],
        metavar="LIST", help="comma-separated window sizes, e.g. 4,8,16 or 4x8,8x8",
    )
    bn.add_argument("--algorithms", type=_parse_algorithms, default=ALGORITHMS)
    bn.add_argument("--repetitions", type=int, default=5)
    bn.add_argument("--seed", type=int, default=0)
    bn.add_argument("--output", default=None, help="CSV path (default: stdout)")
    bn.add_argument("--budget", type=int, default=None)
    bn.add_argument("--threads", type=int, default=1)

    oc = sub.add_parser("opcount", help="predict operation counts")
    oc.add_argument("--window", required=True, type=_parse_window, metavar="n0xn1[x...]")
    oc.add_argument("--size", required=True, type=_parse_extents, metavar="N0xN1[x...]")
    oc.add_argument("--algorithm", choices=ALGORITHMS, default="tree")
    return parser


def _load_input(path: str) -> np.ndarray:
    p = Path(path)
    if not p.exists():
        raise core.ContainerError(f"input file not found: {path}")
    if p.suffix.lower() == ".csv":
        return container.read_csv_2d(p).astype(np.complex128)
    arr, _ = container.read_swdf(p)
    return arr


def _run_transform(x, sizes, algorithm, normalization, budget, threads):
    spec = WindowSpec.from_sizes(sizes, normalization)
    k = spec.k
    if algorithm == "tree":
        if k == 1:
            return tree1d.tree_swdft_1d(x[...], spec)
        if k == 2:
            return tree2d.tree_swdft_2d(x, spec, budget=budget, threads=threads)
        return treekd.tree_swdft_kd(x, spec, budget=budget)
    if algorithm == "fft":
        if k == 1:
            return oracle.swfft_1d(x, spec)
        if k == 2:
            return oracle.swfft_2d(x, spec, budget=budget)
        return oracle.swfft_kd(x, spec, budget=budget)
    if k == 1:
        return oracle.swdft_1d_naive(x, spec)
    if k == 2:
        return oracle.swdft_2d_naive(x, spec, budget=budget)
    return oracle.swdft_kd_naive(x, spec, budget=budget)


def cmd_transform(args) -> int:
    x = _load_input(args.input)
    budget = args.budget if args.budget is not None else _default_budget()
    coeffs = _run_transform(
        x, args.window, args.algorithm, args.normalization, budget, args.threads
    )
    container.write_swdf(args.output, coeffs.values, normalization=coeffs.normalization)
    print(f"wrote {args.output}: shape {'x'.join(map(str, coeffs.values.shape))}")
    return 0


def cmd_verify(args) -> int:
    x = _load_input(args.input)
    budget = args.budget if args.budget is not None else _default_budget()
    tree_ca = _run_transform(x, args.window, "tree", "none", budget, 1)
    fft_ca = _run_transform(x, args.window, "fft", "none", budget, 1)
    naive_ca = _run_transform(x, args.window, "naive", "none", budget, 1)
    tree_vals = tree_ca.values
    if args.corrupt:
        tree_vals = tree_vals.copy()
        tree_vals.view(np.uint64).flat[0] ^= 1
    max_err = float(np.max(np.abs(tree_vals - naive_ca.values), initial=0.0))
    exact = bool(np.array_equal(tree_vals, fft_ca.values))
    print(f"max_err={max_err:.3e} exact_fft_match={'true' if exact else 'false'}")
    return 0 if (max_err <= 1e-10 and exact) else 1


def cmd_bench(args) -> int:
    budget = args.budget if args.budget is not None else _default_budget()
    if len(args.size) != 2:
        raise core.ShapeError("bench supports 2D sizes (N0xN1)")
    for sizes in args.windows:
        if len(sizes) != 2:
            raise core.ShapeError("bench windows must be 2D")
    config = bench.BenchConfig(
        shape=args.size,
        windows=tuple(args.windows),
        algorithms=args.algorithms,
        repetitions=args.repetitions,
        seed=args.seed,
        budget_bytes=budget,
        threads=args.threads,
    )
    csv_text = bench.to_csv(bench.run_bench(config))
    if args.output:
        Path(args.output).write_text(csv_text)
    else:
        sys.stdout.write(csv_text)
    return 0


def cmd_opcount(args) -> int:
    spec = WindowSpec.from_sizes(args.window)
    spec.check_fits(args.size)
    positions = tuple(N - n + 1 for N, n in zip(args.size, spec.sizes))
    print(f"algorithm={args.algorithm}")
    print(f"size={'x'.join(map(str, args.size))} window={'x'.join(map(str, args.window))}")
    print(f"positions={'x'.join(map(str, positions))}")
    if args.algorithm == "tree":
        interior, boundary, total = bench.tree_op_breakdown(args.size, args.window)
        print(f"per_window={2 * (spec.window_elements - 1)}")
        print(f"interior_ops={interior}")
        print(f"boundary_ops={boundary}")
        print(f"total_ops={total}")
    else:
        total = bench.predict_ops(args.algorithm, args.size, args.window)
        per = total // max(1, int(np.prod(positions)))
        print(f"per_window={per}")
        print(f"total_ops={total}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "transform": cmd_transform,
        "verify": cmd_verify,
        "bench": cmd_bench,
        "opcount": cmd_opcount,
    }
    try:
        return handlers[args.command](args)
    except BudgetError as exc:
        print(f"error: {exc} (required_bytes={exc.required_bytes})", file=sys.stderr)
        return 3
    except SwdftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
