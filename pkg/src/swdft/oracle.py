"""Reference implementations used as correctness oracles and baselines.

Two families live here. The naive sliding-window DFTs evaluate the
defining sums directly (kernel matrices built from ``np.exp``, literal
``einsum`` contractions, no factorization) and share no combination
logic with the tree modules. The per-window FFTs use the same twiddle
tables and combination order as the tree transforms, which is what
makes tree output reproduce them bit for bit.
"""

from __future__ import annotations

import functools
import math
import string

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import core
from .core import (
    CoefficientArray,
    InvalidWindowError,
    ShapeError,
    WindowSpec,
    butterfly,
    make_twiddles,
)


def _dft_kernel(n: int) -> np.ndarray:
    # direct pointwise construction, deliberately independent of make_twiddles
    jk = np.outer(np.arange(n), np.arange(n))
    return np.exp((-2j * np.pi / n) * jk)


def dft_naive(x) -> np.ndarray:
    """Unnormalized DFT by direct summation; works for any length n >= 1."""
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1:
        raise ShapeError(f"expected a 1D vector, got shape {x.shape}")
    if len(x) < 1:
        raise ShapeError("empty input")
    return np.einsum("kj,j->k", _dft_kernel(len(x)), x)


def swdft_1d_naive(x, spec: WindowSpec) -> CoefficientArray:
    """Direct DFT of every length-n window of a 1D signal."""
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1 or spec.k != 1:
        raise ShapeError("swdft_1d_naive expects a 1D signal and 1D window")
    spec.check_fits(x.shape)
    (n,) = spec.sizes
    windows = sliding_window_view(x, n)
    vals = np.einsum("pj,kj->pk", windows, _dft_kernel(n))
    out = CoefficientArray(vals, x.shape, spec)
    return core.normalize(out, spec.normalization)


def swdft_2d_naive(x, spec: WindowSpec, budget: int | None = None) -> CoefficientArray:
    """Direct 2D DFT of every window position, evaluated as the literal
    double sum per coefficient."""
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 2 or spec.k != 2:
        raise ShapeError("swdft_2d_naive expects a 2D array and 2D window")
    spec.check_fits(x.shape)
    core.check_budget(core.output_bytes(x.shape, spec), budget, what="coefficient output")
    n0, n1 = spec.sizes
    windows = sliding_window_view(x, (n0, n1))
    vals = np.einsum("pqjl,kj,ml->pqkm", windows, _dft_kernel(n0), _dft_kernel(n1))
    out = CoefficientArray(vals, x.shape, spec)
    return core.normalize(out, spec.normalization)


def swdft_kd_naive(x, spec: WindowSpec, budget: int | None = None) -> CoefficientArray:
    """Direct k-dimensional sliding-window DFT (nested sums, product kernel)."""
    x = np.asarray(x, dtype=np.complex128)
    k = spec.k
    if x.ndim != k:
        raise ShapeError(f"{k}-dimensional window applied to {x.ndim}-dimensional array")
    spec.check_fits(x.shape)
    core.check_budget(core.output_bytes(x.shape, spec), budget, what="coefficient output")
    letters = string.ascii_lowercase
    pos = letters[:k]
    win = letters[k : 2 * k]
    freq = letters[2 * k : 3 * k]
    operands = [sliding_window_view(x, spec.sizes)]
    subscripts = [pos + win]
    for i in range(k):
        operands.append(_dft_kernel(spec.sizes[i]))
        subscripts.append(freq[i] + win[i])
    expr = ",".join(subscripts) + "->" + pos + freq
    vals = np.einsum(expr, *operands)
    out = CoefficientArray(vals, x.shape, spec)
    return core.normalize(out, spec.normalization)


@functools.lru_cache(maxsize=None)
def _fft_plan(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Per-stage (node index, twiddle) arrays for a length-n transform.

    Stage with sublength L picks twiddles at stride n/L out of the full
    length-n table, exactly as the tree levels do.
    """
    table = make_twiddles(n)
    stages = []
    L = 1
    while L < n:
        L *= 2
        idx = np.arange(L) % (L // 2)
        tw = np.ascontiguousarray(table[np.arange(L) * (n // L)])
        idx.setflags(write=False)
        tw.setflags(write=False)
        stages.append((idx, tw))
    return tuple(stages)


def _fft_along_last(block: np.ndarray, n: int) -> np.ndarray:
    """Natural-order decimation-in-time FFT of the last axis.

    Storage is residue-major: after the stage producing sublength L the
    array holds, for each of the n/L stride-L residue classes, that
    class's length-L DFT. Earlier (even) residues feed the pass-through
    arm of the butterfly, later (odd) ones the twiddled arm.
    """
    lead = block.shape[:-1]
    cur = np.ascontiguousarray(block, dtype=np.complex128).reshape(lead + (n, 1))
    for idx, tw in _fft_plan(n):
        half = cur.shape[-2] // 2
        even = cur[..., :half, :]
        odd = cur[..., half:, :]
        cur = butterfly(even[..., idx], tw, odd[..., idx])
    return cur.reshape(lead + (n,))


def fft_radix2(x) -> np.ndarray:
    """Radix-2 FFT with natural-order output.

    Matches dft_naive numerically and the tree transforms bit for bit
    (same twiddle table, same combination order).
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1:
        raise ShapeError(f"expected a 1D vector, got shape {x.shape}")
    n = len(x)
    if not core.is_power_of_two(n):
        raise InvalidWindowError(f"length {n} is not a power of two")
    return _fft_along_last(x, n)


def swfft_1d(x, spec: WindowSpec) -> CoefficientArray:
    """Per-window radix-2 FFT of every window of a 1D signal."""
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1 or spec.k != 1:
        raise ShapeError("swfft_1d expects a 1D signal and 1D window")
    spec.check_fits(x.shape)
    (n,) = spec.sizes
    P = len(x) - n + 1
    vals = np.empty((P, n), dtype=np.complex128)
    for p in range(P):
        vals[p] = _fft_along_last(x[p : p + n], n)
    out = CoefficientArray(vals, x.shape, spec)
    return core.normalize(out, spec.normalization)


def swfft_2d(x, spec: WindowSpec, budget: int | None = None) -> CoefficientArray:
    """Row-column FFT in every window position.

    Each window gets 1D FFTs of its rows followed by 1D FFTs of the
    resulting columns; dimension 1 first, matching the tree level order.
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 2 or spec.k != 2:
        raise ShapeError("swfft_2d expects a 2D array and 2D window")
    spec.check_fits(x.shape)
    core.check_budget(core.output_bytes(x.shape, spec), budget, what="coefficient output")
    n0, n1 = spec.sizes
    P0 = x.shape[0] - n0 + 1
    P1 = x.shape[1] - n1 + 1
    vals = np.empty((P0, P1, n0, n1), dtype=np.complex128)
    for p0 in range(P0):
        for p1 in range(P1):
            w = x[p0 : p0 + n0, p1 : p1 + n1]
            z = _fft_along_last(w, n1)
            vals[p0, p1] = _fft_along_last(z.T, n0).T
    out = CoefficientArray(vals, x.shape, spec)
    return core.normalize(out, spec.normalization)


def swfft_kd(x, spec: WindowSpec, budget: int | None = None) -> CoefficientArray:
    """Per-window FFT along every axis, highest dimension index first."""
    x = np.asarray(x, dtype=np.complex128)
    k = spec.k
    if x.ndim != k:
        raise ShapeError(f"{k}-dimensional window applied to {x.ndim}-dimensional array")
    spec.check_fits(x.shape)
    core.check_budget(core.output_bytes(x.shape, spec), budget, what="coefficient output")
    sizes = spec.sizes
    positions = tuple(N - n + 1 for N, n in zip(x.shape, sizes))
    vals = np.empty(positions + sizes, dtype=np.complex128)
    for p in np.ndindex(positions):
        w = x[tuple(slice(pi, pi + ni) for pi, ni in zip(p, sizes))]
        for axis in range(k - 1, -1, -1):
            moved = np.moveaxis(w, axis, -1)
            w = np.moveaxis(_fft_along_last(moved, sizes[axis]), -1, axis)
        vals[p] = w
    out = CoefficientArray(vals, x.shape, spec)
    return core.normalize(out, spec.normalization)
