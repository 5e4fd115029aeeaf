"""Shared domain machinery for the sliding-window DFT engines.

Window specifications, twiddle tables, the per-level shift/geometry
schedule that drives every tree transform, the butterfly kernel all
algorithms combine nodes with, normalization, coefficient containers,
and memory accounting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

COMPLEX_BYTES = 16  # double-precision complex element
DEFAULT_BUDGET_BYTES = 4 * 1024**3  # 4 GiB

NORMALIZATION_MODES = ("none", "paper-1d", "paper-2d", "unitary")


class SwdftError(Exception):
    """Base class for package errors."""


class InvalidWindowError(SwdftError, ValueError):
    """Window size not a power of two, or an inconsistent window spec."""


class WindowTooLargeError(SwdftError, ValueError):
    """Window exceeds the array extent in some dimension."""


class ShapeError(SwdftError, ValueError):
    """Input shape does not match what the operation expects."""


class StateError(SwdftError, RuntimeError):
    """Operation applied out of order: double normalization, push after
    close, or a level-cursor mismatch."""


class ContainerError(SwdftError, ValueError):
    """Malformed SWDF container, bad CSV, or non-finite payload."""


class BudgetError(SwdftError):
    """Projected allocation exceeds the configured memory budget."""

    def __init__(self, required_bytes: int, budget_bytes: int, what: str = "allocation"):
        self.required_bytes = int(required_bytes)
        self.budget_bytes = int(budget_bytes)
        super().__init__(
            f"{what} requires {self.required_bytes} bytes; budget is {self.budget_bytes} bytes"
        )


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class WindowSpec:
    """Per-dimension window exponents; window sizes are ``n_i = 2**m_i``.

    ``normalization`` selects the scaling applied to the coefficients:
    ``none`` (raw sums), ``paper-1d`` (1/n, one-dimensional only),
    ``paper-2d`` (1/sqrt(prod n_i), two or more dimensions) or
    ``unitary`` (1/sqrt(prod n_i) in any dimension).
    """

    exponents: tuple[int, ...]
    normalization: str = "none"

    def __post_init__(self):
        exps = tuple(int(m) for m in self.exponents)
        object.__setattr__(self, "exponents", exps)
        if len(exps) < 1:
            raise InvalidWindowError("a window needs at least one dimension")
        if any(m < 0 for m in exps):
            raise InvalidWindowError(f"window exponents must be non-negative, got {exps}")
        if self.normalization not in NORMALIZATION_MODES:
            raise InvalidWindowError(f"unknown normalization mode {self.normalization!r}")
        if self.normalization == "paper-1d" and len(exps) != 1:
            raise InvalidWindowError("paper-1d normalization applies to 1D windows only")
        if self.normalization == "paper-2d" and len(exps) < 2:
            raise InvalidWindowError("paper-2d normalization needs at least two dimensions")

    @classmethod
    def from_sizes(cls, sizes: Iterable[int], normalization: str = "none") -> "WindowSpec":
        exps = []
        for n in sizes:
            n = int(n)
            if not is_power_of_two(n):
                raise InvalidWindowError(f"window size {n} is not a power of two")
            exps.append(n.bit_length() - 1)
        return cls(tuple(exps), normalization)

    @property
    def k(self) -> int:
        return len(self.exponents)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(1 << m for m in self.exponents)

    @property
    def total_levels(self) -> int:
        return sum(self.exponents)

    @property
    def window_elements(self) -> int:
        return 1 << self.total_levels

    def check_fits(self, shape: Sequence[int]) -> None:
        """Raise unless every window size fits the array extent."""
        if len(shape) != self.k:
            raise ShapeError(f"{self.k}-dimensional window applied to {len(shape)}-dimensional array")
        for d, (n, ext) in enumerate(zip(self.sizes, shape)):
            if n > ext:
                raise WindowTooLargeError(f"window size {n} exceeds extent {ext} in dimension {d}")


def make_twiddles(n: int) -> np.ndarray:
    """Length-n table of the negative-exponent roots of unity.

    ``entries[j] = cos(2*pi*j/n) - 1j*sin(2*pi*j/n)``, i.e. the factor a
    forward transform multiplies by when combining sub-transforms.
    """
    n = int(n)
    if not is_power_of_two(n):
        raise InvalidWindowError(f"twiddle table size {n} is not a power of two")
    ang = np.arange(n, dtype=np.float64) * (2.0 * np.pi / n)
    table = np.empty(n, dtype=np.complex128)
    table.real = np.cos(ang)
    table.imag = -np.sin(ang)
    return table


def _suffix_sums(exponents: Sequence[int]) -> tuple[int, ...]:
    # suffix[c] = sum of exponents for dimensions >= c; suffix[k] = 0
    k = len(exponents)
    out = [0] * (k + 1)
    for c in range(k - 1, -1, -1):
        out[c] = out[c + 1] + exponents[c]
    return tuple(out)


def dim_of_level(level: int, spec: WindowSpec) -> int:
    """Dimension transformed at a given 1-based tree level.

    Dimension k-1 owns the first block of levels, dimension 0 the last.
    """
    if not 1 <= level <= spec.total_levels:
        raise ValueError(f"level {level} outside [1, {spec.total_levels}]")
    suf = _suffix_sums(spec.exponents)
    for c in range(spec.k - 1, -1, -1):
        if suf[c + 1] < level <= suf[c]:
            return c
    raise AssertionError("unreachable")


def shift(level: int, dim: int, spec: WindowSpec) -> int:
    """Window-position offset to the neighbour tree reused at this level.

    The level-``level`` node of the tree at position p combines the
    previous-level node of the tree ``shift`` positions back along
    ``dim`` with the previous-level node of the same tree.
    """
    suf = _suffix_sums(spec.exponents)
    if not 0 <= dim < spec.k:
        raise ValueError(f"dimension {dim} outside [0, {spec.k})")
    if not suf[dim + 1] < level <= suf[dim]:
        raise ValueError(f"level {level} is not owned by dimension {dim}")
    return 1 << (suf[dim] - level)


@dataclass(frozen=True)
class LevelGeometry:
    """Geometry of one tree level: owning dimension, reuse shift, node
    extents per dimension, node-index modulus, and the minimum window
    position at which a node of this level exists."""

    level: int
    dim: int | None
    shift: int | None
    extents: tuple[int, ...]
    mod_extent: int | None
    thresholds: tuple[int, ...]

    @property
    def nodes_per_tree(self) -> int:
        return math.prod(self.extents)


def level_geometry(level: int, spec: WindowSpec) -> LevelGeometry:
    """Describe one level of the tree schedule for ``spec``."""
    k = spec.k
    sizes = spec.sizes
    if not 0 <= level <= spec.total_levels:
        raise ValueError(f"level {level} outside [0, {spec.total_levels}]")
    if level == 0:
        return LevelGeometry(0, None, None, (1,) * k, None, (0,) * k)
    c = dim_of_level(level, spec)
    suf = _suffix_sums(spec.exponents)
    q = level - suf[c + 1]  # level index within dimension c, 1-based
    s = 1 << (suf[c] - level)  # = 2**(m_c - q)
    extents = tuple(
        1 if i < c else (1 << q) if i == c else sizes[i] for i in range(k)
    )
    thresholds = tuple(
        0 if i < c else (sizes[c] - s) if i == c else (sizes[i] - 1) for i in range(k)
    )
    return LevelGeometry(level, c, s, extents, 1 << (q - 1), thresholds)


def shift_schedule(spec: WindowSpec) -> tuple[LevelGeometry, ...]:
    """Geometry for levels 0..total_levels; the full shift schedule."""
    return tuple(level_geometry(l, spec) for l in range(spec.total_levels + 1))


def butterfly(shifted, twiddle, current, out: np.ndarray | None = None) -> np.ndarray:
    """Compute ``shifted + twiddle * current`` elementwise.

    This is the single multiply-add every transform in the package uses
    to combine nodes. The complex product is decomposed into separately
    rounded real multiplies and adds so the result is bit-identical no
    matter how the operands are shaped, strided, or batched; that is
    what makes the tree output exactly reproduce a per-window FFT.
    """
    shifted = np.asarray(shifted)
    twiddle = np.asarray(twiddle)
    current = np.asarray(current)
    if out is None:
        shape = np.broadcast_shapes(shifted.shape, twiddle.shape, current.shape)
        out = np.empty(shape, dtype=np.complex128)
    wr, wi = twiddle.real, twiddle.imag
    cr, ci = current.real, current.imag
    re = wr * cr
    re -= wi * ci
    im = wr * ci
    im += wi * cr
    np.add(shifted.real, re, out=out.real)
    np.add(shifted.imag, im, out=out.imag)
    return out


def normalization_factor(spec: WindowSpec) -> float:
    mode = spec.normalization
    if mode == "none":
        return 1.0
    if mode == "paper-1d":
        return 1.0 / spec.sizes[0]
    return 1.0 / math.sqrt(float(spec.window_elements))


@dataclass
class CoefficientArray:
    """Windowed DFT coefficients.

    ``values`` has shape P_0 x ... x P_{k-1} x n_0 x ... x n_{k-1} with
    P_i = N_i - n_i + 1; index (p - (n - 1), k) holds the coefficient of
    frequency k for the window ending at source position p.
    """

    values: np.ndarray
    source_shape: tuple[int, ...]
    window: WindowSpec
    normalization: str = "none"

    def __post_init__(self):
        self.source_shape = tuple(int(e) for e in self.source_shape)
        k = self.window.k
        if self.values.ndim != 2 * k:
            raise ShapeError(f"expected {2 * k} axes, got {self.values.ndim}")
        expected = self.positions + self.window.sizes
        if self.values.shape != expected:
            raise ShapeError(f"coefficient shape {self.values.shape} != expected {expected}")
        if self.normalization not in NORMALIZATION_MODES:
            raise InvalidWindowError(f"unknown normalization mode {self.normalization!r}")

    @property
    def positions(self) -> tuple[int, ...]:
        return tuple(N - n + 1 for N, n in zip(self.source_shape, self.window.sizes))


def normalize(coeffs: CoefficientArray, mode: str) -> CoefficientArray:
    """Scale a raw coefficient array and record the mode applied.

    ``mode='none'`` is the identity. Applying a scaling mode twice is a
    state error.
    """
    if mode not in NORMALIZATION_MODES:
        raise InvalidWindowError(f"unknown normalization mode {mode!r}")
    if mode == "none":
        return coeffs
    if coeffs.normalization != "none":
        raise StateError(f"coefficients already normalized ({coeffs.normalization})")
    check = WindowSpec(coeffs.window.exponents, mode)  # validates mode/k combination
    factor = np.float64(normalization_factor(check))
    return CoefficientArray(coeffs.values * factor, coeffs.source_shape, coeffs.window, mode)


@dataclass(frozen=True)
class NdArray:
    """Row-major complex storage with explicit dims and offset math.

    Thin wrapper over a flat numpy buffer; used by the binary container
    and wherever explicit index/offset arithmetic needs testing. Regions
    of ``data`` may be mutated concurrently as long as writers touch
    disjoint slices.
    """

    dims: tuple[int, ...]
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if any(d < 0 for d in self.dims):
            raise ShapeError(f"negative extent in {self.dims}")
        if self.data.ndim != 1 or len(self.data) != math.prod(self.dims):
            raise ShapeError(
                f"flat length {self.data.size} != prod{self.dims} = {math.prod(self.dims)}"
            )

    @classmethod
    def from_numpy(cls, arr) -> "NdArray":
        arr = np.ascontiguousarray(arr, dtype=np.complex128)
        return cls(arr.shape, arr.reshape(-1))

    def to_numpy(self) -> np.ndarray:
        return self.data.reshape(self.dims)

    @property
    def strides(self) -> tuple[int, ...]:
        # element strides, row-major
        out = [1] * len(self.dims)
        for i in range(len(self.dims) - 2, -1, -1):
            out[i] = out[i + 1] * self.dims[i + 1]
        return tuple(out)

    def offset_of(self, index: Sequence[int]) -> int:
        if len(index) != len(self.dims):
            raise ShapeError(f"index rank {len(index)} != {len(self.dims)}")
        off = 0
        for i, (j, d, s) in enumerate(zip(index, self.dims, self.strides)):
            if not 0 <= j < d:
                raise IndexError(f"index {j} out of range [0, {d}) in axis {i}")
            off += j * s
        return off

    def index_of(self, offset: int) -> tuple[int, ...]:
        if not 0 <= offset < len(self.data):
            raise IndexError(f"offset {offset} out of range [0, {len(self.data)})")
        idx = []
        for s in self.strides:
            j, offset = divmod(offset, s)
            idx.append(j)
        return tuple(idx)


def output_elements(shape: Sequence[int], spec: WindowSpec) -> int:
    """Number of complex elements in the coefficient output tensor."""
    spec.check_fits(shape)
    positions = math.prod(N - n + 1 for N, n in zip(shape, spec.sizes))
    return positions * spec.window_elements


def output_bytes(shape: Sequence[int], spec: WindowSpec) -> int:
    return output_elements(shape, spec) * COMPLEX_BYTES


def lattice_elements(shape: Sequence[int], spec: WindowSpec) -> int:
    """Complex elements held by the double-buffered level storage."""
    spec.check_fits(shape)
    return 2 * math.prod(shape) * spec.window_elements


def lattice_bytes(shape: Sequence[int], spec: WindowSpec) -> int:
    return lattice_elements(shape, spec) * COMPLEX_BYTES


def check_budget(required_bytes: int, budget_bytes: int | None, what: str = "allocation") -> None:
    if budget_bytes is None:
        budget_bytes = DEFAULT_BUDGET_BYTES
    if required_bytes > budget_bytes:
        raise BudgetError(required_bytes, budget_bytes, what=what)
