"""2D tree sliding-window DFT.

A 2D tree of row-column FFT nodes hangs below every window position.
Levels 1..m1 combine along dimension 1 (length-n1 row transforms);
levels m1+1..m1+m0 combine along dimension 0. Node storage is double
buffered: two N0 x N1 x n0 x n1 blocks, previous level and current
level, which is all the batch schedule ever needs.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import core
from .core import CoefficientArray, StateError, WindowSpec, butterfly, make_twiddles

LOOP_ORDERS = ("levels-outer", "trees-outer")


def _split(lo: int, hi: int, parts: int):
    # contiguous chunks of [lo, hi) for the intra-level data-parallel contract
    span = hi - lo
    parts = max(1, min(parts, span))
    step = -(-span // parts)
    return [(a, min(a + step, hi)) for a in range(lo, hi, step)]


class TreeLattice2D:
    """Double-buffered node storage for every window position.

    ``cur`` holds the level the cursor points at; a step computes the
    next level into the scratch buffer and swaps. Nodes below a level's
    validity threshold are never written nor read.
    """

    def __init__(self, x: np.ndarray, spec: WindowSpec, counter=None, threads: int = 1):
        self.spec = spec
        self.shape = x.shape
        self.m0, self.m1 = spec.exponents
        self.n0, self.n1 = spec.sizes
        self.counter = counter
        self.threads = max(1, int(threads))
        self.tw0 = make_twiddles(self.n0)
        self.tw1 = make_twiddles(self.n1)
        N0, N1 = x.shape
        self.cur = np.empty((N0, N1, self.n0, self.n1), dtype=np.complex128)
        self.scratch = np.empty((N0, N1, self.n0, self.n1), dtype=np.complex128)
        self.allocated_elements = 2 * N0 * N1 * self.n0 * self.n1
        self.cur[:, :, 0, 0] = x
        self.level = 0

    @property
    def total_levels(self) -> int:
        return self.m0 + self.m1

    def _run_chunks(self, axis0_lo, axis0_hi, task):
        if self.threads == 1:
            task(axis0_lo, axis0_hi)
            return
        chunks = _split(axis0_lo, axis0_hi, self.threads)
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            list(pool.map(lambda ab: task(*ab), chunks))

    def coefficients(self) -> np.ndarray:
        if self.level != self.total_levels:
            raise StateError(f"lattice at level {self.level}, not final {self.total_levels}")
        return self.cur[self.n0 - 1 :, self.n1 - 1 :, :, :].copy()


def row_level_step(lattice: TreeLattice2D, t: int) -> None:
    """Advance the lattice through row level t (combines along dimension 1)."""
    if t != lattice.level + 1 or not 1 <= t <= lattice.m1:
        raise StateError(f"row level {t} does not follow level {lattice.level}")
    N0, N1 = lattice.shape
    s = 1 << (lattice.m1 - t)
    L = 1 << t
    idx = np.arange(L) % (L // 2)
    tw = lattice.tw1[np.arange(L) * s]
    lo = lattice.n1 - s
    cur, scratch = lattice.cur, lattice.scratch

    def task(a, b):
        shifted = cur[a:b, lo - s : N1 - s, 0, idx]
        current = cur[a:b, lo:, 0, idx]
        butterfly(shifted, tw, current, out=scratch[a:b, lo:, 0, :L])

    lattice._run_chunks(0, N0, task)
    if lattice.counter is not None:
        lattice.counter.add_region((slice(0, N0), slice(lo, N1)), L, N0 * (N1 - lo))
    lattice.cur, lattice.scratch = scratch, cur
    lattice.level = t


def col_level_step(lattice: TreeLattice2D, v: int) -> None:
    """Advance the lattice through column level v (combines along dimension 0)."""
    if v != lattice.level + 1 or not lattice.m1 < v <= lattice.total_levels:
        raise StateError(f"column level {v} does not follow level {lattice.level}")
    N0, N1 = lattice.shape
    n0, n1 = lattice.n0, lattice.n1
    s = 1 << (lattice.m0 + lattice.m1 - v)
    L = 1 << (v - lattice.m1)
    ridx = np.arange(L) % max(L // 2, 1)
    tw = lattice.tw0[np.arange(L) * s][:, None]
    lo = n0 - s
    cur, scratch = lattice.cur, lattice.scratch

    def task(a, b):
        shifted = cur[a - s : b - s, n1 - 1 :, ridx, :n1]
        current = cur[a:b, n1 - 1 :, ridx, :n1]
        butterfly(shifted, tw, current, out=scratch[a:b, n1 - 1 :, :L, :n1])

    lattice._run_chunks(lo, N0, task)
    if lattice.counter is not None:
        lattice.counter.add_region(
            (slice(lo, N0), slice(n1 - 1, N1)), L * n1, (N0 - lo) * (N1 - n1 + 1)
        )
    lattice.cur, lattice.scratch = scratch, cur
    lattice.level = v


def _levels_outer(x, spec, counter, threads):
    lattice = TreeLattice2D(x, spec, counter=counter, threads=threads)
    for t in range(1, lattice.m1 + 1):
        row_level_step(lattice, t)
    for v in range(lattice.m1 + 1, lattice.total_levels + 1):
        col_level_step(lattice, v)
    return lattice.coefficients(), lattice.allocated_elements


def _trees_outer(x, spec, counter):
    """Raster order over window positions, levels inside each tree.

    Every tree only references lexicographically earlier trees, so this
    schedule suits data arriving position by position; it keeps all
    levels resident instead of double buffering.
    """
    N0, N1 = x.shape
    m0, m1 = spec.exponents
    n0, n1 = spec.sizes
    tw0, tw1 = make_twiddles(n0), make_twiddles(n1)
    geos = core.shift_schedule(spec)
    store = [np.empty((N0, N1) + g.extents, dtype=np.complex128) for g in geos]
    store[0][:, :, 0, 0] = x
    for p0 in range(N0):
        for p1 in range(N1):
            for g in geos[1:]:
                if p0 < g.thresholds[0] or p1 < g.thresholds[1]:
                    continue
                prev = store[g.level - 1]
                if g.dim == 1:
                    idx = np.arange(g.extents[1]) % g.mod_extent
                    tw = tw1[np.arange(g.extents[1]) * g.shift]
                    butterfly(
                        prev[p0, p1 - g.shift, 0, idx],
                        tw,
                        prev[p0, p1, 0, idx],
                        out=store[g.level][p0, p1, 0],
                    )
                else:
                    ridx = np.arange(g.extents[0]) % g.mod_extent
                    tw = tw0[np.arange(g.extents[0]) * g.shift][:, None]
                    butterfly(
                        prev[p0 - g.shift, p1, ridx, :],
                        tw,
                        prev[p0, p1, ridx, :],
                        out=store[g.level][p0, p1],
                    )
                if counter is not None:
                    counter.add_region((p0, p1), g.nodes_per_tree, 1)
    return store[-1][n0 - 1 :, n1 - 1 :].copy()


def tree_swdft_2d(
    x,
    spec: WindowSpec,
    loop_order: str = "levels-outer",
    counter=None,
    budget: int | None = None,
    threads: int = 1,
) -> CoefficientArray:
    """Sliding-window 2D DFT via the shared-tree algorithm.

    Equals swdft_2d_naive to rounding error and swfft_2d bit for bit;
    both loop orders produce identical output. The budget check runs
    before any level buffer is allocated.
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 2 or spec.k != 2:
        raise core.ShapeError("tree_swdft_2d expects a 2D array and 2D window")
    spec.check_fits(x.shape)
    if loop_order not in LOOP_ORDERS:
        raise ValueError(f"loop_order must be one of {LOOP_ORDERS}")
    required = core.lattice_bytes(x.shape, spec) + core.output_bytes(x.shape, spec)
    core.check_budget(required, budget, what="level buffers + coefficient output")
    if loop_order == "levels-outer":
        vals, _ = _levels_outer(x, spec, counter, threads)
    else:
        vals = _trees_outer(x, spec, counter)
    out = CoefficientArray(vals, x.shape, spec)
    return core.normalize(out, spec.normalization)


class SlidingRowStream2D:
    """Row-push streaming form of the 2D tree transform.

    Keeps the last n0 rows of node storage at every level. Pushing row
    p0 computes all of that row's tree nodes (row levels from the row
    itself, column levels from the banded history) and, once n0 rows
    have arrived, emits the P1 x n0 x n1 coefficient slab for the new
    row of window positions. Each emitted position costs exactly
    2(n0*n1 - 1) butterflies.
    """

    def __init__(self, spec: WindowSpec, row_length: int, counter=None):
        if spec.k != 2:
            raise core.ShapeError("SlidingRowStream2D needs a 2D window spec")
        self.spec = spec
        self.m0, self.m1 = spec.exponents
        self.n0, self.n1 = spec.sizes
        self.N1 = int(row_length)
        if self.n1 > self.N1:
            raise core.WindowTooLargeError(
                f"window size {self.n1} exceeds row length {self.N1}"
            )
        self.counter = counter
        self.tw0 = make_twiddles(self.n0)
        self.tw1 = make_twiddles(self.n1)
        self._geos = core.shift_schedule(spec)
        self._rings = [
            np.empty((self.n0, self.N1) + g.extents, dtype=np.complex128) for g in self._geos
        ]
        self._factor = np.float64(core.normalization_factor(spec))
        self.rows_pushed = 0
        self.ops_last_push = 0
        self.last_push_position_ops = np.zeros(self.N1, dtype=np.int64)
        self.closed = False

    def push_row(self, row) -> np.ndarray | None:
        """Ingest one length-N1 row; returns a (P1, n0, n1) slab once n0
        rows have arrived, None while warming up."""
        if self.closed:
            raise StateError("push after close")
        row = np.asarray(row, dtype=np.complex128)
        if row.shape != (self.N1,):
            raise core.ShapeError(f"row shape {row.shape} != ({self.N1},)")
        p0 = self.rows_pushed
        slot = p0 % self.n0
        self._rings[0][slot, :, 0, 0] = row
        self.last_push_position_ops[:] = 0
        ops = 0
        for g in self._geos[1:]:
            if g.dim == 1:
                s = g.shift
                L = g.extents[1]
                idx = np.arange(L) % g.mod_extent
                tw = self.tw1[np.arange(L) * s]
                lo = self.n1 - s
                prev = self._rings[g.level - 1]
                butterfly(
                    prev[slot, lo - s : self.N1 - s, 0, idx],
                    tw,
                    prev[slot, lo:, 0, idx],
                    out=self._rings[g.level][slot, lo:, 0, :L],
                )
                ops += (self.N1 - lo) * L
                self.last_push_position_ops[lo:] += L
                if self.counter is not None:
                    self.counter.add_region((p0, slice(lo, self.N1)), L, self.N1 - lo)
            else:
                s = g.shift
                if p0 < self.n0 - s:
                    break  # deeper column levels need even more rows
                L = g.extents[0]
                ridx = np.arange(L) % g.mod_extent
                tw = self.tw0[np.arange(L) * s][:, None]
                src = (p0 - s) % self.n0
                prev = self._rings[g.level - 1]
                butterfly(
                    prev[src, self.n1 - 1 :, ridx, :],
                    tw,
                    prev[slot, self.n1 - 1 :, ridx, :],
                    out=self._rings[g.level][slot, self.n1 - 1 :, :L, :],
                )
                count = (self.N1 - self.n1 + 1) * L * self.n1
                ops += count
                self.last_push_position_ops[self.n1 - 1 :] += L * self.n1
                if self.counter is not None:
                    self.counter.add_region(
                        (p0, slice(self.n1 - 1, self.N1)), L * self.n1, self.N1 - self.n1 + 1
                    )
        self.ops_last_push = ops
        self.rows_pushed += 1
        if p0 < self.n0 - 1:
            return None
        slab = self._rings[-1][slot, self.n1 - 1 :, :, :].copy()
        if self.spec.normalization != "none":
            slab *= self._factor
        return slab

    def close(self) -> None:
        self.closed = True
