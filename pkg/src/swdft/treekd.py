"""k-dimensional tree sliding-window DFT.

A plan-driven generalization of the 1D/2D transforms: dimension k-1
owns the first block of tree levels, dimension 0 the last, each level
combining along its owning dimension with a power-of-two shift. The
engine walks the level plan with dynamically built slices instead of
generating per-k loop nests; the 1D and 2D specializations remain the
fast paths and double as differential-test anchors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import core
from .core import (
    CoefficientArray,
    LevelGeometry,
    StateError,
    WindowSpec,
    butterfly,
    make_twiddles,
)


@dataclass(frozen=True)
class LevelPlan:
    """Ordered level geometries for one window spec (levels 1..total)."""

    spec: WindowSpec
    steps: tuple[LevelGeometry, ...]


def build_level_plan(spec: WindowSpec) -> LevelPlan:
    """Build the per-level schedule: owning dimension, shift, node extents,
    node-index modulus, and validity thresholds."""
    steps = tuple(core.level_geometry(l, spec) for l in range(1, spec.total_levels + 1))
    owned = [0] * spec.k
    for g in steps:
        owned[g.dim] += 1
    assert list(owned) == list(spec.exponents)
    return LevelPlan(spec, steps)


class TreeLatticeKd:
    """Double-buffered node storage for the generic engine: two buffers of
    shape N_0 x ... x N_{k-1} x n_0 x ... x n_{k-1}."""

    def __init__(self, x: np.ndarray, spec: WindowSpec, counter=None):
        self.spec = spec
        self.shape = x.shape
        self.k = spec.k
        self.counter = counter
        self.tw = [make_twiddles(n) for n in spec.sizes]
        self.cur = np.empty(x.shape + spec.sizes, dtype=np.complex128)
        self.scratch = np.empty(x.shape + spec.sizes, dtype=np.complex128)
        self.allocated_elements = 2 * math.prod(x.shape) * spec.window_elements
        self.cur[(Ellipsis,) + (0,) * self.k] = x
        self.level = 0

    def coefficients(self) -> np.ndarray:
        if self.level != self.spec.total_levels:
            raise StateError(f"lattice at level {self.level}, not final {self.spec.total_levels}")
        sel = tuple(slice(n - 1, None) for n in self.spec.sizes)
        return self.cur[sel].copy()


def kd_level_step(lattice: TreeLatticeKd, geo: LevelGeometry) -> None:
    """Advance the lattice through one level of the plan."""
    if geo.level != lattice.level + 1:
        raise StateError(f"level {geo.level} does not follow level {lattice.level}")
    k = lattice.k
    c = geo.dim
    s = geo.shift
    shape = lattice.shape
    pos_dst = tuple(slice(thr, N) for thr, N in zip(geo.thresholds, shape))
    pos_src = list(pos_dst)
    pos_src[c] = slice(geo.thresholds[c] - s, shape[c] - s)
    idx = np.arange(geo.extents[c]) % geo.mod_extent
    node_src = tuple(
        slice(0, 1) if i < c else idx if i == c else slice(0, geo.extents[i]) for i in range(k)
    )
    node_dst = tuple(slice(0, e) for e in geo.extents)
    tw = lattice.tw[c][np.arange(geo.extents[c]) * s].reshape((-1,) + (1,) * (k - 1 - c))

    butterfly(
        lattice.cur[tuple(pos_src) + node_src],
        tw,
        lattice.cur[pos_dst + node_src],
        out=lattice.scratch[pos_dst + node_dst],
    )
    if lattice.counter is not None:
        positions = math.prod(N - thr for thr, N in zip(geo.thresholds, shape))
        lattice.counter.add_region(pos_dst, geo.nodes_per_tree, positions)
    lattice.cur, lattice.scratch = lattice.scratch, lattice.cur
    lattice.level = geo.level


def tree_swdft_kd(
    x, spec: WindowSpec, counter=None, budget: int | None = None
) -> CoefficientArray:
    """Sliding-window DFT of a k-dimensional array via the generic tree
    engine. Matches swdft_kd_naive to rounding error; the k=1 and k=2
    paths are bit-identical to the specialized modules."""
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != spec.k:
        raise core.ShapeError(
            f"{spec.k}-dimensional window applied to {x.ndim}-dimensional array"
        )
    spec.check_fits(x.shape)
    required = core.lattice_bytes(x.shape, spec) + core.output_bytes(x.shape, spec)
    core.check_budget(required, budget, what="level buffers + coefficient output")
    plan = build_level_plan(spec)
    lattice = TreeLatticeKd(x, spec, counter=counter)
    for geo in plan.steps:
        kd_level_step(lattice, geo)
    out = CoefficientArray(lattice.coefficients(), x.shape, spec)
    return core.normalize(out, spec.normalization)
