"""1D tree sliding-window DFT.

One binary tree of FFT nodes per window position; level l of the tree
at position p holds the length-2**l DFT of the stride-2**(m-l)
subsequence ending at x[p]. Each node is one butterfly combining the
same node of the tree ``shift`` positions back (the reused half) with
this tree's previous level, so overlapping windows share all but
2(n-1) operations.
"""

from __future__ import annotations

import numpy as np

from . import core
from .core import CoefficientArray, StateError, WindowSpec, butterfly, make_twiddles


def _level_slices(m: int, n: int, N: int):
    """Per level: (level, shift, node count, source/current row slices, node index)."""
    for l in range(1, m + 1):
        s = 1 << (m - l)
        L = 1 << l
        idx = np.arange(L) % (L // 2)
        lo = n - s  # minimum position owning a level-l node
        yield l, s, L, idx, lo


def tree_swdft_1d(x, spec: WindowSpec, counter=None) -> CoefficientArray:
    """Sliding-window DFT of a 1D signal via the shared-tree algorithm.

    Output row p-(n-1) equals the unnormalized DFT of x[p-n+1 .. p],
    then scaled per ``spec.normalization``. Matches swdft_1d_naive to
    rounding error and per-window fft_radix2 exactly.
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1 or spec.k != 1:
        raise core.ShapeError("tree_swdft_1d expects a 1D signal and 1D window")
    spec.check_fits(x.shape)
    (m,) = spec.exponents
    (n,) = spec.sizes
    N = len(x)
    tw = make_twiddles(n)

    # double buffer, each N x n: previous level / current level
    cur = np.empty((N, n), dtype=np.complex128)
    scratch = np.empty((N, n), dtype=np.complex128)
    cur[:, 0] = x
    for l, s, L, idx, lo in _level_slices(m, n, N):
        assert (np.arange(L) * s).max(initial=0) <= n - 1
        shifted = cur[lo - s : N - s, idx]
        current = cur[lo:, idx]
        butterfly(shifted, tw[np.arange(L) * s], current, out=scratch[lo:, :L])
        if counter is not None:
            counter.add_region((slice(lo, N),), L, N - lo)
        cur, scratch = scratch, cur

    vals = cur[n - 1 :, :n].copy()
    out = CoefficientArray(vals, x.shape, spec)
    return core.normalize(out, spec.normalization)


class SlidingStream1D:
    """Sample-push streaming form of the 1D tree transform.

    Keeps a ring of the last n positions' node values at every level;
    each push computes the new position's tree level by level and, once
    n samples have arrived, emits that window's coefficients. A warmed
    stream costs exactly 2(n-1) butterflies per push.
    """

    def __init__(self, spec: WindowSpec, counter=None):
        if spec.k != 1:
            raise core.ShapeError("SlidingStream1D needs a 1D window spec")
        (self.m,) = spec.exponents
        (self.n,) = spec.sizes
        self.spec = spec
        self.counter = counter
        tw = make_twiddles(self.n)
        self._levels = []
        for l in range(1, self.m + 1):
            s = 1 << (self.m - l)
            L = 1 << l
            idx = np.arange(L) % (L // 2)
            self._levels.append((l, s, idx, tw[np.arange(L) * s]))
        self._rings = [np.empty((self.n, 1 << l), dtype=np.complex128) for l in range(self.m + 1)]
        self._factor = np.float64(core.normalization_factor(spec))
        self.pushed = 0
        self.ops_last_push = 0
        self.closed = False

    def push(self, sample) -> np.ndarray | None:
        """Ingest one sample; returns the length-n coefficient vector once
        the window is full, None while warming up."""
        if self.closed:
            raise StateError("push after close")
        p = self.pushed
        slot = p % self.n
        self._rings[0][slot, 0] = sample
        ops = 0
        for l, s, idx, tw in self._levels:
            if p < self.n - s:
                break  # higher levels need even more history
            prev = self._rings[l - 1]
            butterfly(prev[(p - s) % self.n, idx], tw, prev[slot, idx], out=self._rings[l][slot])
            ops += len(idx)
            if self.counter is not None:
                self.counter.add_region((p,), len(idx), 1)
        self.ops_last_push = ops
        self.pushed += 1
        if p < self.n - 1:
            return None
        coeffs = self._rings[self.m][slot].copy()
        if self.spec.normalization != "none":
            coeffs *= self._factor
        return coeffs

    def close(self) -> None:
        self.closed = True
