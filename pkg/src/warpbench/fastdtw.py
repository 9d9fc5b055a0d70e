"""FastDTW: coarse-to-fine approximation of full DTW.

Each level halves both series (adjacent-pair means), solves the smaller
problem, projects the coarse warping path up to the finer grid, widens it
by ``radius`` cells and runs DTW restricted to that window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import DtwResult, _solve_window, as_series, check_path, full_dtw
from .errors import InvalidPath, InvalidWindow, NegativeInput


@dataclass(frozen=True)
class SearchWindow:
    """Per-row inclusive column ranges ``jmin[i]..jmax[i]`` (0-based) over ``ncols`` columns."""

    jmin: np.ndarray
    jmax: np.ndarray
    ncols: int

    @property
    def nrows(self) -> int:
        return int(self.jmin.shape[0])

    @property
    def size(self) -> int:
        return int((self.jmax - self.jmin + 1).sum())

    @classmethod
    def full(cls, n: int, m: int) -> "SearchWindow":
        return cls(np.zeros(n, np.int64), np.full(n, m - 1, np.int64), m)

    @classmethod
    def from_ranges(cls, ranges, ncols: int) -> "SearchWindow":
        ranges = np.asarray(ranges, dtype=np.int64).reshape(-1, 2)
        return cls(ranges[:, 0].copy(), ranges[:, 1].copy(), int(ncols))

    def contains(self, i: int, j: int) -> bool:
        return 0 <= i < self.nrows and self.jmin[i] <= j <= self.jmax[i]

    def validate(self, n: int | None = None, m: int | None = None) -> None:
        jmin, jmax = self.jmin, self.jmax
        if n is not None and self.nrows != n:
            raise InvalidWindow(f"window has {self.nrows} rows, expected {n}")
        if m is not None and self.ncols != m:
            raise InvalidWindow(f"window has {self.ncols} columns, expected {m}")
        if self.nrows < 1:
            raise InvalidWindow("window has no rows")
        if (jmin < 0).any() or (jmax >= self.ncols).any() or (jmin > jmax).any():
            raise InvalidWindow("row range outside matrix or empty")
        if (jmin[1:] > jmax[:-1] + 1).any():
            raise InvalidWindow("row ranges are not staircase-connected")
        if jmin[0] != 0 or jmax[-1] != self.ncols - 1:
            raise InvalidWindow("window must contain both corner cells")


def reduce_by_half(x) -> np.ndarray:
    """Adjacent-pair means; an odd trailing sample is carried over unchanged."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    half = n // 2
    out = np.empty((n + 1) // 2)
    out[:half] = (x[0 : 2 * half : 2] + x[1 : 2 * half : 2]) * 0.5
    if n % 2:
        out[-1] = x[-1]
    return out


def paa(x, factor: int) -> np.ndarray:
    """Piecewise aggregate approximation with window ``factor``; the last window may be short."""
    if int(factor) != factor or factor < 1:
        raise ValueError(f"factor must be a positive integer, got {factor!r}")
    factor = int(factor)
    x = np.asarray(x, dtype=np.float64)
    if factor == 1:
        return x.copy()
    n = x.shape[0]
    starts = np.arange(0, n, factor)
    sums = np.add.reduceat(x, starts)
    counts = np.minimum(starts + factor, n) - starts
    return sums / counts


@njit(cache=True)
def _project_expand(path, n, m, r):
    pmin = np.full(n, m, np.int64)
    pmax = np.full(n, -1, np.int64)
    for k in range(path.shape[0]):
        ci = path[k, 0]
        cj = path[k, 1]
        lo = 2 * cj
        hi = min(2 * cj + 1, m - 1)
        for fi in range(2 * ci, min(2 * ci + 2, n)):
            if lo < pmin[fi]:
                pmin[fi] = lo
            if hi > pmax[fi]:
                pmax[fi] = hi
    # A monotone coarse path projects to non-decreasing row bounds, so the
    # Chebyshev dilation of row i is bounded by rows i-r (left) and i+r (right).
    jmin = np.empty(n, np.int64)
    jmax = np.empty(n, np.int64)
    for i in range(n):
        a = max(0, i - r)
        b = min(n - 1, i + r)
        jmin[i] = max(0, pmin[a] - r)
        jmax[i] = min(m - 1, pmax[b] + r)
    jmin[0] = 0
    jmax[n - 1] = m - 1
    for i in range(n - 1):
        if jmin[i + 1] > jmax[i] + 1:
            jmin[i + 1] = jmax[i] + 1
    return jmin, jmax


def check_radius(r) -> int:
    if int(r) != r or r < 0:
        raise ValueError(f"radius must be a non-negative integer, got {r!r}")
    return int(r)


def project_and_expand(coarse_path, n: int, m: int, r: int) -> SearchWindow:
    """Project a coarse path onto the n x m grid and widen it by ``r`` cells."""
    r = check_radius(r)
    path = np.asarray(coarse_path, dtype=np.int64).reshape(-1, 2)
    cn, cm = (n + 1) // 2, (m + 1) // 2
    if not check_path(path, cn, cm):
        raise InvalidPath(f"coarse path is not a valid warping path over {cn} x {cm}")
    jmin, jmax = _project_expand(np.ascontiguousarray(path), n, m, r)
    return SearchWindow(jmin, jmax, m)


def windowed_dtw(x, y, window: SearchWindow, want_path: bool = False) -> DtwResult:
    """DTW evaluated only on the cells of ``window``; optimal within it."""
    x = as_series(x, "x")
    y = as_series(y, "y")
    window.validate(x.shape[0], y.shape[0])
    jmin = np.ascontiguousarray(window.jmin, dtype=np.int64)
    jmax = np.ascontiguousarray(window.jmax, dtype=np.int64)
    res = _solve_window(x, y, jmin, jmax, want_path)
    if not math.isfinite(res.cost):
        raise InvalidWindow("no monotone path connects the corners inside the window")
    return res


def _fastdtw(x, y, r, want_path):
    # Iterative: build the pyramid, solve the coarsest level exactly, refine upward.
    levels = [(x, y)]
    a, b = x, y
    while min(a.shape[0], b.shape[0]) > r + 2:
        a, b = reduce_by_half(a), reduce_by_half(b)
        levels.append((a, b))
    if len(levels) == 1:
        return full_dtw(x, y, want_path)
    path = full_dtw(a, b, True).path
    res = None
    for depth in range(len(levels) - 2, -1, -1):
        a, b = levels[depth]
        jmin, jmax = _project_expand(path, a.shape[0], b.shape[0], r)
        res = _solve_window(a, b, jmin, jmax, want_path or depth > 0)
        path = res.path
    return res


def fastdtw(x, y, radius: int = 1, want_path: bool = False) -> DtwResult:
    """Approximate full DTW in linear time; never reports less than the exact cost."""
    r = check_radius(radius)
    x = as_series(x, "x")
    y = as_series(y, "y")
    return _fastdtw(x, y, r, want_path)


def approx_error_pct(approx: float, exact: float) -> float:
    """Relative approximation error ``100 * (approx - exact) / exact``.

    A zero exact distance gives 0 when the approximation is also zero and
    ``inf`` otherwise.
    """
    if approx < 0 or exact < 0:
        raise NegativeInput(f"distances must be non-negative, got {approx!r}, {exact!r}")
    if exact == 0:
        return 0.0 if approx == 0 else math.inf
    return 100.0 * (approx - exact) / exact
