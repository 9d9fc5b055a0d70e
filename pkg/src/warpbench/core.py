"""Exact DTW: full, Sakoe-Chiba banded (cDTW) and the Euclidean special case.

All distances are the raw accumulated squared cost ``D(N, M)``; no square
root is taken anywhere in the library.

Warping paths are 0-based ``(K, 2)`` integer arrays running from ``(0, 0)``
to ``(N-1, M-1)``.
"""
from __future__ import annotations

import math
from typing import NamedTuple, Optional

import numpy as np
from numba import njit

from .errors import InvalidBand, InvalidSeries, UnequalLengths

INF = np.inf


class DtwResult(NamedTuple):
    cost: float
    path: Optional[np.ndarray] = None


def as_series(x, name="series") -> np.ndarray:
    """Validate and convert ``x`` to a contiguous 1-D float64 array."""
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidSeries(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise InvalidSeries(f"{name} must contain at least one sample")
    if not np.isfinite(arr).all():
        raise InvalidSeries(f"{name} contains non-finite samples")
    return arr


def check_band(fraction) -> float:
    fraction = float(fraction)
    if not (0.0 <= fraction <= 1.0):
        raise InvalidBand(f"band fraction out of range: {fraction!r} (expected 0 <= w <= 1)")
    return fraction


def local_cost(a: float, b: float) -> float:
    d = a - b
    return d * d


def band_cells(fraction: float, n: int) -> int:
    """Resolve a band fraction to a cell count for series of length ``n``.

    Rounds half away from zero (``0.04 * 945 = 37.8 -> 38``) and clamps to
    ``[0, n - 1]``. The product is first rounded to 9 decimals so binary
    representation error cannot flip an exact half.
    """
    fraction = check_band(fraction)
    if n < 1:
        raise ValueError("n must be >= 1")
    if fraction >= 1.0:
        return n - 1
    cells = math.floor(round(fraction * n, 9) + 0.5)
    return max(0, min(n - 1, cells))


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def _band_cost(x, y, c):
    # Rolling rows of width 2c+1; slot k of row i holds column j = i - c + k.
    # The extra trailing slot is a permanent +inf sentinel for the "up" read.
    n = x.shape[0]
    width = 2 * c + 1
    prev = np.full(width + 1, INF)
    cur = np.full(width + 1, INF)
    prev[c] = 0.0  # virtual D(-1, -1)
    for i in range(n):
        klo = c - i if i < c else 0
        khi = n - 1 - i + c if n - 1 - i < c else 2 * c
        for k in range(klo):
            cur[k] = INF
        xi = x[i]
        left = INF
        for k in range(klo, khi + 1):
            d = xi - y[i - c + k]
            best = prev[k]
            up = prev[k + 1]
            if up < best:
                best = up
            if left < best:
                best = left
            left = d * d + best
            cur[k] = left
        for k in range(khi + 1, width):
            cur[k] = INF
        prev, cur = cur, prev
    return prev[c]


@njit(cache=True)
def _full_cost(x, y):
    n = x.shape[0]
    m = y.shape[0]
    prev = np.full(m + 1, INF)
    cur = np.full(m + 1, INF)
    prev[0] = 0.0
    for i in range(n):
        cur[0] = INF
        xi = x[i]
        for j in range(m):
            d = xi - y[j]
            best = prev[j]
            if prev[j + 1] < best:
                best = prev[j + 1]
            if cur[j] < best:
                best = cur[j]
            cur[j + 1] = d * d + best
        prev, cur = cur, prev
    return prev[m]


@njit(cache=True)
def _euclid_cost(x, y):
    # Same summation order as the diagonal of the DP, so cdtw(., 0) matches bit for bit.
    acc = 0.0
    for i in range(x.shape[0]):
        d = x[i] - y[i]
        acc = d * d + acc
    return acc


@njit(cache=True)
def _window_matrix(x, y, jmin, jmax):
    """Fill the accumulated-cost matrix restricted to per-row column ranges.

    Returns ``(offsets, D)`` where row ``i`` occupies
    ``D[offsets[i]:offsets[i+1]]`` for columns ``jmin[i]..jmax[i]``.
    """
    n = x.shape[0]
    offsets = np.empty(n + 1, np.int64)
    offsets[0] = 0
    for i in range(n):
        offsets[i + 1] = offsets[i] + jmax[i] - jmin[i] + 1
    D = np.empty(offsets[n])
    plo = 0
    phi = -1
    pbase = 0
    for i in range(n):
        lo = jmin[i]
        hi = jmax[i]
        base = offsets[i] - lo
        xi = x[i]
        left = INF
        for j in range(lo, hi + 1):
            d = xi - y[j]
            if i == 0 and j == 0:
                best = 0.0
            else:
                best = left
                if plo <= j <= phi:
                    up = D[pbase + j]
                    if up < best:
                        best = up
                if plo <= j - 1 <= phi:
                    diag = D[pbase + j - 1]
                    if diag < best:
                        best = diag
            left = d * d + best
            D[base + j] = left
        plo = lo
        phi = hi
        pbase = base
    return offsets, D


@njit(cache=True)
def _traceback(offsets, D, jmin, jmax, m):
    # Tie order: diagonal, then (i-1, j), then (i, j-1).
    n = jmin.shape[0]
    out = np.empty((n + m - 1, 2), np.int64)
    i = n - 1
    j = m - 1
    k = n + m - 2
    out[k, 0] = i
    out[k, 1] = j
    while i > 0 or j > 0:
        diag = INF
        up = INF
        left = INF
        if i > 0:
            plo = jmin[i - 1]
            phi = jmax[i - 1]
            pbase = offsets[i - 1] - plo
            if j > 0 and plo <= j - 1 <= phi:
                diag = D[pbase + j - 1]
            if plo <= j <= phi:
                up = D[pbase + j]
        if j > 0 and j - 1 >= jmin[i]:
            left = D[offsets[i] - jmin[i] + j - 1]
        if diag <= up and diag <= left:
            i -= 1
            j -= 1
        elif up <= left:
            i -= 1
        else:
            j -= 1
        k -= 1
        out[k, 0] = i
        out[k, 1] = j
    return out[k:].copy()


def _solve_window(x, y, jmin, jmax, want_path):
    offsets, D = _window_matrix(x, y, jmin, jmax)
    cost = float(D[-1])
    path = _traceback(offsets, D, jmin, jmax, y.shape[0]) if want_path else None
    return DtwResult(cost, path)


def band_window(n: int, cells: int):
    """Per-row ``(jmin, jmax)`` arrays of a Sakoe-Chiba band on an n x n matrix."""
    rows = np.arange(n, dtype=np.int64)
    return np.maximum(rows - cells, 0), np.minimum(rows + cells, n - 1)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def full_dtw(x, y, want_path: bool = False) -> DtwResult:
    """Unconstrained DTW between ``x`` and ``y`` (lengths may differ)."""
    x = as_series(x, "x")
    y = as_series(y, "y")
    if not want_path:
        return DtwResult(float(_full_cost(x, y)))
    n, m = x.shape[0], y.shape[0]
    jmin = np.zeros(n, np.int64)
    jmax = np.full(n, m - 1, np.int64)
    return _solve_window(x, y, jmin, jmax, True)


def cdtw(x, y, band: float, want_path: bool = False) -> DtwResult:
    """DTW constrained to ``|i - j| <= band_cells(band, N)``.

    ``band`` is a fraction of the series length: 0 gives the squared
    Euclidean distance and 1 gives full DTW. A band below 1 requires
    equal lengths.
    """
    band = check_band(band)
    x = as_series(x, "x")
    y = as_series(y, "y")
    n = x.shape[0]
    if band >= 1.0:
        return full_dtw(x, y, want_path)
    if n != y.shape[0]:
        raise UnequalLengths(f"banded cdtw needs equal lengths, got {n} and {y.shape[0]}")
    c = band_cells(band, n)
    if not want_path:
        return DtwResult(float(_band_cost(x, y, c)))
    jmin, jmax = band_window(n, c)
    return _solve_window(x, y, jmin, jmax, True)


def euclidean_sq(x, y) -> float:
    x = as_series(x, "x")
    y = as_series(y, "y")
    if x.shape[0] != y.shape[0]:
        raise UnequalLengths(f"euclidean_sq needs equal lengths, got {x.shape[0]} and {y.shape[0]}")
    return float(_euclid_cost(x, y))


def path_cost(x, y, path) -> float:
    """Sum of local costs along ``path``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    path = np.asarray(path)
    d = x[path[:, 0]] - y[path[:, 1]]
    return float(np.dot(d, d))


def check_path(path, n: int, m: int) -> bool:
    """True if ``path`` is a valid monotone, continuous warping path over n x m."""
    path = np.asarray(path)
    if path.ndim != 2 or path.shape[1] != 2 or path.shape[0] < 1:
        return False
    if tuple(path[0]) != (0, 0) or tuple(path[-1]) != (n - 1, m - 1):
        return False
    steps = np.diff(path, axis=0)
    if steps.size == 0:
        return True
    ok = ((steps == 0) | (steps == 1)).all(axis=1) & (steps.sum(axis=1) > 0)
    return bool(ok.all())
