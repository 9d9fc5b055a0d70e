"""Repeated-query acceleration for cDTW: z-normalisation, LB_Keogh and early abandoning.

Every DP routine here counts the matrix cells it evaluates so speedups can
be checked without relying on wall-clock time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
from numba import njit
from scipy.ndimage import maximum_filter1d, minimum_filter1d

from .core import as_series, band_cells, band_window, cdtw, check_band
from .errors import EmptyCandidates, UnequalLengths

INF = np.inf


def znorm(x) -> np.ndarray:
    """Zero mean, unit population standard deviation; near-constant input maps to zeros."""
    x = as_series(x)
    std = x.std()
    if std < 1e-12:
        return np.zeros_like(x)
    return (x - x.mean()) / std


@dataclass(frozen=True)
class Envelope:
    upper: np.ndarray
    lower: np.ndarray
    window_cells: int


def envelope(q, window_cells: int) -> Envelope:
    """Running max/min of ``q`` over ``i - w .. i + w`` (clipped at the ends)."""
    q = as_series(q, "q")
    w = int(window_cells)
    if not 0 <= w <= max(0, q.shape[0] - 1):
        raise ValueError(f"window_cells must lie in [0, {q.shape[0] - 1}], got {w}")
    size = 2 * w + 1
    # mode="nearest" repeats the edge sample, which never changes a max/min
    upper = maximum_filter1d(q, size, mode="nearest")
    lower = minimum_filter1d(q, size, mode="nearest")
    return Envelope(upper, lower, w)


def lb_keogh(candidate, env: Envelope) -> float:
    c = as_series(candidate, "candidate")
    if c.shape[0] != env.upper.shape[0]:
        raise UnequalLengths(f"candidate length {c.shape[0]} != envelope length {env.upper.shape[0]}")
    above = np.maximum(c - env.upper, 0.0)
    below = np.maximum(env.lower - c, 0.0)
    return float(np.dot(above, above) + np.dot(below, below))


@njit(cache=True)
def _windowed_cost_ea(x, y, jmin, jmax, threshold):
    """Rolling-row DP over per-row ranges; abandons once a whole row is >= threshold.

    Returns ``(cost, cells)``; ``cost`` is +inf when abandoned.
    """
    n = x.shape[0]
    m = y.shape[0]
    # slot j+1 holds column j; slot 0 is column -1
    prev = np.full(m + 1, INF)
    cur = np.full(m + 1, INF)
    prev[0] = 0.0  # virtual D(-1, -1)
    prev_lo, prev_hi = -1, -1
    cur_lo, cur_hi = 0, -1
    cells = 0
    for i in range(n):
        lo = jmin[i]
        hi = jmax[i]
        cur[lo] = INF
        xi = x[i]
        rowmin = INF
        for j in range(lo, hi + 1):
            d = xi - y[j]
            best = prev[j]
            if prev[j + 1] < best:
                best = prev[j + 1]
            if cur[j] < best:
                best = cur[j]
            v = d * d + best
            cur[j + 1] = v
            if v < rowmin:
                rowmin = v
        cells += hi - lo + 1
        if rowmin >= threshold:
            return INF, cells
        # whatever this buffer held two rows ago must read as +inf from now on
        for col in range(cur_lo, min(cur_hi, lo - 1) + 1):
            cur[col + 1] = INF
        for col in range(max(cur_lo, hi + 1), cur_hi + 1):
            cur[col + 1] = INF
        cur_lo, cur_hi = lo, hi
        prev, cur = cur, prev
        prev_lo, prev_hi, cur_lo, cur_hi = cur_lo, cur_hi, prev_lo, prev_hi
    return prev[m], cells


def _band_ranges(n: int, m: int, band: float):
    if band >= 1.0:
        return np.zeros(n, np.int64), np.full(n, m - 1, np.int64)
    if n != m:
        raise UnequalLengths(f"banded cdtw needs equal lengths, got {n} and {m}")
    return band_window(n, band_cells(band, n))


def cdtw_early_abandon(x, y, band: float, threshold: float = math.inf) -> Optional[float]:
    """cDTW cost if it is below ``threshold``, else ``None``.

    Abandoning happens as soon as every cell of a DP row is at least
    ``threshold``; costs only grow along a path, so no pair with a true
    cost below the threshold is ever abandoned.
    """
    cost, _ = _early_abandon(as_series(x, "x"), as_series(y, "y"), check_band(band), threshold)
    return cost


def _early_abandon(x, y, band, threshold):
    jmin, jmax = _band_ranges(x.shape[0], y.shape[0], band)
    cost, cells = _windowed_cost_ea(x, y, jmin, jmax, float(threshold))
    if cost >= threshold or not math.isfinite(cost):
        return None, int(cells)
    return float(cost), int(cells)


class NNResult(NamedTuple):
    index: int
    cost: float
    cells: int  # DP cells evaluated over the whole scan
    pruned: int  # candidates discarded by LB_Keogh without running the DP


def nn_search(
    query,
    candidates: Sequence,
    band: float,
    use_lb: bool = False,
    use_ea: bool = False,
    use_znorm: bool = False,
) -> NNResult:
    """1-NN of ``query`` among ``candidates`` under cDTW; ties go to the earliest candidate.

    The accelerations never change the answer: with the same ``use_znorm``
    setting every flag combination returns the naive scan's result.
    """
    band = check_band(band)
    if len(candidates) == 0:
        raise EmptyCandidates("nn_search needs at least one candidate")
    q = as_series(query, "query")
    cands = [as_series(c, f"candidates[{i}]") for i, c in enumerate(candidates)]
    if use_znorm:
        q = znorm(q)
        cands = [znorm(c) for c in cands]
    n = q.shape[0]
    if band < 1.0:
        for i, c in enumerate(cands):
            if c.shape[0] != n:
                raise UnequalLengths(f"candidate {i} has length {c.shape[0]}, query has {n}")

    env = None
    if use_lb and band < 1.0:
        env = envelope(q, band_cells(band, n))

    best_i, best = -1, math.inf
    cells = 0
    pruned = 0
    for i, c in enumerate(cands):
        if env is not None and best < math.inf and lb_keogh(c, env) >= best:
            pruned += 1
            continue
        if use_ea:
            cost, used = _early_abandon(q, c, band, best)
            cells += used
            if cost is None:
                continue
        else:
            cost = cdtw(q, c, band).cost
            cells += _window_size(n, c.shape[0], band)
        if cost < best:
            best_i, best = i, cost
    return NNResult(best_i, best, cells, pruned)


def _window_size(n: int, m: int, band: float) -> int:
    if band >= 1.0:
        return n * m
    jmin, jmax = band_window(n, band_cells(band, n))
    return int((jmax - jmin + 1).sum())
