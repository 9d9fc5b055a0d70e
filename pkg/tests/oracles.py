"""Slow, independent reference implementations used only by the tests."""
from decimal import ROUND_HALF_UP, Decimal

import numpy as np


def all_paths(n, m, band=None):
    """Every monotone, continuous warping path over an n x m grid (0-based)."""
    out = []

    def walk(i, j, acc):
        if band is not None and abs(i - j) > band:
            return
        acc.append((i, j))
        if (i, j) == (n - 1, m - 1):
            out.append(list(acc))
        else:
            if i + 1 < n and j + 1 < m:
                walk(i + 1, j + 1, acc)
            if i + 1 < n:
                walk(i + 1, j, acc)
            if j + 1 < m:
                walk(i, j + 1, acc)
        acc.pop()

    walk(0, 0, [])
    return out


def brute_force_cost(x, y, band=None, cells=None):
    """Minimum squared cost over enumerated paths, optionally restricted to a set of cells."""
    best = np.inf
    for path in all_paths(len(x), len(y), band):
        if cells is not None and any(c not in cells for c in path):
            continue
        cost = sum((x[i] - y[j]) ** 2 for i, j in path)
        best = min(best, cost)
    return best


def naive_dtw(x, y, band=None):
    """Plain-Python full-matrix DTW; ``band`` is a cell count."""
    n, m = len(x), len(y)
    D = [[np.inf] * (m + 1) for _ in range(n + 1)]
    D[0][0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            if band is not None and abs(i - j) > band:
                continue
            D[i][j] = (x[i - 1] - y[j - 1]) ** 2 + min(D[i - 1][j - 1], D[i - 1][j], D[i][j - 1])
    return D[n][m]


def round_half_up_cells(fraction, n):
    cells = int((Decimal(repr(fraction)) * n).quantize(Decimal(1), rounding=ROUND_HALF_UP))
    return max(0, min(n - 1, cells))


def naive_envelope(q, w):
    n = len(q)
    upper = [max(q[max(0, i - w) : i + w + 1]) for i in range(n)]
    lower = [min(q[max(0, i - w) : i + w + 1]) for i in range(n)]
    return np.array(upper), np.array(lower)
