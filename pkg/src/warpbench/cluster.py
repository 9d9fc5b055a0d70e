"""Pairwise distance matrices, single-linkage clustering and newick text.

Newick grammar used here (heights are merge heights, not branch lengths)::

    tree     := node ";"
    node     := leaf | "(" node "," node "):" height
    leaf     := label            (no whitespace, parentheses, commas, colons or semicolons)
    height   := float literal as written by Python's repr()
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .bench import AlgoSpec
from .core import as_series
from .datagen import DEFAULT_SEED, AdversarialConfig, adversarial_pair, adversarial_third
from .fastdtw import approx_error_pct


@dataclass
class DistanceMatrix:
    values: np.ndarray
    labels: List[str]
    computed_pairs: int = 0

    @property
    def size(self) -> int:
        return len(self.labels)

    def __getitem__(self, key):
        return self.values[key]


def default_labels(k: int) -> List[str]:
    if k <= 26:
        return [chr(ord("A") + i) for i in range(k)]
    return [f"s{i}" for i in range(k)]


def distance_matrix(series: Sequence, algo: AlgoSpec, labels: Optional[Sequence[str]] = None) -> DistanceMatrix:
    """Symmetric matrix of ``algo`` distances; each unordered pair is computed once."""
    k = len(series)
    if k < 2:
        raise ValueError("distance_matrix needs at least two series")
    arrs = [as_series(s, f"series[{i}]") for i, s in enumerate(series)]
    for a in arrs[1:]:
        algo.check_lengths(arrs[0].shape[0], a.shape[0])
    fn = algo.kernel()
    d = np.zeros((k, k))
    pairs = 0
    for i in range(k - 1):
        for j in range(i + 1, k):
            d[i, j] = d[j, i] = fn(arrs[i], arrs[j])
            pairs += 1
    return DistanceMatrix(d, list(labels) if labels is not None else default_labels(k), pairs)


# ---------------------------------------------------------------------------
# dendrograms
# ---------------------------------------------------------------------------


@dataclass
class Dendrogram:
    """Merges use scipy-style ids: leaves are 0..k-1, merge t creates cluster k+t."""

    merges: List[Tuple[int, int, float]]
    labels: List[str]

    def leaves(self, cluster: int) -> List[int]:
        k = len(self.labels)
        if cluster < k:
            return [cluster]
        a, b, _ = self.merges[cluster - k]
        return sorted(self.leaves(a) + self.leaves(b))

    def first_merge_labels(self) -> Tuple[str, ...]:
        a, b, _ = self.merges[0]
        return tuple(sorted(self.labels[i] for i in self.leaves(a) + self.leaves(b)))

    def to_text(self) -> str:
        lines = []
        for t, (a, b, h) in enumerate(self.merges):
            left = ",".join(self.labels[i] for i in self.leaves(a))
            right = ",".join(self.labels[i] for i in self.leaves(b))
            lines.append(f"merge {t + 1}: ({left}) + ({right}) at height {h:.6g}")
        return "\n".join(lines)


def single_linkage(dm: DistanceMatrix) -> Dendrogram:
    """Agglomerative single-linkage clustering.

    Ties between equally close cluster pairs go to the pair whose smallest
    leaf indices are lexicographically smallest.
    """
    d = np.asarray(dm.values, dtype=float)
    k = d.shape[0]
    clusters = {i: [i] for i in range(k)}
    merges = []
    next_id = k
    while len(clusters) > 1:
        best = None
        ids = sorted(clusters, key=lambda c: min(clusters[c]))
        for x in range(len(ids)):
            for y in range(x + 1, len(ids)):
                a, b = ids[x], ids[y]
                dist = min(d[i, j] for i in clusters[a] for j in clusters[b])
                key = (dist, min(clusters[a]), min(clusters[b]))
                if best is None or key < best[0]:
                    best = (key, a, b)
        (dist, _, _), a, b = best
        merges.append((a, b, float(dist)))
        clusters[next_id] = clusters.pop(a) + clusters.pop(b)
        next_id += 1
    return Dendrogram(merges, list(dm.labels))


def to_newick(dend: Dendrogram) -> str:
    k = len(dend.labels)
    for lab in dend.labels:
        if not lab or re.search(r"[\s(),:;]", lab):
            raise ValueError(f"label {lab!r} cannot be written as a newick leaf")

    def node(c: int) -> str:
        if c < k:
            return dend.labels[c]
        a, b, h = dend.merges[c - k]
        return f"({node(a)},{node(b)}):{h!r}"

    root = k + len(dend.merges) - 1 if dend.merges else 0
    return node(root) + ";"


_TOKEN = re.compile(r"\s*([(),;]|:[^(),;:\s]+|[^(),;:\s]+)")


def parse_newick(text: str, labels: Optional[Sequence[str]] = None) -> Dendrogram:
    """Inverse of :func:`to_newick`.

    Leaves are numbered in order of appearance unless ``labels`` gives the
    original leaf order, in which case ``parse_newick(to_newick(d), d.labels) == d``.
    """
    order = list(labels) if labels is not None else None
    tokens = _TOKEN.findall(text.strip())
    pos = 0
    labels: List[str] = []
    merges: List[Tuple[int, int, float]] = []

    def parse() -> Tuple[str, object]:
        nonlocal pos
        tok = tokens[pos]
        if tok == "(":
            pos += 1
            left = parse()
            if tokens[pos] != ",":
                raise ValueError("expected ','")
            pos += 1
            right = parse()
            if tokens[pos] != ")":
                raise ValueError("expected ')'")
            pos += 1
            if not tokens[pos].startswith(":"):
                raise ValueError("internal node without height")
            h = float(tokens[pos][1:])
            pos += 1
            return ("node", (left, right, h))
        pos += 1
        labels.append(tok)
        return ("leaf", len(labels) - 1)

    try:
        tree = parse()
    except IndexError:
        raise ValueError("newick text ends early") from None
    if pos >= len(tokens) or tokens[pos] != ";":
        raise ValueError("newick text must end with ';'")
    if order is not None:
        if sorted(order) != sorted(labels) or len(set(order)) != len(order):
            raise ValueError("labels do not match the newick leaves")
        index = {lab: i for i, lab in enumerate(order)}
        remap = [index[lab] for lab in labels]

        def relabel(t):
            if t[0] == "leaf":
                return ("leaf", remap[t[1]])
            left, right, h = t[1]
            return ("node", (relabel(left), relabel(right), h))

        tree = relabel(tree)
        labels = list(order)
    k = len(labels)

    # Replay merges the way single_linkage orders them: among merges whose
    # children already exist, take the smallest (height, min leaf, min leaf).
    pending = []

    def collect(t):
        if t[0] == "leaf":
            return {t[1]}
        left, right, h = t[1]
        leaves = collect(left) | collect(right)
        pending.append(t)
        return leaves

    collect(tree)
    ids = {}
    minleaf = {}

    def ready(t):
        return all(c[0] == "leaf" or id(c) in ids for c in t[1][:2])

    def cid(t):
        return t[1] if t[0] == "leaf" else ids[id(t)]

    def low(t):
        return t[1] if t[0] == "leaf" else minleaf[id(t)]

    while pending:
        cands = [t for t in pending if ready(t)]
        t = min(cands, key=lambda t: (t[1][2], low(t[1][0]), low(t[1][1])))
        pending.remove(t)
        left, right, h = t[1]
        ids[id(t)] = k + len(merges)
        minleaf[id(t)] = min(low(left), low(right))
        merges.append((cid(left), cid(right), h))
    return Dendrogram(merges, labels)


# ---------------------------------------------------------------------------
# adversarial clustering experiment
# ---------------------------------------------------------------------------


@dataclass
class AdversarialResult:
    series: List[np.ndarray]
    exact: DistanceMatrix
    approx: DistanceMatrix
    exact_tree: Dendrogram
    approx_tree: Dendrogram
    error_pct: float
    radius: int

    def summary(self) -> str:
        lines = []
        for name, dm in (("Full DTW", self.exact), (f"FastDTW_{self.radius}", self.approx)):
            lines.append(name)
            lines.append("     " + "".join(f"{lab:>12}" for lab in dm.labels))
            for i, lab in enumerate(dm.labels):
                lines.append(f"{lab:>5}" + "".join(f"{dm.values[i, j]:>12.6g}" for j in range(dm.size)))
        lines.append(f"error on (A,B): {self.error_pct:,.1f}%")
        lines.append("Full DTW dendrogram:\n" + self.exact_tree.to_text())
        lines.append(f"FastDTW_{self.radius} dendrogram:\n" + self.approx_tree.to_text())
        return "\n".join(lines)


def adversarial_triplet(n: int = 1024, config: Optional[AdversarialConfig] = None, seed: int = DEFAULT_SEED):
    a, b = adversarial_pair(n, config)
    return [a, b, adversarial_third(n, seed)]


def adversarial_experiment(
    n: int = 1024,
    config: Optional[AdversarialConfig] = None,
    radius: int = 20,
    seed: int = DEFAULT_SEED,
) -> AdversarialResult:
    """Cluster the adversarial pair plus a distant third series under full DTW and FastDTW."""
    series = adversarial_triplet(n, config, seed)
    exact = distance_matrix(series, AlgoSpec("full_dtw"))
    approx = distance_matrix(series, AlgoSpec("fastdtw", radius))
    err = approx_error_pct(approx.values[0, 1], exact.values[0, 1])
    return AdversarialResult(series, exact, approx, single_linkage(exact), single_linkage(approx), err, radius)
