"""Wall-clock benchmarks comparing cDTW with FastDTW.

Protocol: every measurement computes distances only (no path recovery),
runs ``warmup`` untimed calls first, reads ``time.perf_counter_ns`` and
feeds each result into a sink so the work cannot be skipped. All-pairs
cases time one pass over the k*(k-1)/2 pairs per sweep point; single-pair
cases average ``reps`` calls. Measurements run sequentially under a
process-wide lock.
"""
from __future__ import annotations

import csv
import platform
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .core import _band_cost, _euclid_cost, _full_cost, as_series, band_cells, check_band
from .datagen import DEFAULT_SEED, Dataset, derive_seeds, fall_pair, random_walk, walk_dataset
from .errors import UnequalLengths
from .fastdtw import _fastdtw, check_radius

ALGO_KINDS = ("cdtw", "euclidean", "fastdtw", "full_dtw")
CSV_HEADER = ["case_id", "algo_kind", "param", "n", "comparisons", "reps", "mean_ns", "std_ns", "min_ns"]
SECONDS_PER_YEAR = 365.25 * 24 * 3600

BENCH_LOCK = threading.RLock()
_sink = 0.0


@dataclass(frozen=True)
class AlgoSpec:
    """``kind`` plus its parameter: band fraction for cdtw, radius for fastdtw."""

    kind: str
    param: float = 0

    def __post_init__(self):
        if self.kind not in ALGO_KINDS:
            raise ValueError(f"unknown algorithm kind {self.kind!r}")
        if self.kind == "cdtw":
            check_band(self.param)
        elif self.kind == "fastdtw":
            check_radius(self.param)

    @property
    def label(self) -> str:
        if self.kind == "cdtw":
            return f"cDTW_{100 * self.param:g}"
        if self.kind == "fastdtw":
            return f"FastDTW_{int(self.param)}"
        return self.kind

    def kernel(self) -> Callable[[np.ndarray, np.ndarray], float]:
        """Cost-only distance on pre-validated float64 arrays."""
        if self.kind == "cdtw":
            frac = float(self.param)
            if frac >= 1.0:
                return _full_cost
            return lambda x, y: _band_cost(x, y, band_cells(frac, x.shape[0]))
        if self.kind == "fastdtw":
            r = int(self.param)
            return lambda x, y: _fastdtw(x, y, r, False).cost
        if self.kind == "full_dtw":
            return _full_cost
        return _euclid_cost

    def needs_equal_lengths(self) -> bool:
        return self.kind == "euclidean" or (self.kind == "cdtw" and float(self.param) < 1.0)

    def check_lengths(self, n: int, m: int) -> None:
        if n != m and self.needs_equal_lengths():
            raise UnequalLengths(f"{self.label} needs equal lengths, got {n} and {m}")

    def distance(self, x, y) -> float:
        x, y = as_series(x, "x"), as_series(y, "y")
        self.check_lengths(x.shape[0], y.shape[0])
        return float(self.kernel()(x, y))


@dataclass(frozen=True)
class TimingStats:
    reps: int
    warmup_reps: int
    mean_ns: float
    std_ns: float
    min_ns: float


@dataclass(frozen=True)
class ReportRow:
    algo: AlgoSpec
    n: int
    comparisons: int
    stats: TimingStats


@dataclass
class CaseReport:
    case_id: str
    rows: List[ReportRow]
    metadata: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if not self.rows:
            raise ValueError("a case report needs at least one row")

    def row(self, kind: str, param) -> ReportRow:
        for r in self.rows:
            if r.algo.kind == kind and r.algo.param == param:
                return r
        raise KeyError((kind, param))

    def family(self, kind: str) -> List[ReportRow]:
        return sorted((r for r in self.rows if r.algo.kind == kind), key=lambda r: (r.algo.param, r.n))


@dataclass(frozen=True)
class CrossoverPoint:
    L_seconds: float
    n: int
    cdtw100_mean_ns: float
    fastdtw40_mean_ns: float


@dataclass
class CrossoverReport:
    sweep: List[CrossoverPoint]
    crossover_L: Optional[float]
    rows: List[ReportRow] = field(default_factory=list)
    metadata: Dict[str, object] = field(default_factory=dict)
    case_id: str = "D"

    @property
    def crossover_n(self) -> Optional[int]:
        for p in self.sweep:
            if p.L_seconds == self.crossover_L:
                return p.n
        return None


def _hardware_note() -> str:
    return f"{platform.machine()} {platform.processor() or 'unknown-cpu'} python {platform.python_version()}"


# ---------------------------------------------------------------------------
# timing primitives
# ---------------------------------------------------------------------------


def time_distance(algo: AlgoSpec, x, y, reps: int = 1000, warmup: int = 10) -> TimingStats:
    """Mean/std/min wall time of one cost-only distance computation."""
    global _sink
    if reps < 1:
        raise ValueError("reps must be >= 1")
    x = as_series(x, "x")
    y = as_series(y, "y")
    algo.check_lengths(x.shape[0], y.shape[0])
    fn = algo.kernel()
    acc = 0.0
    for _ in range(warmup):
        acc += fn(x, y)
    samples = np.empty(reps)
    clock = time.perf_counter_ns
    for k in range(reps):
        t0 = clock()
        acc += fn(x, y)
        samples[k] = clock() - t0
    _sink += acc
    return TimingStats(reps, warmup, float(samples.mean()), float(samples.std()), float(samples.min()))


def time_all_pairs(algo: AlgoSpec, series: Sequence[np.ndarray], warmup: int = 10) -> TimingStats:
    """Total wall time of one pass over every unordered pair of ``series``."""
    global _sink
    fn = algo.kernel()
    k = len(series)
    acc = 0.0
    for _ in range(warmup):
        acc += fn(series[0], series[1])
    clock = time.perf_counter_ns
    t0 = clock()
    for i in range(k - 1):
        xi = series[i]
        for j in range(i + 1, k):
            acc += fn(xi, series[j])
    total = float(clock() - t0)
    _sink += acc
    return TimingStats(1, warmup, total, 0.0, total)


def pair_count(k: int) -> int:
    return k * (k - 1) // 2


# ---------------------------------------------------------------------------
# the four cases
# ---------------------------------------------------------------------------

SCALES = {
    "desk": {"a_k": 100, "c_k": 50, "b_reps": 100, "d_reps": 100, "micro_reps": 1000},
    "full": {"a_k": 896, "c_k": 1000, "b_reps": 1000, "d_reps": 1000, "micro_reps": 1_000_000},
}

# L in seconds at 100 Hz, i.e. N from 100 to 5000
DEFAULT_L_SWEEP = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 50.0)


def _all_pairs_case(case_id, series, cdtw_params, fastdtw_params, warmup, metadata) -> CaseReport:
    n = len(series[0])
    if any(len(s) != n for s in series):
        raise ValueError("all-pairs cases need series of uniform length")
    if len(series) < 2:
        raise ValueError("need at least two series")
    comps = pair_count(len(series))
    rows = []
    with BENCH_LOCK:
        for frac in cdtw_params:
            algo = AlgoSpec("cdtw", frac)
            rows.append(ReportRow(algo, n, comps, time_all_pairs(algo, series, warmup)))
        for r in fastdtw_params:
            algo = AlgoSpec("fastdtw", r)
            rows.append(ReportRow(algo, n, comps, time_all_pairs(algo, series, warmup)))
    return CaseReport(case_id, rows, metadata)


def run_case_a(
    dataset: Optional[Dataset] = None,
    k: int = 100,
    n: int = 945,
    seed: int = DEFAULT_SEED,
    params: Sequence[int] = range(21),
    warmup: int = 10,
) -> CaseReport:
    """Short N, narrow W: all-pairs time for cDTW w = 0..20% and FastDTW r = 0..20.

    Without a dataset, ``k`` seeded random walks of length ``n`` stand in
    for the gesture data (the timing does not depend on the values).
    """
    if dataset is not None:
        if dataset.uniform_length is None:
            raise ValueError("case A needs a dataset of uniform length")
        series = [np.ascontiguousarray(s) for s in dataset.series]
        source = "file"
    else:
        series = walk_dataset(k, n, seed)
        source = "random-walk"
    meta = {"seed": seed, "source": source, "W": 0.04, "hardware": _hardware_note()}
    return _all_pairs_case("A", series, [p / 100 for p in params], list(params), warmup, meta)


def run_case_b(n: int = 24000, reps: int = 100, warmup: int = 10, seed: int = DEFAULT_SEED) -> CaseReport:
    """Long N, narrow W: one pair timed under cDTW_0.83, FastDTW_10 and FastDTW_40."""
    sx, sy = derive_seeds(seed, 2)
    x, y = random_walk(n, sx), random_walk(n, sy)
    rows = []
    with BENCH_LOCK:
        for algo in (AlgoSpec("cdtw", 0.0083), AlgoSpec("fastdtw", 10), AlgoSpec("fastdtw", 40)):
            rows.append(ReportRow(algo, n, 1, time_distance(algo, x, y, reps, warmup)))
    meta = {"seed": seed, "W": 0.0016, "band_cells": band_cells(0.0083, n), "hardware": _hardware_note()}
    return CaseReport("B", rows, meta)


def run_case_c(
    k: int = 50,
    n: int = 450,
    seed: int = DEFAULT_SEED,
    params: Sequence[int] = range(41),
    warmup: int = 10,
) -> CaseReport:
    """Short N, wide W: all-pairs time for cDTW w = 0..40% and FastDTW r = 0..40."""
    if k < 2:
        raise ValueError("case C needs k >= 2")
    series = walk_dataset(k, n, seed)
    meta = {"seed": seed, "source": "random-walk", "W": 0.34, "hardware": _hardware_note()}
    return _all_pairs_case("C", series, [p / 100 for p in params], list(params), warmup, meta)


def run_case_d(
    L_values: Sequence[float] = DEFAULT_L_SWEEP,
    rate_hz: float = 100.0,
    reps: int = 100,
    warmup: int = 10,
    seed: int = DEFAULT_SEED,
) -> CrossoverReport:
    """Long N, wide W: time cDTW_100 and FastDTW_40 on fall pairs of growing length."""
    L_values = [float(v) for v in L_values]
    if not L_values:
        raise ValueError("L sweep must not be empty")
    if any(b <= a for a, b in zip(L_values, L_values[1:])):
        raise ValueError("L sweep must be strictly ascending")
    full, fast = AlgoSpec("cdtw", 1.0), AlgoSpec("fastdtw", 40)
    sweep, rows = [], []
    with BENCH_LOCK:
        for L in L_values:
            x, y = fall_pair(L, rate_hz, seed)
            n = len(x)
            s_full = time_distance(full, x, y, reps, warmup)
            s_fast = time_distance(fast, x, y, reps, warmup)
            rows += [ReportRow(full, n, 1, s_full), ReportRow(fast, n, 1, s_fast)]
            sweep.append(CrossoverPoint(L, n, s_full.mean_ns, s_fast.mean_ns))
    crossover = next((p.L_seconds for p in sweep if p.fastdtw40_mean_ns < p.cdtw100_mean_ns), None)
    meta = {"seed": seed, "rate_hz": rate_hz, "W": 1.0, "hardware": _hardware_note()}
    return CrossoverReport(sweep, crossover, rows, meta)


def extrapolate_seconds(mean_ns: float, comparisons: float = 1e12) -> float:
    return mean_ns * 1e-9 * comparisons


def extrapolation_line(mean_ns: float, comparisons: float = 1e12, label: str = "FastDTW_10") -> str:
    secs = extrapolate_seconds(mean_ns, comparisons)
    return (
        f"{label}: {comparisons:.0e} x {mean_ns / 1e6:.4f} ms = {secs:.4g} s"
        f" = {secs / SECONDS_PER_YEAR:.1f} years"
    )


def run_micro_128(reps: int = 1000, warmup: int = 10, seed: int = DEFAULT_SEED, n: int = 128) -> CaseReport:
    """FastDTW_10 vs cDTW_5 at N = 128, plus the cost of 10**12 such comparisons."""
    if reps < 1000:
        raise ValueError("the microbenchmark needs reps >= 1000")
    sx, sy = derive_seeds(seed, 2)
    x, y = random_walk(n, sx), random_walk(n, sy)
    fast, band = AlgoSpec("fastdtw", 10), AlgoSpec("cdtw", 0.05)
    with BENCH_LOCK:
        s_fast = time_distance(fast, x, y, reps, warmup)
        s_band = time_distance(band, x, y, reps, warmup)
    rows = [ReportRow(fast, n, 1, s_fast), ReportRow(band, n, 1, s_band)]
    meta = {
        "seed": seed,
        "hardware": _hardware_note(),
        "extrapolation": extrapolation_line(s_fast.mean_ns),
        "extrapolation_years": extrapolate_seconds(s_fast.mean_ns) / SECONDS_PER_YEAR,
    }
    return CaseReport("micro", rows, meta)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def _fmt_param(algo: AlgoSpec) -> str:
    if algo.kind == "fastdtw":
        return str(int(algo.param))
    return repr(float(algo.param))


def sorted_rows(report) -> List[ReportRow]:
    return sorted(report.rows, key=lambda r: (r.algo.kind, float(r.algo.param), r.n))


def write_report_csv(report, path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in sorted_rows(report):
            s = r.stats
            w.writerow(
                [
                    report.case_id,
                    r.algo.kind,
                    _fmt_param(r.algo),
                    r.n,
                    r.comparisons,
                    s.reps,
                    repr(float(s.mean_ns)),
                    repr(float(s.std_ns)),
                    repr(float(s.min_ns)),
                ]
            )
    return path


def read_report_csv(path) -> List[dict]:
    """Parse a report CSV back into dicts with numeric fields converted."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header: {header}")
        rows = []
        for line in reader:
            if not line:
                continue
            if len(line) != len(CSV_HEADER):
                raise ValueError(f"malformed CSV row: {line}")
            rec = dict(zip(CSV_HEADER, line))
            for key in ("n", "comparisons", "reps"):
                rec[key] = int(rec[key])
            for key in ("param", "mean_ns", "std_ns", "min_ns"):
                rec[key] = float(rec[key])
            if rec["algo_kind"] not in ALGO_KINDS:
                raise ValueError(f"unknown algo_kind {rec['algo_kind']!r}")
            rows.append(rec)
    return rows


def format_summary(report) -> str:
    """Plain-text table of a report, one line per row."""
    lines = [f"case {report.case_id}"]
    lines.append(f"{'algorithm':<14}{'n':>7}{'pairs':>9}{'reps':>8}{'mean':>14}{'min':>14}")
    for r in sorted_rows(report):
        lines.append(
            f"{r.algo.label:<14}{r.n:>7}{r.comparisons:>9}{r.stats.reps:>8}"
            f"{_fmt_ns(r.stats.mean_ns):>14}{_fmt_ns(r.stats.min_ns):>14}"
        )
    if isinstance(report, CrossoverReport):
        n = report.crossover_n
        lines.append(f"crossover_N={n if n is not None else 'none'}")
    extra = getattr(report, "metadata", {}).get("extrapolation")
    if extra:
        lines.append(extra)
    return "\n".join(lines)


def _fmt_ns(ns: float) -> str:
    if ns >= 1e9:
        return f"{ns / 1e9:.3f} s"
    if ns >= 1e6:
        return f"{ns / 1e6:.3f} ms"
    if ns >= 1e3:
        return f"{ns / 1e3:.1f} us"
    return f"{ns:.0f} ns"
