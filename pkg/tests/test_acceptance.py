"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the lines are printed even
without ``-s``. Timing criteria compare orderings and ratios only.
"""
import io
import itertools
import re
import time

import numpy as np
import pytest

from oracles import brute_force_cost
from warpbench.bench import (
    SCALES,
    extrapolation_line,
    read_report_csv,
    run_case_a,
    run_case_b,
    run_case_c,
    run_case_d,
    write_report_csv,
)
from warpbench.cli import main
from warpbench.cluster import adversarial_experiment
from warpbench.core import cdtw, euclidean_sq, full_dtw
from warpbench.datagen import derive_seeds, random_walk, walk_dataset
from warpbench.fastdtw import approx_error_pct, fastdtw
from warpbench.nn import nn_search

ACCEPT_SEED = 20200301


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail, started):
        with capsys.disabled():
            status = "PASS" if ok else "FAIL"
            print(f"\ncriterion {number:>2} [{title}]: {status} ({detail}; {time.perf_counter() - started:.1f} s)")

    return emit


def _pairs(count, lo, hi, seed, equal=True):
    rng = np.random.default_rng(seed)
    for s in derive_seeds(seed, count):
        n = int(rng.integers(lo, hi + 1))
        m = n if equal else int(rng.integers(lo, hi + 1))
        sx, sy = derive_seeds(s, 2)
        yield random_walk(n, sx), random_walk(m, sy)


def test_criterion_01_exactness_ladder(report):
    t0 = time.perf_counter()
    worst_rel, euclid_bad = 0.0, 0
    for x, y in _pairs(1000, 2, 200, ACCEPT_SEED):
        full = full_dtw(x, y).cost
        rel = abs(cdtw(x, y, 1.0).cost - full) / max(full, 1e-300)
        worst_rel = max(worst_rel, rel)
        euclid_bad += cdtw(x, y, 0.0).cost != euclidean_sq(x, y)
    brute_bad = 0
    rng = np.random.default_rng(ACCEPT_SEED)
    for n, m in itertools.product(range(1, 9), repeat=2):
        x, y = rng.normal(size=n), rng.normal(size=m)
        ref = brute_force_cost(x, y)
        brute_bad += abs(full_dtw(x, y).cost - ref) > 1e-9 * max(ref, 1.0)
    elapsed = time.perf_counter() - t0
    ok = worst_rel <= 1e-9 and euclid_bad == 0 and brute_bad == 0 and elapsed < 60
    report(1, "exactness ladder", ok,
           f"max rel |cdtw100-full|={worst_rel:.1e}, euclid mismatches={euclid_bad}, "
           f"brute-force mismatches={brute_bad}/64", t0)
    assert ok


def test_criterion_02_fastdtw_bound(report):
    t0 = time.perf_counter()
    below, not_equal, saturated, trials = 0, 0, 0, 0
    for x, y in _pairs(1000, 4, 512, ACCEPT_SEED + 1, equal=False):
        exact = full_dtw(x, y).cost
        for r in (0, 1, 10, 40):
            approx = fastdtw(x, y, r).cost
            trials += 1
            below += approx < exact
            if r >= min(len(x), len(y)) - 2:
                saturated += 1
                not_equal += approx != exact
    elapsed = time.perf_counter() - t0
    ok = below == 0 and not_equal == 0 and elapsed < 120
    report(2, "FastDTW bound and saturation", ok,
           f"{trials} trials, below exact={below}, saturated={saturated} with {not_equal} unequal", t0)
    assert ok


def test_criterion_03_band_monotonicity(report):
    t0 = time.perf_counter()
    violations = 0
    for x, y in _pairs(100, 450, 450, ACCEPT_SEED + 2):
        costs = [cdtw(x, y, p / 100).cost for p in range(21)]
        violations += sum(b > a for a, b in zip(costs, costs[1:]))
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and elapsed < 60
    report(3, "band monotonicity", ok, f"100 pairs x 21 bands, violations={violations}", t0)
    assert ok


def test_criterion_04_nn_equivalence(report):
    t0 = time.perf_counter()
    s_cand, s_query = derive_seeds(ACCEPT_SEED + 3, 2)
    cands = walk_dataset(200, 128, s_cand)
    queries = walk_dataset(20, 128, s_query)
    mismatches, not_cheaper, naive_cells, fast_cells = 0, 0, 0, 0
    for q in queries:
        for use_znorm in (False, True):
            base = nn_search(q, cands, 0.05, use_znorm=use_znorm)
            for lb, ea in itertools.product((False, True), repeat=2):
                res = nn_search(q, cands, 0.05, use_lb=lb, use_ea=ea, use_znorm=use_znorm)
                mismatches += (res.index, res.cost) != (base.index, base.cost)
                if lb and ea:
                    not_cheaper += res.cells >= base.cells
                    if not use_znorm:
                        naive_cells += base.cells
                        fast_cells += res.cells
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and not_cheaper == 0 and elapsed < 120
    report(4, "NN-search oracle equivalence", ok,
           f"mismatches={mismatches}, queries not cheaper={not_cheaper}, "
           f"cells naive={naive_cells} vs LB+EA={fast_cells}", t0)
    assert ok


def test_criterion_05_case_a_ordering(report):
    t0 = time.perf_counter()
    rep = run_case_a(k=SCALES["desk"]["a_k"], n=945, seed=ACCEPT_SEED)
    c20 = rep.row("cdtw", 0.20).stats.mean_ns
    f10 = rep.row("fastdtw", 10).stats.mean_ns
    c4 = rep.row("cdtw", 0.04).stats.mean_ns
    f0 = rep.row("fastdtw", 0).stats.mean_ns
    elapsed = time.perf_counter() - t0
    ok = c20 <= 1.25 * f10 and c4 < f0 and len(rep.rows) == 42 and elapsed < 600
    report(5, "Case A ordering", ok,
           f"4950 pairs: cDTW_20={c20 / 1e9:.3f} s vs 1.25 x FastDTW_10={1.25 * f10 / 1e9:.3f} s; "
           f"cDTW_4={c4 / 1e9:.3f} s vs FastDTW_0={f0 / 1e9:.3f} s", t0)
    assert ok


def test_criterion_06_case_b_ordering(report):
    t0 = time.perf_counter()
    rep = run_case_b(n=24000, reps=100, seed=ACCEPT_SEED)
    c = rep.row("cdtw", 0.0083).stats.mean_ns
    f10 = rep.row("fastdtw", 10).stats.mean_ns
    f40 = rep.row("fastdtw", 40).stats.mean_ns
    elapsed = time.perf_counter() - t0
    ok = c < f10 < f40 and f10 / c >= 2 and elapsed < 300
    report(6, "Case B ordering", ok,
           f"cDTW_0.83={c / 1e6:.2f} ms, FastDTW_10={f10 / 1e6:.2f} ms, FastDTW_40={f40 / 1e6:.2f} ms, "
           f"ratio FastDTW_10/cDTW={f10 / c:.2f} (need >= 2)", t0)
    assert ok


def test_criterion_07_case_c_ordering(report):
    t0 = time.perf_counter()
    rep = run_case_c(k=SCALES["desk"]["c_k"], n=450, seed=ACCEPT_SEED)
    losses = []
    for p in range(41):
        c = rep.row("cdtw", p / 100).stats.mean_ns
        f = rep.row("fastdtw", p).stats.mean_ns
        if c > f:
            losses.append(p)
    elapsed = time.perf_counter() - t0
    ok = not losses and elapsed < 600
    worst = max(range(41), key=lambda p: rep.row("cdtw", p / 100).stats.mean_ns / rep.row("fastdtw", p).stats.mean_ns)
    ratio = rep.row("cdtw", worst / 100).stats.mean_ns / rep.row("fastdtw", worst).stats.mean_ns
    report(7, "Case C ordering", ok,
           f"params where cDTW slower={losses or 'none'}, worst cDTW/FastDTW ratio={ratio:.2f} at {worst}", t0)
    assert ok


def test_criterion_08_case_d_crossover(report):
    t0 = time.perf_counter()
    rep = run_case_d(reps=SCALES["desk"]["d_reps"], seed=ACCEPT_SEED)
    ns = [p.n for p in rep.sweep]
    first, last = rep.sweep[0], rep.sweep[-1]
    elapsed = time.perf_counter() - t0
    ok = (
        ns == [100, 200, 400, 800, 1600, 3200, 5000]
        and first.cdtw100_mean_ns < first.fastdtw40_mean_ns
        and last.fastdtw40_mean_ns < last.cdtw100_mean_ns
        and rep.crossover_n is not None
        and 100 < rep.crossover_n <= 5000
        and elapsed < 300
    )
    report(8, "Case D crossover", ok,
           f"crossover_N={rep.crossover_n}; N=100 cDTW {first.cdtw100_mean_ns / 1e3:.1f} us vs FastDTW_40 "
           f"{first.fastdtw40_mean_ns / 1e3:.1f} us; N=5000 cDTW {last.cdtw100_mean_ns / 1e6:.2f} ms vs "
           f"FastDTW_40 {last.fastdtw40_mean_ns / 1e6:.2f} ms", t0)
    assert ok


def test_criterion_09_adversarial_failure(report):
    t0 = time.perf_counter()
    res = adversarial_experiment(n=1024, radius=20, seed=ACCEPT_SEED)
    ex, ap = res.exact.values, res.approx.values
    third = max(abs(ap[i, 2] - ex[i, 2]) / ex[i, 2] for i in (0, 1))
    elapsed = time.perf_counter() - t0
    ok = (
        res.error_pct >= 1000
        and third <= 0.05
        and res.exact_tree.first_merge_labels() == ("A", "B")
        and elapsed < 60
    )
    report(9, "adversarial failure", ok,
           f"error={res.error_pct:,.0f}%, third-series drift={100 * third:.2f}%, "
           f"full-DTW first merge={res.exact_tree.first_merge_labels()}", t0)
    assert ok


def test_criterion_10_error_arithmetic(report):
    t0 = time.perf_counter()
    err = approx_error_pct(31.24, 0.020)
    line = extrapolation_line(0.1845e6)
    years = float(re.search(r"= ([0-9.]+) years", line).group(1))
    elapsed = time.perf_counter() - t0
    ok = err == 156100.0 and abs(years - 5.8) <= 0.1 and elapsed < 1
    report(10, "error-metric arithmetic", ok, f"error={err:,.1f}%, extrapolation '{line}'", t0)
    assert ok


def _cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    assert code == 0, err.getvalue()
    return out.getvalue()


NON_TIMING = ("case_id", "algo_kind", "param", "n", "comparisons", "reps")


def test_criterion_11_determinism(report, tmp_path):
    t0 = time.perf_counter()
    failures = []

    def same_bytes(name, a, b):
        if a.read_bytes() != b.read_bytes():
            failures.append(name)

    for run in (1, 2):
        d = tmp_path / f"run{run}"
        d.mkdir()
        _cli("gen", "--kind", "walk", "--n", "450", "--count", "10", "--seed", "7", "--out", str(d / "walk.tsv"))
        _cli("gen", "--kind", "fallpair", "--L", "4", "--seed", "7", "--out", str(d / "fall.tsv"))
        _cli("gen", "--kind", "adversarial", "--seed", "7", "--out", str(d / "adv.tsv"))
        _cli("cluster", "--in", str(d / "adv.tsv"), "--algo", "full", "--newick", str(d / "full.nwk"))
        _cli("cluster", "--in", str(d / "adv.tsv"), "--algo", "fastdtw", "--r", "20", "--newick", str(d / "fast.nwk"))
        _cli("bench", "--case", "a", "--k", "6", "--warmup", "1", "--seed", "7", "--out", str(d / "a.csv"))
        _cli("bench", "--case", "d", "--reps", "3", "--warmup", "1", "--seed", "7", "--out", str(d / "d.csv"))

    r1, r2 = tmp_path / "run1", tmp_path / "run2"
    for name in ("walk.tsv", "fall.tsv", "adv.tsv", "full.nwk", "fast.nwk"):
        same_bytes(name, r1 / name, r2 / name)

    # Timing CSVs carry clock readings, which differ between runs; the workload
    # columns must agree exactly, and rendering one report is byte-stable.
    for name in ("a.csv", "d.csv"):
        rows1, rows2 = read_report_csv(r1 / name), read_report_csv(r2 / name)
        if [[r[k] for k in NON_TIMING] for r in rows1] != [[r[k] for k in NON_TIMING] for r in rows2]:
            failures.append(f"{name} workload columns")
        _cli("plot", "--in", str(r1 / name), "--out", str(tmp_path / f"{name}.1.svg"))
        _cli("plot", "--in", str(r1 / name), "--out", str(tmp_path / f"{name}.2.svg"))
        same_bytes(f"{name} svg", tmp_path / f"{name}.1.svg", tmp_path / f"{name}.2.svg")

    rep = run_case_c(k=3, n=40, params=range(3), warmup=0)
    write_report_csv(rep, tmp_path / "c1.csv")
    write_report_csv(rep, tmp_path / "c2.csv")
    same_bytes("csv writer", tmp_path / "c1.csv", tmp_path / "c2.csv")

    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 120
    report(11, "determinism", ok,
           f"generators, newick, SVG and CSV writer byte-identical; CSV workload columns identical; "
           f"failures={failures or 'none'}", t0)
    assert ok
