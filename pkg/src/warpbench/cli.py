"""Command-line interface: ``warpbench <command> [flags]``.

Exit codes: 0 success, 1 runtime or I/O failure, 2 usage or validation error.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import bench
from .bench import AlgoSpec
from .cluster import default_labels, distance_matrix, single_linkage, adversarial_experiment, to_newick
from .core import as_series, cdtw, check_band, euclidean_sq, full_dtw
from .datagen import (
    DEFAULT_SEED,
    Dataset,
    adversarial_pair,
    adversarial_third,
    derive_seeds,
    fall_pair,
    load_ucr,
    random_walk,
    walk_dataset,
    write_ucr,
)
from .errors import WarpError
from .fastdtw import check_radius, fastdtw
from .nn import nn_search

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2
OUT_DIR_ENV = "WARPBENCH_OUT_DIR"

ALGO_NAMES = {"cdtw": "cdtw", "fastdtw": "fastdtw", "full": "full_dtw", "euclid": "euclidean"}


class UsageError(Exception):
    """Bad flags or inputs; reported with exit code 2."""


@dataclass
class CliConfig:
    command: str
    flags: Dict[str, object] = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    scale: str = "desk"

    def __getattr__(self, name):
        try:
            return self.__dict__["flags"][name]
        except KeyError:
            raise AttributeError(name) from None


# ---------------------------------------------------------------------------
# argument parsing and validation
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="warpbench", description="DTW distances, FastDTW and cDTW benchmarks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("dist", help="distance between two series")
    d.add_argument("inputs", nargs="*", help="UCR file(s) or inline comma-separated values")
    d.add_argument("--algo", choices=sorted(ALGO_NAMES), default="cdtw")
    d.add_argument("--w", type=float, help="band fraction for cdtw, in [0, 1]")
    d.add_argument("--r", type=int, help="radius for fastdtw")
    d.add_argument("--path", action="store_true", help="also print the warping path")
    d.add_argument("--n", type=int, default=128, help="length of generated walks when no inputs are given")
    d.add_argument("--seed", type=int, default=DEFAULT_SEED)

    b = sub.add_parser("bench", help="run a benchmark case")
    b.add_argument("--case", choices=["a", "b", "c", "d", "micro"], required=True)
    b.add_argument("--scale", choices=sorted(bench.SCALES), default="desk")
    b.add_argument("--out", help=f"CSV path (default: ${OUT_DIR_ENV}/case_<id>.csv if set)")
    b.add_argument("--seed", type=int, default=DEFAULT_SEED)
    b.add_argument("--reps", type=int, help="override repetitions for cases b, d and micro")
    b.add_argument("--k", type=int, help="override the number of series for cases a and c")
    b.add_argument("--warmup", type=int, default=10)
    b.add_argument("--in", dest="infile", help="UCR dataset for case a instead of random walks")

    g = sub.add_parser("gen", help="generate a UCR-format dataset")
    g.add_argument("--kind", choices=["walk", "fallpair", "adversarial"], required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--L", type=float, help="fall-pair duration in seconds")
    g.add_argument("--rate", type=float, default=100.0, help="fall-pair sampling rate in Hz")
    g.add_argument("--count", type=int, default=1, help="number of walks")
    g.add_argument("--seed", type=int, default=DEFAULT_SEED)
    g.add_argument("--out", required=True)

    c = sub.add_parser("cluster", help="single-linkage clustering of a dataset")
    c.add_argument("--in", dest="infile", required=True)
    c.add_argument("--algo", choices=sorted(ALGO_NAMES), default="full")
    c.add_argument("--w", type=float)
    c.add_argument("--r", type=int)
    c.add_argument("--newick", help="write the dendrogram in newick form to this path")

    n = sub.add_parser("nn", help="1-NN search of one series against a dataset")
    n.add_argument("--in", dest="infile", required=True, help="candidate dataset")
    n.add_argument("--query", required=True, help="UCR file whose first series is the query")
    n.add_argument("--w", type=float, required=True)
    n.add_argument("--lb", action="store_true", help="prune with LB_Keogh")
    n.add_argument("--ea", action="store_true", help="early-abandon the DP")
    n.add_argument("--znorm", action="store_true")

    a = sub.add_parser("adversarial", help="FastDTW failure demo on the adversarial triple")
    a.add_argument("--n", type=int, default=1024)
    a.add_argument("--r", type=int, default=20)
    a.add_argument("--seed", type=int, default=DEFAULT_SEED)

    pl = sub.add_parser("plot", help="render a benchmark CSV as SVG")
    pl.add_argument("--in", dest="infile", required=True)
    pl.add_argument("--out", required=True)
    return p


def _check_algo_flags(ns) -> None:
    if ns.algo == "cdtw":
        if ns.w is None:
            raise UsageError("--algo cdtw needs --w")
        if ns.r is not None:
            raise UsageError("--r only applies to --algo fastdtw")
        try:
            check_band(ns.w)
        except WarpError as exc:
            raise UsageError(str(exc)) from None
    elif ns.algo == "fastdtw":
        if ns.w is not None:
            raise UsageError("--w only applies to --algo cdtw")
        if ns.r is None:
            raise UsageError("--algo fastdtw needs --r")
        if ns.r < 0:
            raise UsageError(f"radius must be a non-negative integer, got {ns.r}")
    elif ns.w is not None or ns.r is not None:
        raise UsageError(f"--w/--r do not apply to --algo {ns.algo}")


def parse_config(argv: Optional[Sequence[str]] = None) -> CliConfig:
    """Parse and validate flags; nothing is computed or written here."""
    ns = build_parser().parse_args(argv)
    cmd = ns.command
    if cmd in ("dist", "cluster"):
        _check_algo_flags(ns)
        if cmd == "dist" and len(ns.inputs) > 2:
            raise UsageError("dist takes at most two inputs")
        if cmd == "dist" and ns.n < 1:
            raise UsageError("--n must be >= 1")
    elif cmd == "bench":
        if ns.reps is not None and ns.reps < 1:
            raise UsageError("--reps must be >= 1")
        if ns.k is not None and ns.k < 2:
            raise UsageError("--k must be >= 2")
        if ns.warmup < 0:
            raise UsageError("--warmup must be >= 0")
        if ns.infile and ns.case != "a":
            raise UsageError("--in only applies to --case a")
        if ns.case == "micro" and ns.reps is not None and ns.reps < 1000:
            raise UsageError("the microbenchmark needs --reps >= 1000")
    elif cmd == "gen":
        if ns.kind in ("walk", "adversarial") and ns.L is not None:
            raise UsageError(f"--L does not apply to --kind {ns.kind}")
        if ns.kind == "walk":
            if ns.n is None:
                raise UsageError("--kind walk needs --n")
            if ns.n < 1 or ns.count < 1:
                raise UsageError("--n and --count must be >= 1")
        elif ns.kind == "fallpair":
            if ns.L is None:
                raise UsageError("--kind fallpair needs --L")
            if ns.n is not None:
                raise UsageError("--kind fallpair takes --L, not --n")
        elif ns.n is None:
            ns.n = 1024
    elif cmd == "nn":
        try:
            check_band(ns.w)
        except WarpError as exc:
            raise UsageError(str(exc)) from None
    elif cmd == "adversarial":
        if ns.r < 0:
            raise UsageError("--r must be >= 0")
    flags = {k: v for k, v in vars(ns).items() if k not in ("command", "seed", "scale")}
    return CliConfig(cmd, flags, getattr(ns, "seed", DEFAULT_SEED), getattr(ns, "scale", "desk"))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _read_series(spec: str) -> List[np.ndarray]:
    if os.path.exists(spec):
        return load_ucr(spec).series
    try:
        return [np.array([float(v) for v in spec.split(",")])]
    except ValueError:
        raise UsageError(f"{spec!r} is neither a file nor a comma-separated list of numbers") from None


def _resolve_pair(cfg: CliConfig):
    if not cfg.inputs:
        sx, sy = derive_seeds(cfg.seed, 2)
        return random_walk(cfg.n, sx), random_walk(cfg.n, sy)
    if len(cfg.inputs) == 1:
        series = _read_series(cfg.inputs[0])
        if len(series) < 2:
            raise UsageError("a single input file must hold at least two series")
        return series[0], series[1]
    return _read_series(cfg.inputs[0])[0], _read_series(cfg.inputs[1])[0]


def _algo_spec(cfg: CliConfig) -> AlgoSpec:
    kind = ALGO_NAMES[cfg.algo]
    if kind == "cdtw":
        return AlgoSpec(kind, float(cfg.w))
    if kind == "fastdtw":
        return AlgoSpec(kind, check_radius(cfg.r))
    return AlgoSpec(kind)


def cmd_dist(cfg: CliConfig, out) -> int:
    x, y = _resolve_pair(cfg)
    x, y = as_series(x, "x"), as_series(y, "y")
    path = None
    if cfg.algo == "cdtw":
        res = cdtw(x, y, cfg.w, cfg.path)
        cost, path = res.cost, res.path
    elif cfg.algo == "fastdtw":
        res = fastdtw(x, y, cfg.r, cfg.path)
        cost, path = res.cost, res.path
    elif cfg.algo == "full":
        res = full_dtw(x, y, cfg.path)
        cost, path = res.cost, res.path
    else:
        cost = euclidean_sq(x, y)
        if cfg.path:
            path = np.column_stack([np.arange(len(x)), np.arange(len(x))])
    print(f"{cost:.6f}", file=out)
    if path is not None:
        print(" ".join(f"({i},{j})" for i, j in path), file=out)
    return EXIT_OK


def _bench_out_path(cfg: CliConfig) -> Optional[Path]:
    if cfg.out:
        return Path(cfg.out)
    env = os.environ.get(OUT_DIR_ENV)
    if env:
        return Path(env) / f"case_{cfg.case}.csv"
    return None


def cmd_bench(cfg: CliConfig, out) -> int:
    scale = bench.SCALES[cfg.scale]
    warmup = cfg.warmup
    if cfg.case == "a":
        dataset = load_ucr(cfg.infile) if cfg.infile else None
        report = bench.run_case_a(dataset, k=cfg.k or scale["a_k"], seed=cfg.seed, warmup=warmup)
    elif cfg.case == "b":
        report = bench.run_case_b(reps=cfg.reps or scale["b_reps"], warmup=warmup, seed=cfg.seed)
    elif cfg.case == "c":
        report = bench.run_case_c(k=cfg.k or scale["c_k"], seed=cfg.seed, warmup=warmup)
    elif cfg.case == "d":
        report = bench.run_case_d(reps=cfg.reps or scale["d_reps"], warmup=warmup, seed=cfg.seed)
    else:
        report = bench.run_micro_128(reps=cfg.reps or scale["micro_reps"], warmup=warmup, seed=cfg.seed)
    path = _bench_out_path(cfg)
    if path is not None:
        bench.write_report_csv(report, path)
    print(bench.format_summary(report), file=out)
    if path is not None:
        print(f"wrote {path}", file=out)
    return EXIT_OK


def cmd_gen(cfg: CliConfig, out) -> int:
    if cfg.kind == "walk":
        series = walk_dataset(cfg.count, cfg.n, cfg.seed)
    elif cfg.kind == "fallpair":
        series = list(fall_pair(cfg.L, cfg.rate, cfg.seed))
    else:
        series = [*adversarial_pair(cfg.n), adversarial_third(cfg.n, cfg.seed)]
    write_ucr(Dataset.from_series(series), cfg.out)
    print(f"wrote {len(series)} series of length {len(series[0])} to {cfg.out}", file=out)
    return EXIT_OK


def cmd_cluster(cfg: CliConfig, out) -> int:
    data = load_ucr(cfg.infile)
    if len(data) < 2:
        raise UsageError("clustering needs at least two series")
    algo = _algo_spec(cfg)
    if algo.kind in ("cdtw", "euclidean") and data.uniform_length is None:
        raise UsageError(f"{cfg.algo} needs series of equal length")
    dm = distance_matrix(data.series, algo, default_labels(len(data)))
    tree = single_linkage(dm)
    text = to_newick(tree)
    print(f"algorithm: {algo.label}", file=out)
    print(tree.to_text(), file=out)
    print(text, file=out)
    if cfg.newick:
        Path(cfg.newick).write_text(text + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_nn(cfg: CliConfig, out) -> int:
    cands = load_ucr(cfg.infile).series
    query = load_ucr(cfg.query).series[0]
    res = nn_search(query, cands, cfg.w, use_lb=cfg.lb, use_ea=cfg.ea, use_znorm=cfg.znorm)
    print(f"index={res.index} cost={res.cost:.6f} cells={res.cells} pruned={res.pruned}", file=out)
    return EXIT_OK


def cmd_adversarial(cfg: CliConfig, out) -> int:
    print(adversarial_experiment(cfg.n, radius=cfg.r, seed=cfg.seed).summary(), file=out)
    return EXIT_OK


def cmd_plot(cfg: CliConfig, out) -> int:
    try:
        rows = bench.read_report_csv(cfg.infile)
    except ValueError as exc:
        raise UsageError(f"{cfg.infile}: {exc}") from None
    if not rows:
        raise UsageError(f"{cfg.infile}: no data rows")
    Path(cfg.out).write_text(render_svg(rows), encoding="utf-8")
    print(f"wrote {cfg.out}", file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

_COLORS = {"cdtw": "#1f77b4", "fastdtw": "#d62728", "full_dtw": "#2ca02c", "euclidean": "#7f7f7f"}
_W, _H, _ML, _MR, _MT, _MB = 640, 400, 80, 130, 40, 50


def _x_value(rec, by_n: bool) -> float:
    if by_n:
        return float(rec["n"])
    if rec["algo_kind"] == "cdtw":
        return 100.0 * rec["param"]
    return rec["param"]


def render_svg(rows: List[dict]) -> str:
    """Time (log scale) against the sweep parameter, one polyline per algorithm kind.

    When the rows span several series lengths the x axis is N instead.
    """
    by_n = len({r["n"] for r in rows}) > 1
    families: Dict[str, List] = {}
    for r in rows:
        families.setdefault(r["algo_kind"], []).append((_x_value(r, by_n), r["mean_ns"]))
    xs = [x for pts in families.values() for x, _ in pts]
    ys = [max(y, 1.0) for pts in families.values() for _, y in pts]
    x0, x1 = min(xs), max(xs)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    ly0 = math.floor(math.log10(min(ys)))
    ly1 = math.ceil(math.log10(max(ys)))
    if ly1 == ly0:
        ly1 += 1
    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def px(x):
        return _ML + (x - x0) / (x1 - x0) * pw

    def py(y):
        return _MT + ph - (math.log10(max(y, 1.0)) - ly0) / (ly1 - ly0) * ph

    case_ids = sorted({r["case_id"] for r in rows})
    ns = sorted({r["n"] for r in rows})
    comps = sorted({r["comparisons"] for r in rows})
    title = (
        f"case {','.join(case_ids)}  n={','.join(map(str, ns))}"
        f"  comparisons={','.join(map(str, comps))}"
    )
    xlabel = "series length N" if by_n else "parameter (cDTW band %, FastDTW radius)"
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="22" text-anchor="middle" font-family="sans-serif" font-size="14">{title}</text>',
        f'<line x1="{_ML}" y1="{_MT + ph}" x2="{_ML + pw}" y2="{_MT + ph}" stroke="black"/>',
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_MT + ph}" stroke="black"/>',
        f'<text x="{_ML + pw / 2:.1f}" y="{_H - 12}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="12">{xlabel}</text>',
        f'<text x="18" y="{_MT + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 18 {_MT + ph / 2:.1f})">mean time (ns, log scale)</text>',
    ]
    for e in range(ly0, ly1 + 1):
        y = py(10.0**e)
        out.append(f'<line x1="{_ML - 4}" y1="{y:.2f}" x2="{_ML}" y2="{y:.2f}" stroke="black"/>')
        out.append(
            f'<text x="{_ML - 6}" y="{y + 4:.2f}" text-anchor="end" font-family="sans-serif" '
            f'font-size="11">1e{e}</text>'
        )
    for t in range(5):
        xv = x0 + (x1 - x0) * t / 4
        x = px(xv)
        out.append(f'<line x1="{x:.2f}" y1="{_MT + ph}" x2="{x:.2f}" y2="{_MT + ph + 4}" stroke="black"/>')
        out.append(
            f'<text x="{x:.2f}" y="{_MT + ph + 17}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="11">{xv:g}</text>'
        )
    for idx, kind in enumerate(sorted(families)):
        pts = sorted(families[kind])
        color = _COLORS.get(kind, "black")
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        ly = _MT + 16 * idx + 8
        out.append(f'<line x1="{_W - _MR + 10}" y1="{ly}" x2="{_W - _MR + 30}" y2="{ly}" stroke="{color}"/>')
        out.append(
            f'<text x="{_W - _MR + 34}" y="{ly + 4}" font-family="sans-serif" font-size="11">{kind}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

COMMANDS = {
    "dist": cmd_dist,
    "bench": cmd_bench,
    "gen": cmd_gen,
    "cluster": cmd_cluster,
    "nn": cmd_nn,
    "adversarial": cmd_adversarial,
    "plot": cmd_plot,
}


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        cfg = parse_config(argv)
        return COMMANDS[cfg.command](cfg, out)
    except UsageError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except (WarpError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_RUNTIME
    except Exception as exc:  # anything else is a runtime failure, not a usage error
        print(f"error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
