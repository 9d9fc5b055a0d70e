"""Deterministic synthetic data and UCR-format dataset I/O.

Randomness comes from SplitMix64 (Steele, Lea & Flood 2014), whose output
for a given seed is fixed and easy to reproduce in any language. Gaussian
samples use the Box-Muller transform on pairs of 53-bit uniforms.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import as_series
from .errors import EmptyFile, ParseError, TooShort

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
DEFAULT_SEED = 20200301


def splitmix64(seed: int, count: int) -> np.ndarray:
    """First ``count`` outputs of SplitMix64 started from ``seed`` (uint64 array).

    SplitMix64 is a counter-based generator: output k depends only on
    ``seed + (k + 1) * GOLDEN_GAMMA``, which lets numpy evaluate the whole
    stream at once. uint64 arithmetic wraps modulo 2**64 as required.
    """
    seed = int(seed) & MASK64
    with np.errstate(over="ignore"):
        k = np.arange(1, count + 1, dtype=np.uint64)
        z = np.uint64(seed) + k * np.uint64(GOLDEN_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return z


def uniforms(seed: int, count: int) -> np.ndarray:
    """Doubles in [0, 1) from the top 53 bits of each SplitMix64 output."""
    return (splitmix64(seed, count) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def normals(seed: int, count: int) -> np.ndarray:
    """Standard normal samples via Box-Muller; both outputs of each pair are used."""
    pairs = (count + 1) // 2
    u = uniforms(seed, 2 * pairs)
    u1 = 1.0 - u[0::2]  # (0, 1], keeps log finite
    u2 = u[1::2]
    rad = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = rad * np.cos(theta)
    out[1::2] = rad * np.sin(theta)
    return out[:count]


def derive_seeds(seed: int, count: int) -> List[int]:
    """Independent per-item seeds for generating ``count`` series from one seed."""
    return [int(s) for s in splitmix64(seed, count)]


def random_walk(n: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    if n < 1:
        raise TooShort("random walk length must be >= 1")
    out = np.zeros(n)
    if n > 1:
        np.cumsum(normals(seed, n - 1), out=out[1:])
    return out


def walk_dataset(k: int, n: int, seed: int = DEFAULT_SEED) -> List[np.ndarray]:
    return [random_walk(n, s) for s in derive_seeds(seed, k)]


# ---------------------------------------------------------------------------
# fall pairs
# ---------------------------------------------------------------------------

FALL_NOISE_STD = 0.01


def fall_pair(L_seconds: float, rate_hz: float = 100.0, seed: int = DEFAULT_SEED):
    """Two recordings of ``L_seconds``: one falls at once, the other just before the end.

    The fall is a unit-amplitude half-sine lasting ``min(1 s, L/4)``; the
    rest is Gaussian noise with standard deviation 0.01.
    """
    if L_seconds <= 0 or rate_hz <= 0:
        raise TooShort("duration and rate must be positive")
    if L_seconds * rate_hz < 10:
        raise TooShort(f"L * rate must be >= 10 samples, got {L_seconds * rate_hz:g}")
    n = int(math.floor(L_seconds * rate_hz + 0.5))
    dur = max(1, int(math.floor(min(1.0, L_seconds / 4.0) * rate_hz + 0.5)))
    dur = min(dur, n)
    burst = np.sin(np.pi * (np.arange(dur) + 0.5) / dur)
    s1, s2 = derive_seeds(seed, 2)
    early = FALL_NOISE_STD * normals(s1, n)
    late = FALL_NOISE_STD * normals(s2, n)
    early[:dur] += burst
    late[n - dur :] += burst
    return early, late


# ---------------------------------------------------------------------------
# adversarial pair
# ---------------------------------------------------------------------------

MIN_ADVERSARIAL_LENGTH = 256


@dataclass(frozen=True)
class AdversarialConfig:
    """Shape of the spike-plus-bump pair, positions as fractions of ``n``.

    The spike is a zero-mean ``+h, -h`` doublet starting on an even index,
    so every halving step (and any power-of-two PAA) averages it to exactly
    zero. The bump is a wide, low half-sine that survives downsampling.
    In B the spike moves right by ``spike_shift`` and the bump moves left
    by ``bump_shift``.
    """

    spike_height: float = 1.0
    spike_at: float = 0.40
    spike_shift: float = 0.04
    bump_height: float = 0.02
    bump_width: float = 0.375
    bump_at: float = 0.50
    bump_shift: float = 0.04


def _half_sine(n: int, center: float, width: float) -> np.ndarray:
    t = (np.arange(n) + 0.5 - (center - width / 2.0)) / width
    out = np.sin(np.pi * t)
    out[(t <= 0) | (t >= 1)] = 0.0
    return out


def adversarial_pair(n: int = 1024, config: Optional[AdversarialConfig] = None):
    """Series A, B that DTW aligns almost perfectly but FastDTW warps the wrong way."""
    cfg = config or AdversarialConfig()
    if n < MIN_ADVERSARIAL_LENGTH:
        raise TooShort(f"n too short: adversarial pair needs n >= {MIN_ADVERSARIAL_LENGTH}, got {n}")
    width = cfg.bump_width * n
    if width < 32:
        raise TooShort("bump narrower than 32 samples")
    center_a = cfg.bump_at * n
    center_b = center_a - cfg.bump_shift * n
    a = cfg.bump_height * _half_sine(n, center_a, width)
    b = cfg.bump_height * _half_sine(n, center_b, width)
    pa = 2 * int(cfg.spike_at * n / 2)
    pb = 2 * int((cfg.spike_at + cfg.spike_shift) * n / 2)
    if not (0 <= pa and pb + 1 < n):
        raise ValueError("spike positions fall outside the series")
    for series, p in ((a, pa), (b, pb)):
        series[p] += cfg.spike_height
        series[p + 1] -= cfg.spike_height
    return a, b


def adversarial_third(n: int = 1024, seed: int = DEFAULT_SEED, offset: float = 1.0) -> np.ndarray:
    """A series far from both adversarial series: constant offset plus small noise."""
    return offset + 0.001 * normals(seed, n)


# ---------------------------------------------------------------------------
# UCR format
# ---------------------------------------------------------------------------


@dataclass
class Dataset:
    items: List[Tuple[Optional[int], np.ndarray]] = field(default_factory=list)
    uniform_length: Optional[int] = None

    def __post_init__(self):
        if not self.items:
            raise EmptyFile("dataset has no series")
        lengths = {len(s) for _, s in self.items}
        if self.uniform_length is None and len(lengths) == 1:
            self.uniform_length = lengths.pop()
        elif self.uniform_length is not None and lengths != {self.uniform_length}:
            raise ValueError("series lengths disagree with uniform_length")

    @classmethod
    def from_series(cls, series: Sequence, labels=None) -> "Dataset":
        labels = labels if labels is not None else [0] * len(series)
        return cls([(lab, as_series(s)) for lab, s in zip(labels, series)])

    @property
    def series(self) -> List[np.ndarray]:
        return [s for _, s in self.items]

    @property
    def labels(self) -> List[Optional[int]]:
        return [lab for lab, _ in self.items]

    def __len__(self):
        return len(self.items)


_SPLIT = re.compile(r"[\t,]")


def _parse_label(token: str, lineno: int) -> int:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"label {token!r} is not a number", lineno) from None
    if not math.isfinite(value) or value != int(value):
        raise ParseError(f"label {token!r} is not an integer", lineno)
    return int(value)


def load_ucr(path) -> Dataset:
    """Read a label-first, tab- or comma-separated file with one series per line."""
    items = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            tokens = _SPLIT.split(line) if ("\t" in line or "," in line) else line.split()
            tokens = [t.strip() for t in tokens]
            if len(tokens) < 2:
                raise ParseError("expected a label and at least one sample", lineno)
            label = _parse_label(tokens[0], lineno)
            try:
                values = np.array([float(t) for t in tokens[1:]])
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            if not np.isfinite(values).all():
                raise ParseError("non-finite sample", lineno)
            items.append((label, values))
    if not items:
        raise EmptyFile(f"{path}: no records")
    return Dataset(items)


def format_ucr_line(label, series) -> str:
    lab = 0 if label is None else int(label)
    return "\t".join([str(lab)] + [repr(float(v)) for v in series])


def write_ucr(dataset, path) -> Path:
    """Write ``dataset`` (a Dataset or a list of series) in tab-separated UCR form."""
    if not isinstance(dataset, Dataset):
        dataset = Dataset.from_series(dataset)
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for label, series in dataset.items:
            fh.write(format_ucr_line(label, series) + "\n")
    return path
