"""Sampling coefficient trees from the spike-and-slab prior.

A coefficient at level ``j`` is nonzero with probability ``min(1, pi_j)``
and, when nonzero, equals ``tau_j * xi`` with ``xi`` drawn from the slab.
Two truncation modes exist: a plain truncation at a top level ``J``
("infinite model" cut off for simulation), and a regression-scaled mode
where a sample size ``n`` fixes ``J = floor(log2 n) - 1`` and multiplies
every coefficient by ``n^(-1/2)``.

Levels are stored sparsely as (position, value) pairs; zeros are
implicit.  Sampling is O(number of nonzeros) per level: a binomial count
first, then uniform positions without replacement by sequential
rejection.  Randomness is keyed by (seed, replicate, level) through
``numpy.random.SeedSequence`` spawn keys, so results are reproducible
under any parallel schedule.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from .distributions import SlabDistribution, sample as slab_sample
from .schedules import LevelSchedule

__all__ = [
    "Level",
    "CoefficientTree",
    "Infinite",
    "Regression",
    "PriorSpec",
    "sample_tree",
    "nonzero_counts",
    "rng_for",
    "tree_to_json",
    "tree_from_json",
    "tree_to_csv_rows",
    "tree_from_csv_rows",
]


def rng_for(seed: int, *key: int) -> np.random.Generator:
    """Deterministic generator for a (replicate, level, ...) sub-stream."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)


@dataclass(frozen=True)
class Level:
    """Sparse level: strictly increasing positions ``k`` with nonzero ``w``."""

    j: int
    k: np.ndarray
    w: np.ndarray

    def __post_init__(self) -> None:
        k = np.asarray(self.k, dtype=np.int64)
        w = np.asarray(self.w, dtype=np.float64)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "w", w)
        if self.j < 0:
            raise ValueError(f"level index must be >= 0, got {self.j}")
        if k.shape != w.shape or k.ndim != 1:
            raise ValueError("positions and values must be 1-d arrays of equal length")
        if k.size:
            if k[0] < 0 or k[-1] >= 2**self.j:
                raise ValueError(f"positions out of range [0, 2^{self.j}) at level {self.j}")
            if np.any(np.diff(k) <= 0):
                raise ValueError(f"positions must be strictly increasing at level {self.j}")
            if np.any(w == 0.0):
                raise ValueError("stored coefficients must be nonzero (zeros are implicit)")


@dataclass(frozen=True)
class CoefficientTree:
    j0: int
    scaling: np.ndarray
    levels: tuple[Level, ...]

    def __post_init__(self) -> None:
        scaling = np.asarray(self.scaling, dtype=np.float64)
        object.__setattr__(self, "scaling", scaling)
        object.__setattr__(self, "levels", tuple(self.levels))
        if self.j0 < 0:
            raise ValueError(f"j0 must be >= 0, got {self.j0}")
        if scaling.shape != (2**self.j0,):
            raise ValueError(
                f"scaling must hold 2^{self.j0} values, got shape {scaling.shape}"
            )
        expect = self.j0
        for lev in self.levels:
            if lev.j != expect:
                raise ValueError(
                    f"levels must cover [j0, J] contiguously; expected {expect}, got {lev.j}"
                )
            expect += 1

    @property
    def top_level(self) -> int:
        return self.j0 + len(self.levels) - 1 if self.levels else self.j0 - 1

    def scale_by(self, factor: float) -> "CoefficientTree":
        """Tree with every stored coefficient multiplied by ``factor``.

        Entries whose product underflows to zero are dropped, keeping the
        stored-coefficients-are-nonzero invariant.
        """
        levels = []
        for lev in self.levels:
            w = lev.w * factor
            keep = w != 0.0
            levels.append(Level(lev.j, lev.k[keep], w[keep]))
        return CoefficientTree(self.j0, self.scaling * factor, tuple(levels))


@dataclass(frozen=True)
class Infinite:
    """Truncate the infinite model at top level ``j_max`` (inclusive)."""

    j_max: int


@dataclass(frozen=True)
class Regression:
    """Finite-n regression prior: top level ``floor(log2 n) - 1`` and a
    global ``n^(-1/2)`` scale on coefficients."""

    n: int


Mode = Union[Infinite, Regression]


@dataclass(frozen=True)
class PriorSpec:
    tau: LevelSchedule
    pi: LevelSchedule
    slab: SlabDistribution
    mode: Mode = field(default_factory=lambda: Infinite(12))

    def top_level(self) -> int:
        if isinstance(self.mode, Infinite):
            return self.mode.j_max
        return int(math.floor(math.log2(self.mode.n))) - 1

    def amplitude(self, j: int) -> float:
        """Scale multiplying the slab draw at level ``j``."""
        amp = self.tau.value_at(j)
        if isinstance(self.mode, Regression):
            amp /= math.sqrt(self.mode.n)
        return amp


def _positions_without_replacement(rng: np.random.Generator, width: int, count: int) -> np.ndarray:
    """``count`` distinct uniform positions in [0, width), sorted."""
    if count == 0:
        return np.empty(0, dtype=np.int64)
    if count == width:
        return np.arange(width, dtype=np.int64)
    if count > width:
        raise ValueError("count exceeds level width")
    if count * 4 >= width:
        # dense level: a permutation is cheaper than rejection
        pos = rng.permutation(width)[:count]
        return np.sort(pos.astype(np.int64))
    seen: set[int] = set()
    out: list[int] = []
    while len(out) < count:
        batch = rng.integers(0, width, size=count - len(out))
        for v in batch.tolist():
            if v not in seen:
                seen.add(v)
                out.append(v)
    return np.sort(np.asarray(out, dtype=np.int64))


def sample_tree(
    spec: PriorSpec,
    j0: int,
    scaling: Iterable[float] | None = None,
    seed: int = 0,
    replicate: int = 0,
) -> CoefficientTree:
    """Draw one tree from the prior; deterministic given (seed, replicate).

    ``scaling`` supplies the coarse coefficients u_{j0,m} (the theory holds
    for any fixed values); defaults to zeros.
    """
    if j0 < 0:
        raise ValueError(f"j0 must be >= 0, got {j0}")
    top = spec.top_level()
    if isinstance(spec.mode, Infinite) and top < j0:
        raise ValueError(f"top level {top} below j0={j0}")
    if isinstance(spec.mode, Regression) and spec.mode.n < 2 ** (j0 + 1):
        raise ValueError(
            f"regression mode needs n >= 2^(j0+1) = {2 ** (j0 + 1)}, got {spec.mode.n}"
        )
    if scaling is None:
        scaling_arr = np.zeros(2**j0)
    else:
        scaling_arr = np.asarray(list(scaling), dtype=np.float64)

    levels = []
    for j in range(j0, top + 1):
        rng = rng_for(seed, replicate, j)
        width = 2**j
        p = spec.pi.clamped_at(j)
        count = int(rng.binomial(width, p)) if p > 0 else 0
        k = _positions_without_replacement(rng, width, count)
        amp = spec.amplitude(j)
        w = amp * slab_sample(spec.slab, rng, size=count)
        keep = w != 0.0
        levels.append(Level(j, k[keep], w[keep]))
    return CoefficientTree(j0, scaling_arr, tuple(levels))


def nonzero_counts(t: CoefficientTree) -> np.ndarray:
    """Per-level nonzero coefficient counts, ordered from j0 upward."""
    return np.asarray([lev.k.size for lev in t.levels], dtype=np.int64)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def tree_to_json(t: CoefficientTree) -> str:
    doc = {
        "j0": t.j0,
        "scaling": t.scaling.tolist(),
        "levels": [
            {"j": lev.j, "entries": [[int(k), float(w)] for k, w in zip(lev.k, lev.w)]}
            for lev in t.levels
        ],
    }
    return json.dumps(doc)


def tree_from_json(text: str) -> CoefficientTree:
    doc = json.loads(text)
    levels = tuple(
        Level(
            int(item["j"]),
            np.asarray([e[0] for e in item["entries"]], dtype=np.int64),
            np.asarray([e[1] for e in item["entries"]], dtype=np.float64),
        )
        for item in doc["levels"]
    )
    return CoefficientTree(int(doc["j0"]), np.asarray(doc["scaling"], dtype=np.float64), levels)


def tree_to_csv_rows(t: CoefficientTree) -> list[tuple[int, int, float]]:
    """Flat (j, k, w) rows for the wavelet part of the tree."""
    rows = []
    for lev in t.levels:
        for k, w in zip(lev.k.tolist(), lev.w.tolist()):
            rows.append((lev.j, k, w))
    return rows


def tree_from_csv_rows(
    rows: Iterable[tuple[int, int, float]], j0: int, scaling: Iterable[float] | None = None, top: int | None = None
) -> CoefficientTree:
    by_level: dict[int, list[tuple[int, float]]] = {}
    for j, k, w in rows:
        by_level.setdefault(int(j), []).append((int(k), float(w)))
    max_j = max(by_level) if by_level else j0 - 1
    if top is None:
        top = max_j
    levels = []
    for j in range(j0, top + 1):
        entries = sorted(by_level.get(j, []))
        levels.append(
            Level(
                j,
                np.asarray([e[0] for e in entries], dtype=np.int64),
                np.asarray([e[1] for e in entries], dtype=np.float64),
            )
        )
    if scaling is None:
        scaling = np.zeros(2**j0)
    return CoefficientTree(j0, np.asarray(list(scaling), dtype=np.float64), tuple(levels))


def write_tree_csv(t: CoefficientTree, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["j", "k", "w"])
        for j, k, w in tree_to_csv_rows(t):
            writer.writerow([j, k, format(w, ".17g")])
