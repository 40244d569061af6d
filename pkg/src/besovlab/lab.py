"""Monte Carlo verification harness.

Four experiments cross-check the symbolic classifiers against simulation:

* `lln_experiment`          law of large numbers for the randomly indexed
  sums ``S_j = sum_{i <= N_j} |xi_i|^m`` with ``N_j ~ Bin(2^j, pi_j)``;
  the ratios ``S_j / n_j`` drift to the slab moment ``nu_m``.
* `evt_experiment`          extreme-value normalisation of level maxima:
  ``max_k |z_jk| / b_j`` with ``b_j`` the ``1 - 1/n_j`` folded quantile.
  Light (Gumbel-class) tails concentrate at 1; polynomial tails converge
  to a Frechet law and keep spread.
* `exponent_regression`     least-squares slope of ``log2`` level terms
  against the level index, compared to the exact schedule exponent.
* `empirical_membership`    turns the fitted slope into a verdict
  (Converges / Diverges / Inconclusive at three standard errors) and
  checks agreement with the symbolic classifier.

All experiments are bit-reproducible for a fixed ``(seed, reps, levels)``
regardless of the thread count: each (replicate, level) pair gets its own
seed stream via `sampler.rng_for`, replicates are farmed out to a thread
pool, and aggregation walks results in replicate order.
"""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .besov import BesovParams, vector_p_norm
from .distributions import (
    FrechetTail,
    SlabDistribution,
    absolute_moment,
    quantile_hplus,
    sample,
    slab_to_dict,
    tail_class,
)
from .sampler import Infinite, PriorSpec, Regression, rng_for
from .schedules import GrowthKind, LevelSchedule, clamped_exponents, growth_regime
from .theory import classify_general, classify_regression

__all__ = [
    "LevelStat",
    "ExperimentReport",
    "lln_experiment",
    "evt_experiment",
    "exponent_regression",
    "empirical_membership",
]

_CHUNK = 1 << 22  # cap per-draw memory at 32 MiB of float64


@dataclass(frozen=True)
class LevelStat:
    """Per-level summary across replicates."""

    j: int
    count: int
    n_value: float
    mean: float | None
    stderr: float | None
    median: float | None
    q25: float | None
    q75: float | None

    def to_dict(self) -> dict:
        return {
            "j": self.j,
            "count": self.count,
            "n_value": self.n_value,
            "mean": self.mean,
            "stderr": self.stderr,
            "median": self.median,
            "q25": self.q25,
            "q75": self.q75,
        }


@dataclass(frozen=True)
class ExperimentReport:
    kind: str
    config: dict
    levels: tuple[LevelStat, ...]
    expected_ratio: float | None = None
    slope: float | None = None
    slope_stderr: float | None = None
    expected_slope: float | None = None
    empirical_verdict: str | None = None
    theory_verdict: dict | None = None
    agree: bool | None = None
    dropped_fraction: float = 0.0
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "config": self.config,
            "levels": [ls.to_dict() for ls in self.levels],
            "expected_ratio": self.expected_ratio,
            "slope": self.slope,
            "slope_stderr": self.slope_stderr,
            "expected_slope": self.expected_slope,
            "empirical_verdict": self.empirical_verdict,
            "theory_verdict": self.theory_verdict,
            "agree": self.agree,
            "dropped_fraction": self.dropped_fraction,
            "degenerate": self.degenerate,
        }


def _level_list(levels) -> list[int]:
    out = sorted({int(j) for j in levels})
    if not out:
        raise ValueError("need at least one level")
    if out[0] < 0:
        raise ValueError(f"levels must be >= 0, got {out[0]}")
    return out


def _check_reps(reps: int) -> None:
    if reps < 2:
        raise ValueError(f"need reps >= 2 to report standard errors, got {reps}")


def _run_reps(reps: int, threads: int, work):
    """Run ``work(rep)`` for each replicate, results in replicate order."""
    if threads <= 1:
        return [work(rep) for rep in range(reps)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(work, range(reps)))


def _mean_stderr(xs: list[float]) -> tuple[float, float]:
    n = len(xs)
    mean = math.fsum(xs) / n
    if n < 2:
        return mean, math.nan
    var = math.fsum((x - mean) ** 2 for x in xs) / (n - 1)
    return mean, math.sqrt(var / n)


def _summarise(j: int, n_value: float, xs: list[float]) -> LevelStat:
    if not xs:
        return LevelStat(j, 0, n_value, None, None, None, None, None)
    mean, stderr = _mean_stderr(xs)
    med = statistics.median(xs)
    if len(xs) < 2:
        return LevelStat(j, 1, n_value, mean, None, med, None, None)
    q25, _, q75 = statistics.quantiles(xs, n=4, method="inclusive")
    return LevelStat(j, len(xs), n_value, mean, stderr, med, q25, q75)


def _binomial_count(rng: np.random.Generator, j: int, prob: float) -> int:
    if prob >= 1.0:
        return 1 << j
    return int(rng.binomial(1 << j, prob))


def _sum_abs_power(slab: SlabDistribution, rng: np.random.Generator, count: int, m: float) -> float:
    total = 0.0
    left = count
    while left > 0:
        take = min(left, _CHUNK)
        total += float(np.sum(np.abs(sample(slab, rng, take)) ** m))
        left -= take
    return total


def _max_abs(slab: SlabDistribution, rng: np.random.Generator, count: int) -> float:
    best = 0.0
    left = count
    while left > 0:
        take = min(left, _CHUNK)
        best = max(best, float(np.max(np.abs(sample(slab, rng, take)))))
        left -= take
    return best


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def lln_experiment(
    slab: SlabDistribution,
    pi: LevelSchedule,
    m: float,
    levels=range(8, 19),
    reps: int = 50,
    seed: int = 0,
    threads: int = 1,
) -> ExperimentReport:
    """Ratios ``S_j / n_j`` for the randomly indexed sums of ``|xi|^m``.

    Requires a growing expected count and a finite slab moment; the
    per-level means drift toward ``nu_m = E|xi|^m``.
    """
    lv = _level_list(levels)
    _check_reps(reps)
    if growth_regime(pi).kind is not GrowthKind.INCREASES_TO_INFINITY:
        raise ValueError("lln_experiment needs an expected count increasing to infinity")
    nu_m = absolute_moment(slab, m)
    if not nu_m < math.inf:
        raise ValueError(f"E|xi|^{m:g} is infinite for {type(slab).__name__}")

    n_values = {j: (1 << j) * pi.clamped_at(j) for j in lv}

    def work(rep: int) -> list[float]:
        out = []
        for j in lv:
            rng = rng_for(seed, rep, j)
            count = _binomial_count(rng, j, pi.clamped_at(j))
            s = _sum_abs_power(slab, rng, count, m)
            out.append(s / n_values[j])
        return out

    rows = _run_reps(reps, threads, work)
    stats = tuple(
        _summarise(j, n_values[j], [rows[rep][i] for rep in range(reps)])
        for i, j in enumerate(lv)
    )
    config = {
        "slab": slab_to_dict(slab),
        "pi": pi.to_dict(),
        "m": m,
        "levels": lv,
        "reps": reps,
        "seed": seed,
    }
    return ExperimentReport("lln", config, stats, expected_ratio=nu_m)


def evt_experiment(
    slab: SlabDistribution,
    pi: LevelSchedule,
    levels=range(8, 19),
    reps: int = 50,
    seed: int = 0,
    threads: int = 1,
) -> ExperimentReport:
    """Level maxima normalised by the ``1 - 1/n_j`` folded quantile.

    For Gumbel-class tails the ratio concentrates at 1; for polynomial
    tails it converges in law to a Frechet distribution whose median is
    ``(ln 2)^(-1/ell)``, so the per-level medians target that value while
    the spread stays macroscopic.
    """
    lv = _level_list(levels)
    _check_reps(reps)
    if growth_regime(pi).kind is not GrowthKind.INCREASES_TO_INFINITY:
        raise ValueError("evt_experiment needs an expected count increasing to infinity")
    n_values = {}
    b_values = {}
    for j in lv:
        n_j = (1 << j) * pi.clamped_at(j)
        if n_j <= 1.0:
            raise ValueError(f"expected count n_j={n_j:g} <= 1 at level {j}")
        n_values[j] = n_j
        b_values[j] = quantile_hplus(slab, 1.0 - 1.0 / n_j)

    def work(rep: int) -> list[float]:
        out = []
        for j in lv:
            rng = rng_for(seed, rep, j)
            count = _binomial_count(rng, j, pi.clamped_at(j))
            mx = _max_abs(slab, rng, count) if count else 0.0
            out.append(mx / b_values[j])
        return out

    rows = _run_reps(reps, threads, work)
    stats = tuple(
        _summarise(j, n_values[j], [rows[rep][i] for rep in range(reps)])
        for i, j in enumerate(lv)
    )
    tc = tail_class(slab)
    expected = math.log(2.0) ** (-1.0 / tc.ell) if isinstance(tc, FrechetTail) else 1.0
    config = {
        "slab": slab_to_dict(slab),
        "pi": pi.to_dict(),
        "levels": lv,
        "reps": reps,
        "seed": seed,
    }
    return ExperimentReport("evt", config, stats, expected_ratio=expected)


def _expected_exponent(
    slab: SlabDistribution, tau: LevelSchedule, pi: LevelSchedule, bp: BesovParams
) -> float | None:
    """Per-level base-2 exponent of the level term ``a_j`` on the schedule
    family, matching the case split of the symbolic classifiers."""
    regime = growth_regime(pi)
    _, e_pi, _ = clamped_exponents(pi)
    if regime.kind is GrowthKind.INCREASES_TO_INFINITY:
        if not math.isinf(bp.p):
            return bp.s + 0.5 - tau.e - e_pi / bp.p
        tc = tail_class(slab)
        if isinstance(tc, FrechetTail):
            return bp.s + 0.5 - tau.e + (1.0 - e_pi) / tc.ell
        return bp.s + 0.5 - tau.e
    if regime.kind is GrowthKind.TENDS_TO_CONSTANT:
        return bp.s_prime - tau.e
    return None


def _slope_fit(points: list[tuple[int, float]]) -> float | None:
    if len(points) < 2:
        return None
    xs = [float(j) for j, _ in points]
    ys = [y for _, y in points]
    xbar = math.fsum(xs) / len(xs)
    ybar = math.fsum(ys) / len(ys)
    sxx = math.fsum((x - xbar) ** 2 for x in xs)
    if sxx == 0.0:
        return None
    sxy = math.fsum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    return sxy / sxx


def _level_term_experiment(
    spec: PriorSpec,
    bp: BesovParams,
    power: float,
    levels,
    reps: int,
    seed: int,
    threads: int,
):
    """Shared core: per-replicate ``log2`` level terms and their slopes."""
    lv = _level_list(levels)
    _check_reps(reps)
    if not math.isinf(bp.p) and not absolute_moment(spec.slab, bp.p) < math.inf:
        raise ValueError(
            f"E|xi|^p is infinite for p={bp.p} under {type(spec.slab).__name__}"
        )
    top = spec.top_level()
    if lv[-1] > top:
        raise ValueError(f"level {lv[-1]} exceeds the model's top level {top}")

    def work(rep: int) -> list[float | None]:
        out: list[float | None] = []
        for j in lv:
            rng = rng_for(seed, rep, j)
            count = _binomial_count(rng, j, spec.pi.clamped_at(j))
            if count == 0:
                out.append(None)
                continue
            vals = spec.amplitude(j) * sample(spec.slab, rng, count)
            a_j = 2.0 ** (j * bp.s_prime) * vector_p_norm(vals, bp.p)
            out.append(power * math.log2(a_j) if a_j > 0 else None)
        return out

    rows = _run_reps(reps, threads, work)
    per_level = {j: [] for j in lv}
    slopes = []
    empty_tail_votes = 0
    half = lv[len(lv) // 2 :]
    for rep in range(reps):
        pts = []
        for i, j in enumerate(lv):
            y = rows[rep][i]
            if y is not None:
                per_level[j].append(y)
                pts.append((j, y))
        fit = _slope_fit(pts)
        if fit is not None:
            slopes.append(fit)
        present = {j for j, _ in pts}
        if not (present & set(half)):
            empty_tail_votes += 1

    dropped = sum(1 for rep in range(reps) for y in rows[rep] if y is None)
    dropped_fraction = dropped / (reps * len(lv))
    n_values = {j: (1 << j) * spec.pi.clamped_at(j) for j in lv}
    stats = tuple(_summarise(j, n_values[j], per_level[j]) for j in lv)

    if len(slopes) >= 2:
        slope, slope_stderr = _mean_stderr(slopes)
    else:
        slope, slope_stderr = None, None
    return lv, stats, slope, slope_stderr, dropped_fraction, empty_tail_votes


def _spec_config(spec: PriorSpec, bp: BesovParams, lv, reps, seed) -> dict:
    mode = (
        {"mode": "infinite", "j_max": spec.mode.j_max}
        if isinstance(spec.mode, Infinite)
        else {"mode": "regression", "n": spec.mode.n}
    )
    return {
        "slab": slab_to_dict(spec.slab),
        "tau": spec.tau.to_dict(),
        "pi": spec.pi.to_dict(),
        **mode,
        "besov": bp.to_dict(),
        "levels": lv,
        "reps": reps,
        "seed": seed,
    }


def exponent_regression(
    spec: PriorSpec,
    bp: BesovParams,
    levels=range(8, 19),
    reps: int = 100,
    seed: int = 0,
    threads: int = 1,
) -> ExperimentReport:
    """Fit the base-2 slope of the level terms ``a_j^q`` against ``j``.

    Empty levels are dropped from each replicate's fit; the report is
    flagged degenerate when more than 20% of (replicate, level) pairs
    were dropped.  Requires ``q < inf``.
    """
    if math.isinf(bp.q):
        raise ValueError("exponent_regression needs q < inf; use empirical_membership")
    lv, stats, slope, slope_stderr, dropped, _ = _level_term_experiment(
        spec, bp, bp.q, levels, reps, seed, threads
    )
    base = _expected_exponent(spec.slab, spec.tau, spec.pi, bp)
    expected = None if base is None else bp.q * base
    return ExperimentReport(
        "exponent_regression",
        _spec_config(spec, bp, lv, reps, seed),
        stats,
        slope=slope,
        slope_stderr=slope_stderr,
        expected_slope=expected,
        dropped_fraction=dropped,
        degenerate=dropped > 0.2 or slope is None,
    )


def empirical_membership(
    spec: PriorSpec,
    bp: BesovParams,
    levels=range(8, 19),
    reps: int = 100,
    seed: int = 0,
    threads: int = 1,
) -> ExperimentReport:
    """Monte Carlo membership verdict cross-checked against the classifier.

    The fitted slope of ``log2 a_j^q`` (``log2 a_j`` for ``q = inf``) is
    turned into a verdict at three standard errors: negative trend means
    the norm series converges, positive trend means it diverges.  In
    regression mode the slope is first detrended by the ``n^{q/2}``
    normalisation (``q/2`` per level, ``1/2`` for sups), which is what the
    finite-sample criterion compares against.  When the expected counts
    are summable the upper levels are empty and the tail of the norm is
    literally a finite sum; ninety percent of replicates showing an empty
    upper half short-circuits to Converges.
    """
    power = 1.0 if math.isinf(bp.q) else bp.q
    lv, stats, slope_raw, slope_stderr, dropped, empty_votes = _level_term_experiment(
        spec, bp, power, levels, reps, seed, threads
    )
    regression_mode = isinstance(spec.mode, Regression)
    detrend = power / 2.0 if regression_mode else 0.0
    base = _expected_exponent(spec.slab, spec.tau, spec.pi, bp)
    expected = None if base is None else power * base - detrend
    slope = None if slope_raw is None else slope_raw - detrend

    if empty_votes >= 0.9 * reps:
        verdict = "Converges"
        degenerate = True
    elif slope is None or slope_stderr is None:
        verdict = "Inconclusive"
        degenerate = True
    else:
        degenerate = dropped > 0.2
        if slope < -3.0 * slope_stderr:
            verdict = "Converges"
        elif slope > 3.0 * slope_stderr:
            verdict = "Diverges"
        else:
            verdict = "Inconclusive"

    classify = classify_regression if regression_mode else classify_general
    theory = classify(spec.slab, spec.tau, spec.pi, bp, math.inf)
    if not theory.covered:
        agree = None
    elif verdict == "Converges":
        agree = theory.is_member
    elif verdict == "Diverges":
        agree = not theory.is_member
    else:
        agree = False

    return ExperimentReport(
        "empirical_membership",
        _spec_config(spec, bp, lv, reps, seed),
        stats,
        slope=slope,
        slope_stderr=slope_stderr,
        expected_slope=expected,
        empirical_verdict=verdict,
        theory_verdict=theory.to_dict(),
        agree=agree,
        dropped_fraction=dropped,
        degenerate=degenerate,
    )
