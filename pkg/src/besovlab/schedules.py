"""Level schedules ``c * j^g * 2^(-e*j)`` and their exact asymptotics.

Both hyperparameter sequences of the prior live in this family: the scale
``tau_j`` and the nonzero probability ``pi_j`` (the latter clamped to
[0, 1] when used as a probability).  Restricting to this family makes the
relevant series and suprema exactly decidable from the exponents, which
the membership classifiers rely on; nothing in the package ever decides
convergence by numerically summing a sequence.

Conventions: ``j^g := 1`` at ``j = 0``; all schedules are over integer
levels ``j >= 0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

__all__ = [
    "LevelSchedule",
    "GrowthKind",
    "GrowthRegime",
    "SeriesVerdict",
    "SupVerdict",
    "growth_regime",
    "series_verdict",
    "sup_verdict",
    "clamped_exponents",
]


@dataclass(frozen=True)
class LevelSchedule:
    """Sequence ``value_at(j) = c * j^g * 2^(-e*j)``.

    ``c`` is the leading constant (nonnegative), ``e`` the dyadic decay
    exponent and ``g`` the polynomial exponent.
    """

    c: float
    e: float = 0.0
    g: float = 0.0

    def __post_init__(self) -> None:
        if not (self.c >= 0 and math.isfinite(self.c)):
            raise ValueError(f"schedule constant must be finite and >= 0, got {self.c}")
        if not (math.isfinite(self.e) and math.isfinite(self.g)):
            raise ValueError("schedule exponents must be finite")

    def value_at(self, j: int) -> float:
        if j < 0:
            raise ValueError(f"level must be >= 0, got {j}")
        poly = 1.0 if j == 0 else float(j) ** self.g
        return self.c * poly * 2.0 ** (-self.e * j)

    def clamped_at(self, j: int) -> float:
        """``min(1, value_at(j))`` — the probability reading of the schedule."""
        return min(1.0, self.value_at(j))

    def to_dict(self) -> dict:
        return {"c": self.c, "e": self.e, "g": self.g}

    @classmethod
    def from_dict(cls, d: dict) -> "LevelSchedule":
        return cls(c=float(d["c"]), e=float(d.get("e", 0.0)), g=float(d.get("g", 0.0)))


class SeriesVerdict(enum.Enum):
    CONVERGES = "Converges"
    DIVERGES = "Diverges"


class SupVerdict(enum.Enum):
    BOUNDED = "Bounded"
    UNBOUNDED = "Unbounded"


def series_verdict(e: float, g: float) -> SeriesVerdict:
    """Convergence of ``sum_j j^g 2^(-e*j)``: converges iff ``e > 0`` or
    (``e = 0`` and ``g < -1``)."""
    if e > 0 or (e == 0 and g < -1):
        return SeriesVerdict.CONVERGES
    return SeriesVerdict.DIVERGES


def sup_verdict(e: float, g: float) -> SupVerdict:
    """Boundedness of ``sup_j j^g 2^(-e*j)``: bounded iff ``e > 0`` or
    (``e = 0`` and ``g <= 0``)."""
    if e > 0 or (e == 0 and g <= 0):
        return SupVerdict.BOUNDED
    return SupVerdict.UNBOUNDED


class GrowthKind(enum.Enum):
    INCREASES_TO_INFINITY = "IncreasesToInfinity"
    TENDS_TO_CONSTANT = "TendsToConstant"
    SUMMABLE = "Summable"
    NOT_COVERED = "NotCovered"


@dataclass(frozen=True)
class GrowthRegime:
    kind: GrowthKind
    limit: float | None = None
    reason: str = ""


def clamped_exponents(pi: LevelSchedule) -> tuple[float, float, float]:
    """Asymptotic ``(c, e, g)`` of ``min(1, pi_j)`` for large ``j``.

    Clamping only matters when the raw schedule stays at or above 1:
    with ``e < 0``, or ``e = 0`` and ``g > 0``, the clamped sequence is
    eventually identically 1; with ``e = 0``, ``g = 0`` the constant is
    capped at 1.
    """
    c, e, g = pi.c, pi.e, pi.g
    if c == 0:
        return 0.0, 0.0, 0.0
    if e > 0:
        return c, e, g
    if e == 0:
        if g < 0:
            return c, 0.0, g
        if g == 0:
            return min(1.0, c), 0.0, 0.0
        return 1.0, 0.0, 0.0
    return 1.0, 0.0, 0.0


def growth_regime(pi: LevelSchedule) -> GrowthRegime:
    """Regime of ``n_j = 2^j * min(1, pi_j)``, the expected nonzero count.

    Returns one of IncreasesToInfinity, TendsToConstant(limit), Summable,
    or NotCovered for the gap regime where ``n_j -> 0`` but ``sum n_j``
    diverges (the theory has no statement there).
    """
    c, e, g = clamped_exponents(pi)
    if c == 0:
        return GrowthRegime(GrowthKind.SUMMABLE)
    # n_j ~ c * j^g * 2^(j(1-e))
    if e < 1:
        return GrowthRegime(GrowthKind.INCREASES_TO_INFINITY)
    if e == 1:
        if g > 0:
            return GrowthRegime(GrowthKind.INCREASES_TO_INFINITY)
        if g == 0:
            return GrowthRegime(GrowthKind.TENDS_TO_CONSTANT, limit=c)
        if g < -1:
            return GrowthRegime(GrowthKind.SUMMABLE)
        return GrowthRegime(
            GrowthKind.NOT_COVERED,
            reason=(
                "expected counts n_j tend to 0 while sum n_j diverges "
                f"(e={e}, g={g}); no theory case applies"
            ),
        )
    # e > 1: sum_j 2^j pi_j converges geometrically
    return GrowthRegime(GrowthKind.SUMMABLE)
