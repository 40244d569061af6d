"""Almost-sure Besov membership classifiers for spike-and-slab priors.

Everything here is exact symbolic work on schedule exponents.  With
``tau_j = c_t j^{g_t} 2^{-e_t j}`` and ``pi_j`` clamped to [0, 1], every
criterion in the underlying theory reduces to convergence of a series
``sum_j j^G 2^{jE}`` or boundedness of the matching supremum, which is
decidable from ``(E, G)`` alone (see `schedules`).

The classifier family:

* ``classify_simple``      dyadic two-exponent parametrisation
  (``tau_j^2 = C1 4^{-alpha j/2}``-style, ``pi_j = min(1, C2 2^{-beta j})``),
  implemented as its own explicit decision table so it can serve as an
  independent cross-check of ``classify_general``.
* ``classify_general``     arbitrary schedules, five cases split by the
  growth of the expected nonzero count ``n_j = 2^j pi_j``.
* ``classify_three_param`` the three-hyperparameter family at
  ``p = inf`` with a polynomial tweak ``j^gamma`` on the variance
  (Gaussian and Laplace slabs only).
* ``classify_regression``  finite-sample regression scaling: coefficients
  carry ``n^{-1/2}`` and levels stop at ``floor(log2 n) - 1``; criteria
  become limits of normalised partial sums as ``n -> inf``.
* ``no_spike_condition``   the ``pi = 1`` specialisation.

Decisions: ``MemberAS`` / ``NotMemberAS`` are the two sides of the
necessary-and-sufficient criteria; ``SufficientOnlyMember`` marks the one
cell (constant ``n_j``, ``q = inf``) where only a sufficient condition
exists below the threshold; ``NotCovered`` carries a reason whenever the
hypotheses of every case fail.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .besov import BesovParams
from .distributions import (
    FrechetTail,
    Gaussian,
    GumbelTail,
    Laplace,
    SlabDistribution,
    absolute_moment,
    tail_class,
)
from .schedules import (
    GrowthKind,
    LevelSchedule,
    SeriesVerdict,
    SupVerdict,
    clamped_exponents,
    growth_regime,
    series_verdict,
    sup_verdict,
)

__all__ = [
    "Decision",
    "Verdict",
    "classify_simple",
    "classify_general",
    "classify_three_param",
    "classify_regression",
    "no_spike_condition",
]


class Decision(enum.Enum):
    MEMBER_AS = "MemberAS"
    NOT_MEMBER_AS = "NotMemberAS"
    SUFFICIENT_ONLY_MEMBER = "SufficientOnlyMember"
    NOT_COVERED = "NotCovered"


@dataclass(frozen=True)
class Verdict:
    decision: Decision
    case_id: str
    threshold: float | None = None
    reason: str = ""
    assumptions: tuple[str, ...] = ()

    @property
    def is_member(self) -> bool:
        return self.decision in (Decision.MEMBER_AS, Decision.SUFFICIENT_ONLY_MEMBER)

    @property
    def covered(self) -> bool:
        return self.decision is not Decision.NOT_COVERED

    def to_dict(self) -> dict:
        return {
            "decision": self.decision.value,
            "case_id": self.case_id,
            "threshold": self.threshold,
            "reason": self.reason,
            "assumptions": list(self.assumptions),
        }


# ---------------------------------------------------------------------------
# exponent-algebra primitives: terms behave like j^G * 2^(j*E)
# ---------------------------------------------------------------------------

def _series_finite(E: float, G: float) -> bool:
    """sum_j j^G 2^(jE) < inf"""
    return series_verdict(-E, G) is SeriesVerdict.CONVERGES


def _sup_finite(E: float, G: float) -> bool:
    """sup_j j^G 2^(jE) < inf"""
    return sup_verdict(-E, G) is SupVerdict.BOUNDED


def _has_moment(slab: SlabDistribution, order: float) -> bool:
    return absolute_moment(slab, order) < math.inf


def _validate_smoothness(bp: BesovParams, r: float) -> None:
    if not bp.s < r:
        raise ValueError(
            f"smoothness s={bp.s} must lie below the wavelet regularity r={r}"
        )


def _decide(member: bool, case_id: str, threshold: float | None, assumptions=()) -> Verdict:
    return Verdict(
        Decision.MEMBER_AS if member else Decision.NOT_MEMBER_AS,
        case_id,
        threshold,
        assumptions=tuple(assumptions),
    )


def _not_covered(case_id: str, reason: str, threshold: float | None = None) -> Verdict:
    return Verdict(Decision.NOT_COVERED, case_id, threshold, reason=reason)


# ---------------------------------------------------------------------------
# simple two-exponent parametrisation, straight from the decision table
# ---------------------------------------------------------------------------

def classify_simple(
    slab: SlabDistribution, alpha: float, beta: float, bp: BesovParams, r: float
) -> Verdict:
    """Membership for ``tau_j = sqrt(C1) 2^(-alpha j/2)``,
    ``pi_j = min(1, C2 2^(-beta j))``.

    The decision is a threshold on ``s``:

        T = (alpha - 1)/2 + beta/p - delta_H,

    where ``delta_H = (1 - beta)/ell`` for polynomial-tail slabs at
    ``p = inf`` and 0 otherwise.  Equality ``s = T`` is admitted only in
    the cell ``beta < 1, p < inf, q = inf``; at ``beta = 1, q = inf`` the
    threshold condition is only sufficient.
    """
    if alpha < 0 or beta < 0:
        raise ValueError(f"alpha and beta must be >= 0, got {alpha}, {beta}")
    if alpha == 0 and beta == 0:
        raise ValueError("alpha + beta must be positive (degenerate prior otherwise)")
    _validate_smoothness(bp, r)

    if beta > 1:
        return Verdict(
            Decision.MEMBER_AS,
            "simple/summable",
            assumptions=("sum_j 2^j pi_j < inf: finitely many nonzero coefficients",),
        )

    tc = tail_class(slab)
    frechet = isinstance(tc, FrechetTail)
    p_inf = math.isinf(bp.p)
    q_inf = math.isinf(bp.q)
    assumptions: list[str] = []

    if beta < 1:
        if not p_inf:
            if not _has_moment(slab, bp.p):
                return _not_covered(
                    "simple/assumption-h",
                    f"E|xi|^p is infinite for p={bp.p} under {type(slab).__name__}",
                )
            assumptions.append(f"E|xi|^{bp.p:g} < inf")
        elif frechet and not q_inf and bp.q >= tc.ell:
            return _not_covered(
                "simple/assumption-h",
                f"polynomial tail needs q < ell; got q={bp.q}, ell={tc.ell}",
            )
    else:  # beta == 1
        if not q_inf:
            if not _has_moment(slab, bp.q):
                return _not_covered(
                    "simple/assumption-h",
                    f"E|xi|^q is infinite for q={bp.q} under {type(slab).__name__}",
                )
            assumptions.append(f"E|xi|^{bp.q:g} < inf")
        else:
            assumptions.append("E log+ |xi| < inf")

    delta_h = (1.0 - beta) / tc.ell if (frechet and p_inf) else 0.0
    threshold = (alpha - 1.0) / 2.0 + beta * bp.inv_p - delta_h

    if beta == 1.0 and q_inf:
        if bp.s < threshold:
            return Verdict(
                Decision.SUFFICIENT_ONLY_MEMBER,
                "simple/n-const-q-inf",
                threshold,
                reason="threshold condition is sufficient only in this cell",
                assumptions=tuple(assumptions),
            )
        return _not_covered(
            "simple/n-const-q-inf",
            "above the sufficient threshold the theory is silent here",
            threshold,
        )

    if beta < 1.0 and not p_inf and q_inf:
        member = bp.s <= threshold
    else:
        member = bp.s < threshold
    cell = "simple/p-inf-frechet" if (frechet and p_inf) else (
        "simple/p-inf-gumbel" if p_inf else "simple/p-finite"
    )
    return _decide(member, cell, threshold, assumptions)


# ---------------------------------------------------------------------------
# general schedules: five cases split on the growth of n_j = 2^j pi_j
# ---------------------------------------------------------------------------

def _case4_constant_q_inf(
    slab: SlabDistribution, tau: LevelSchedule, bp: BesovParams, case_id: str
) -> Verdict:
    """Shared case: n_j -> const, q = inf.

    Membership is controlled by ``M(j) = 1/(tau_j 2^(j s'))``: when M grows
    exponentially (``e_t > s'`` would decay -- note the sign: it grows when
    ``tau_j`` decays faster than ``2^(-j s')``), a logarithmic moment
    suffices; when M grows polynomially (``j^(-g_t)`` with ``g_t < 0``) the
    criterion is the moment ``E|xi|^(-1/g_t) < inf``; otherwise M is not
    eventually increasing and no case applies.
    """
    d = tau.e - bp.s_prime  # M(j) ~ j^(-g_t) 2^(j*d) / c_t
    threshold = tau.e - 0.5 + bp.inv_p
    if d > 0:
        return _decide(True, case_id, threshold, ("E log+ |xi| < inf",))
    if d == 0:
        if tau.g < 0:
            order = -1.0 / tau.g
            return _decide(
                _has_moment(slab, order),
                case_id,
                threshold,
                (f"moment gate E|xi|^{order:g}",),
            )
        return _not_covered(
            case_id,
            "normalising sequence M(j) is not eventually increasing "
            f"(tau exponents e={tau.e}, g={tau.g} against s'={bp.s_prime})",
            threshold,
        )
    return _not_covered(
        case_id,
        "normalising sequence M(j) decreases; the q=inf constant-count case "
        "needs tau_j to decay at least like 2^(-j s')",
        threshold,
    )


def classify_general(
    slab: SlabDistribution,
    tau: LevelSchedule,
    pi: LevelSchedule,
    bp: BesovParams,
    r: float,
) -> Verdict:
    """Membership under arbitrary schedule hyperparameters (infinite model)."""
    _validate_smoothness(bp, r)
    regime = growth_regime(pi)
    p_inf = math.isinf(bp.p)
    q_inf = math.isinf(bp.q)
    e_t, g_t = tau.e, tau.g

    if regime.kind is GrowthKind.NOT_COVERED:
        return _not_covered("general/regime-gap", regime.reason)

    if regime.kind is GrowthKind.SUMMABLE:
        return Verdict(
            Decision.MEMBER_AS,
            "general/case5",
            assumptions=("sum_j 2^j pi_j < inf: finitely many nonzero coefficients",),
        )

    if regime.kind is GrowthKind.INCREASES_TO_INFINITY:
        c_pi, e_pi, g_pi = clamped_exponents(pi)

        if not p_inf:
            # case 1: l_p sums concentrate by the random-length LLN
            if not _has_moment(slab, bp.p):
                return _not_covered(
                    "general/case1",
                    f"E|xi|^p infinite for p={bp.p} under {type(slab).__name__}",
                )
            A = bp.s + 0.5 - e_t - e_pi / bp.p
            G = g_t + g_pi / bp.p
            threshold = e_t + e_pi / bp.p - 0.5
            member = (
                _sup_finite(A, G) if q_inf else _series_finite(bp.q * A, bp.q * G)
            )
            return _decide(member, "general/case1", threshold, (f"E|xi|^{bp.p:g} < inf",))

        # case 2: p = inf, level maxima under EVT normalisation
        tc = tail_class(slab)
        if isinstance(tc, GumbelTail):
            if e_pi == 1.0 and g_pi > 0:
                return _not_covered(
                    "general/case2-gumbel",
                    "auxiliary Gumbel condition fails: n_j grows only polynomially, "
                    "so g(b_j) log j / b_j does not vanish",
                )
            A = bp.s + 0.5 - e_t
            G = g_t + 1.0 / tc.log_power  # b_j ~ (log n_j)^(1/m)
            threshold = e_t - 0.5
            member = _sup_finite(A, G) if q_inf else _series_finite(bp.q * A, bp.q * G)
            return _decide(
                member,
                "general/case2-gumbel",
                threshold,
                (f"Gumbel tail, b_j ~ (log n_j)^(1/{tc.log_power:g})",),
            )

        # Frechet tail: b_j ~ n_j^(1/ell)
        ell = tc.ell
        if not q_inf and bp.q >= ell:
            return _not_covered(
                "general/case2-frechet",
                f"polynomial tail needs q < ell; got q={bp.q}, ell={ell}",
            )
        A = bp.s + 0.5 - e_t + (1.0 - e_pi) / ell
        G = g_t + g_pi / ell
        threshold = e_t - 0.5 - (1.0 - e_pi) / ell
        if q_inf:
            # the a.s. supremum of c_j * Frechet(ell) variables is finite
            # exactly when sum c_j^ell converges (Borel-Cantelli both ways)
            member = _series_finite(ell * A, ell * G)
        else:
            member = _series_finite(bp.q * A, bp.q * G)
        return _decide(
            member,
            "general/case2-frechet",
            threshold,
            (f"Frechet tail with index ell={ell:g}",),
        )

    # constant regime: n_j -> const > 0
    if not q_inf:
        if not _has_moment(slab, bp.q):
            return _not_covered(
                "general/case3",
                f"E|xi|^q infinite for q={bp.q} under {type(slab).__name__}",
            )
        D = bp.s_prime - e_t
        threshold = e_t - 0.5 + bp.inv_p
        member = _series_finite(bp.q * D, bp.q * g_t)
        return _decide(member, "general/case3", threshold, (f"E|xi|^{bp.q:g} < inf",))
    return _case4_constant_q_inf(slab, tau, bp, "general/case4")


# ---------------------------------------------------------------------------
# three-hyperparameter family (p = inf, polynomial variance tweak)
# ---------------------------------------------------------------------------

def classify_three_param(
    slab: SlabDistribution,
    alpha: float,
    beta: float,
    gamma: float,
    s: float,
    q: float,
    r: float,
) -> Verdict:
    """Membership in ``B^s_{inf,q}`` for ``tau_j^2 = C1 j^gamma 2^(-alpha j)``,
    ``pi_j = min(1, C2 2^(-beta j))`` with ``beta in [0, 1)``.

    Only Gaussian and Laplace slabs are covered.  With
    ``delta = s + 1/2 - alpha/2`` the function is a member iff
    ``delta < 0``, or ``delta = 0`` together with a ``gamma`` cutoff that
    separates the two tail weights (``m = 2`` Gaussian, ``m = 1`` Laplace):
    ``gamma < -2/q - 2/m`` for finite q, ``gamma <= -2/m`` at ``q = inf``.
    """
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must lie in [0, 1), got {beta}")
    bp = BesovParams(s=s, p=math.inf, q=q)
    _validate_smoothness(bp, r)
    if not isinstance(slab, (Gaussian, Laplace)):
        return _not_covered(
            "three-param/slab",
            f"three-param route covers Gaussian and Laplace slabs, not {type(slab).__name__}",
        )
    m = 2.0 if isinstance(slab, Gaussian) else 1.0
    delta = s + 0.5 - alpha / 2.0
    threshold = (alpha - 1.0) / 2.0
    if delta < 0:
        member = True
    elif delta == 0:
        member = (gamma <= -2.0 / m) if math.isinf(q) else (gamma < -2.0 / q - 2.0 / m)
    else:
        member = False
    return _decide(member, "three-param/gumbel", threshold, (f"tail weight m={m:g}",))


# ---------------------------------------------------------------------------
# regression scaling: tau_j / sqrt(n), levels up to floor(log2 n) - 1
# ---------------------------------------------------------------------------

def classify_regression(
    slab: SlabDistribution,
    tau: LevelSchedule,
    pi: LevelSchedule,
    bp: BesovParams,
    r: float,
) -> Verdict:
    """Almost-sure membership in the large-n limit of the regression prior.

    The ``n^{-1/2}`` scale turns series criteria into limits of normalised
    partial sums: a level term ``j^G 2^(jE)`` summed to ``J ~ log2 n`` and
    multiplied by ``n^{-q/2}`` stays bounded iff ``E < q/2``, or
    ``E = q/2`` with ``G <= 0``.  For ``q = inf`` the criterion splits by
    tail class: Gumbel-type slabs keep the un-normalised supremum
    criterion, polynomial tails get the normalised one.
    """
    _validate_smoothness(bp, r)
    regime = growth_regime(pi)
    p_inf = math.isinf(bp.p)
    q_inf = math.isinf(bp.q)
    e_t, g_t = tau.e, tau.g

    if regime.kind is GrowthKind.NOT_COVERED:
        return _not_covered("regression/regime-gap", regime.reason)
    if regime.kind is GrowthKind.SUMMABLE:
        return Verdict(
            Decision.MEMBER_AS,
            "regression/case5",
            assumptions=("sum_j 2^j pi_j < inf",),
        )

    if regime.kind is GrowthKind.INCREASES_TO_INFINITY:
        c_pi, e_pi, g_pi = clamped_exponents(pi)
        if not p_inf:
            if not _has_moment(slab, bp.p):
                return _not_covered(
                    "regression/case1",
                    f"E|xi|^p infinite for p={bp.p} under {type(slab).__name__}",
                )
            A = bp.s + 0.5 - e_t - e_pi / bp.p
            G = g_t + g_pi / bp.p
            if q_inf:
                member = A < 0 or (A == 0 and G <= 0)
                threshold = e_t + e_pi / bp.p - 0.5
            else:
                member = A < 0.5 or (A == 0.5 and G <= 0)
                threshold = e_t + e_pi / bp.p
            return _decide(member, "regression/case1", threshold, (f"E|xi|^{bp.p:g} < inf",))

        tc = tail_class(slab)
        if isinstance(tc, GumbelTail):
            if e_pi == 1.0 and g_pi > 0:
                return _not_covered(
                    "regression/case2-gumbel",
                    "auxiliary Gumbel condition fails: n_j grows only polynomially",
                )
            D = bp.s + 0.5 - e_t
            L = g_t + 1.0 / tc.log_power
            if q_inf:
                member = D < 0 or (D == 0 and L <= 0)
                threshold = e_t - 0.5
            else:
                member = D < 0.5 or (D == 0.5 and L <= 0)
                threshold = e_t
            return _decide(
                member,
                "regression/case2-gumbel",
                threshold,
                (f"Gumbel tail, b_j ~ (log n_j)^(1/{tc.log_power:g})",),
            )

        ell = tc.ell
        if not q_inf and bp.q >= ell + 1.0:
            return _not_covered(
                "regression/case2-frechet",
                f"regression-mode polynomial tail needs q < ell + 1; got q={bp.q}, ell={ell}",
            )
        D = bp.s + 0.5 - e_t - (1.0 - e_pi)
        L = g_t - g_pi
        member = D < 0.5 or (D == 0.5 and L <= 0)
        threshold = e_t + 1.0 - e_pi
        return _decide(
            member,
            "regression/case2-frechet",
            threshold,
            (f"Frechet tail with index ell={ell:g}",),
        )

    # constant regime
    if not q_inf:
        if not _has_moment(slab, bp.q):
            return _not_covered(
                "regression/case3",
                f"E|xi|^q infinite for q={bp.q} under {type(slab).__name__}",
            )
        D = bp.s_prime - e_t
        member = D < 0.5 or (D == 0.5 and g_t <= 0)
        threshold = e_t + bp.inv_p
        return _decide(member, "regression/case3", threshold, (f"E|xi|^{bp.q:g} < inf",))
    return _case4_constant_q_inf(slab, tau, bp, "regression/case4")


def no_spike_condition(
    slab: SlabDistribution, tau: LevelSchedule, bp: BesovParams, r: float
) -> Verdict:
    """Membership when every coefficient is nonzero (``pi_j = 1``).

    Delegates to ``classify_general`` with the constant-one probability
    schedule; with ``n_j = 2^j`` this lands in case 1 (finite p) or
    case 2 (p = inf).
    """
    inner = classify_general(slab, tau, LevelSchedule(1.0), bp, r)
    return Verdict(
        inner.decision,
        "no-spike/" + inner.case_id.split("/", 1)[1],
        inner.threshold,
        inner.reason,
        inner.assumptions,
    )
