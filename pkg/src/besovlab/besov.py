"""Besov sequence norm on coefficient trees.

For smoothness ``s > 0`` and integrability indices ``p, q in [1, inf]``
the sequence norm of a tree is

    ||u_{j0}||_p + ( sum_j [2^(j*s') ||w_j||_p]^q )^(1/q),

with ``s' = s + 1/2 - 1/p`` (``1/inf := 0``) and the sum replaced by a
supremum at ``q = inf``.  Level norms treat absent positions as zeros, so
sparse storage is exact.

Infinite indices are passed as ``math.inf``; every ``p``/``q`` branch is
guarded by an explicit ``isinf`` test.  Per-level power sums use
``math.fsum`` (exactly rounded) since levels may hold ~10^6 terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sampler import CoefficientTree

__all__ = ["BesovParams", "level_p_norm", "level_terms", "besov_seq_norm"]


@dataclass(frozen=True)
class BesovParams:
    s: float
    p: float
    q: float

    def __post_init__(self) -> None:
        if not self.s > 0:
            raise ValueError(f"s must be positive, got {self.s}")
        for name, v in (("p", self.p), ("q", self.q)):
            ok = v == math.inf or (math.isfinite(v) and v >= 1)
            if not ok:
                raise ValueError(f"{name} must be in [1, inf], got {v}")

    @property
    def s_prime(self) -> float:
        return self.s + 0.5 - self.inv_p

    @property
    def inv_p(self) -> float:
        return 0.0 if math.isinf(self.p) else 1.0 / self.p

    def to_dict(self) -> dict:
        enc = lambda v: "inf" if math.isinf(v) else v
        return {"s": self.s, "p": enc(self.p), "q": enc(self.q)}

    @classmethod
    def from_dict(cls, d: dict) -> "BesovParams":
        dec = lambda v: math.inf if v in ("inf", "Infinity", None) else float(v)
        return cls(s=float(d["s"]), p=dec(d["p"]), q=dec(d["q"]))


def vector_p_norm(values: np.ndarray, p: float) -> float:
    """``l_p`` norm of a dense vector with ``p in [1, inf]``."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return 0.0
    if math.isinf(p):
        return float(np.max(np.abs(values)))
    mags = np.abs(values)
    top = float(np.max(mags))
    if top == 0.0:
        return 0.0
    # factor out the peak so |w|^p cannot overflow for large p
    powered = (mags / top) ** p
    return top * math.fsum(powered.tolist()) ** (1.0 / p)


def level_p_norm(entries_w: np.ndarray, width: int, p: float) -> float:
    """Level ``l_p`` norm; implicit zeros on the rest of the ``width`` slots.

    Zeros never contribute to a power sum and cannot be the maximum of
    absolute values unless the level is entirely zero (norm 0), so only
    the stored values matter.  ``width`` is kept for interface symmetry
    and validation.
    """
    entries_w = np.asarray(entries_w, dtype=np.float64)
    if entries_w.size > width:
        raise ValueError(f"more entries ({entries_w.size}) than slots ({width})")
    return vector_p_norm(entries_w, p)


def level_terms(t: CoefficientTree, bp: BesovParams) -> np.ndarray:
    """Per-level terms ``a_j = 2^(j*s') * level_p_norm(j)`` for j in [j0, J]."""
    out = np.empty(len(t.levels))
    for i, lev in enumerate(t.levels):
        out[i] = 2.0 ** (lev.j * bp.s_prime) * level_p_norm(lev.w, 2**lev.j, bp.p)
    return out


def besov_seq_norm(t: CoefficientTree, bp: BesovParams) -> float:
    """Sequence norm: coarse ``l_p`` norm plus the ``l_q`` tail of ``a_j``."""
    coarse = vector_p_norm(t.scaling, bp.p)
    terms = level_terms(t, bp)
    if terms.size == 0:
        return coarse
    if math.isinf(bp.q):
        return coarse + float(np.max(terms))
    return coarse + vector_p_norm(terms, bp.q)
