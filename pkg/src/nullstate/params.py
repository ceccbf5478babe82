"""Exact relations between the SLE parameter kappa and CFT data.

Every rational formula here is evaluated in the arithmetic of its input, so a
``fractions.Fraction`` kappa gives exact rational results while a float gives
a float.  ``potts_q`` involves a cosine and always returns a float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

from .specfun import DomainError, ParameterError

__all__ = [
    "SleKappa", "KacIndex", "central_charge", "one_leg_weight", "s_leg_weight",
    "kac_weight", "potts_q", "phase_of", "summary", "KNOWN_CURVE_MODELS",
]


@dataclass(frozen=True)
class SleKappa:
    kappa: Real

    def __post_init__(self):
        if not 0 < self.kappa < 8:
            raise DomainError(f"kappa = {self.kappa} outside (0, 8)")


@dataclass(frozen=True)
class KacIndex:
    r: int
    s: int

    def __post_init__(self):
        if int(self.r) != self.r or int(self.s) != self.s or self.r < 1 or self.s < 1:
            raise ParameterError(f"Kac indices must be positive integers, got ({self.r}, {self.s})")


def _k(k) -> Real:
    return (k if isinstance(k, SleKappa) else SleKappa(k)).kappa


def central_charge(k) -> Real:
    k = _k(k)
    return (6 - k) * (3 * k - 8) / (2 * k)


def one_leg_weight(k) -> Real:
    """Boundary weight of the operator that starts a single curve."""
    k = _k(k)
    return (6 - k) / (2 * k)


def s_leg_weight(s: int, k) -> Real:
    """Weight ``s(2s + 4 - kappa) / (2 kappa)``; ``s = 0`` is the identity."""
    if int(s) != s or s < 0:
        raise ParameterError(f"leg count must be a nonnegative integer, got {s}")
    k = _k(k)
    return s * (2 * s + 4 - k) / (2 * k)


def kac_weight(idx, k) -> Real:
    """Kac weight ``h_{r,s}``, branch chosen so that ``h_{1,2}`` (``kappa > 4``) or
    ``h_{2,1}`` (``kappa <= 4``) is the one-leg weight."""
    if not isinstance(idx, KacIndex):
        idx = KacIndex(*idx)
    k = _k(k)
    r, s = idx.r, idx.s
    lead = k * r - 4 * s if k > 4 else k * s - 4 * r
    return (lead * lead - (k - 4) ** 2) / (16 * k)


def potts_q(k, phase: str) -> float:
    """Potts Q for the dense (``4 <= kappa < 8``) or dilute (``0 < kappa <= 4``) branch."""
    k = _k(k)
    if phase == "dense":
        if not 4 <= k < 8:
            raise DomainError(f"dense phase needs 4 <= kappa < 8, got {k}")
        return 4.0 * math.cos(4.0 * math.pi / float(k)) ** 2
    if phase == "dilute":
        if not 0 < k <= 4:
            raise DomainError(f"dilute phase needs 0 < kappa <= 4, got {k}")
        return 4.0 * math.cos(math.pi * float(k) / 4.0) ** 2
    raise ParameterError(f"phase must be 'dense' or 'dilute', got {phase!r}")


def phase_of(k) -> str:
    """The branch used when a single Q is wanted; kappa = 4 counts as dilute."""
    return "dilute" if _k(k) <= 4 else "dense"


def summary(k) -> dict:
    """Every parameter defined at ``k``: c, weights up to four legs, Kac table up to 3x3, Q."""
    k = _k(k)
    out = {
        "kappa": k,
        "central_charge": central_charge(k),
        "one_leg_weight": one_leg_weight(k),
        "s_leg_weights": {str(s): s_leg_weight(s, k) for s in range(5)},
        "kac_weights": {f"{r},{s}": kac_weight((r, s), k) for r in range(1, 4) for s in range(1, 4)},
        "phase": phase_of(k),
        "potts_q": {},
    }
    for phase in ("dense", "dilute"):
        try:
            out["potts_q"][phase] = potts_q(k, phase)
        except DomainError:
            pass
    return out


# (model, kappa, central charge) for the curve models with known SLE limits.
# The last row sits at kappa = 8, outside the window handled by SleKappa.
KNOWN_CURVE_MODELS = (
    ("loop-erased random walk", Fraction(2), Fraction(-2)),
    ("self-avoiding random walk", Fraction(8, 3), Fraction(0)),
    ("Q=2 Potts spin cluster perimeters", Fraction(3), Fraction(1, 2)),
    ("Q=3 Potts spin cluster perimeters", Fraction(10, 3), Fraction(4, 5)),
    ("Q=4 Potts spin/FK cluster perimeters", Fraction(4), Fraction(1)),
    ("level line of a Gaussian free field", Fraction(4), Fraction(1)),
    ("harmonic explorer", Fraction(4), Fraction(1)),
    ("Q=3 Potts FK cluster perimeters", Fraction(24, 5), Fraction(4, 5)),
    ("Q=2 Potts FK cluster perimeters", Fraction(16, 3), Fraction(1, 2)),
    ("percolation, smart-kinetic walks", Fraction(6), Fraction(0)),
    ("uniform spanning trees", Fraction(8), Fraction(-2)),
)
