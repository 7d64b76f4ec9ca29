"""Suboptimality gaps, hardness and asymptotic error exponents.

All quantities are computed from the exact normalized gains
``xi_l = 2 P_T g_l / sigma2``; nothing here looks at samples.
Beam indices are 0-based; ranks (the ``l`` in ``l * Delta_(l)^-2``) are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DegenerateProfileError, InvalidArgumentError

# relative tolerance under which the two strongest beams count as tied
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class GapProfile:
    """Gap structure of a beam set.

    ``delta[l] = sqrt(xi_opt) - sqrt(xi_l)`` (zero for the optimum itself).
    ``order`` lists beam indices by descending ``xi``, optimum first, equal
    values by ascending index. ``ordered_gaps[r]`` is the gap of the beam of
    rank ``r + 1`` with the rank-1 entry set equal to the rank-2 gap.
    """

    xi: np.ndarray
    opt_index: int
    delta: np.ndarray
    order: np.ndarray
    delta_min: float
    second_best: int
    degenerate: bool

    @property
    def l_beams(self) -> int:
        return self.xi.shape[0]

    @property
    def ordered_gaps(self) -> np.ndarray:
        gaps = self.delta[self.order].copy()
        gaps[0] = gaps[1]
        return gaps

    def require_nondegenerate(self) -> None:
        if self.degenerate:
            raise DegenerateProfileError(
                f"beams {self.opt_index} and {self.second_best} tie for the maximum gain; "
                "minimal gap is zero and hardness is infinite"
            )


@dataclass(frozen=True)
class HardnessSummary:
    h_value: float
    l_h: int
    logbar: float
    l_beams: int


def gap_profile(xi) -> GapProfile:
    xi = np.array(xi, dtype=float)
    if xi.ndim != 1 or xi.shape[0] < 2:
        raise InvalidArgumentError("need at least two beams")
    if np.any(xi < 0) or not np.all(np.isfinite(xi)):
        raise InvalidArgumentError("normalized gains must be finite and nonnegative")
    order = np.argsort(-xi, kind="stable")
    opt, second = int(order[0]), int(order[1])
    root = np.sqrt(xi)
    delta = root[opt] - root
    delta_min = float(delta[second])
    degenerate = bool(np.isclose(xi[second], xi[opt], rtol=TIE_RTOL, atol=0.0))
    for arr in (xi, delta, order):
        arr.setflags(write=False)
    return GapProfile(xi, opt, delta, order, delta_min, second, degenerate)


@lru_cache(maxsize=None)
def logbar_exact(l_beams: int) -> Fraction:
    if int(l_beams) != l_beams or l_beams < 2:
        raise InvalidArgumentError(f"logbar needs l_beams >= 2, got {l_beams!r}")
    return Fraction(1, 2) + sum((Fraction(1, i) for i in range(2, l_beams + 1)), Fraction(0))


def logbar(l_beams: int) -> float:
    """``1/2 + sum_{i=2}^{L} 1/i``."""
    return float(logbar_exact(l_beams))


def hardness(profile: GapProfile) -> HardnessSummary:
    profile.require_nondegenerate()
    ranks = np.arange(1, profile.l_beams + 1)
    terms = ranks / profile.ordered_gaps**2
    i = int(np.argmax(terms))
    return HardnessSummary(float(terms[i]), i + 1, logbar(profile.l_beams), profile.l_beams)


def exponent_exhaustive(profile: GapProfile, l_beams: int | None = None) -> float:
    """Rate of ``log p_miss / N`` for uniform allocation: ``-Delta_min^2 / (4 L)``."""
    profile.require_nondegenerate()
    l_beams = profile.l_beams if l_beams is None else l_beams
    return -profile.delta_min**2 / (4.0 * l_beams)


def exponent_pairwise(delta: float) -> float:
    if not delta > 0:
        raise InvalidArgumentError(f"gap must be > 0, got {delta!r}")
    return -delta**2 / 4.0


def exponent_adaptive_bound(summary: HardnessSummary) -> float:
    """Upper bound ``-1 / (4 logbar(L) H)`` on the successive-rejects rate."""
    return -1.0 / (4.0 * summary.logbar * summary.h_value)


def adaptive_dominates(profile: GapProfile) -> bool:
    """True when ``logbar(L) H < L Delta_min^-2``, i.e. the adaptive bound beats uniform search."""
    summary = hardness(profile)
    return summary.logbar * summary.h_value < profile.l_beams / profile.delta_min**2
