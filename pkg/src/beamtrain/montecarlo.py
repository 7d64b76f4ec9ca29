"""Reproducible Monte Carlo estimation of misalignment probability.

Trials of a scenario are split into fixed blocks of ``BLOCK_TRIALS``. Block
``b`` draws from a random stream keyed by ``(seed, scenario key, b)``, where
the scenario key is a digest of the scenario's fields. Blocks are the unit of
parallel work and their misalignment counts are summed, so an estimate only
depends on ``(scenario, trials, seed)``: not on worker count, scheduling, or
the position of the scenario inside a sweep.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from statistics import NormalDist
from typing import Sequence

import numpy as np

from . import analysis
from .array_channel import GainProfile, dft_codebook, effective_channels, effective_gains
from .errors import InsufficientDataError, InvalidArgumentError
from .statistic import NoiseModel, normalized_gain
from .training import TrainingEnvironment, TrainingResult, phase_schedule, run_adaptive, run_exhaustive

ALGORITHMS = ("exhaustive", "adaptive")
BLOCK_TRIALS = 4096
_Z95 = NormalDist().inv_cdf(0.975)


@dataclass(frozen=True)
class Scenario:
    l_beams: int = 64
    alpha: complex = 1.0
    phi: float = 0.47
    snr_db: float = -2.0
    budget: int = 1280
    algorithm: str = "adaptive"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise InvalidArgumentError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if self.l_beams < 2:
            raise InvalidArgumentError(f"l_beams must be >= 2, got {self.l_beams}")

    def noise(self) -> NoiseModel:
        return NoiseModel.from_snr_db(self.snr_db)

    def gain_profile(self) -> GainProfile:
        return _gains(self.l_beams, self.alpha, self.phi)

    def effective_channels(self) -> np.ndarray:
        return _channels(self.l_beams, self.alpha, self.phi)

    def gaps(self) -> analysis.GapProfile:
        return analysis.gap_profile(normalized_gain(self.noise(), self.gain_profile().gains))

    def theory_exponent(self) -> float:
        """Exhaustive-search rate, or the successive-rejects bound."""
        gaps = self.gaps()
        if self.algorithm == "exhaustive":
            return analysis.exponent_exhaustive(gaps)
        return analysis.exponent_adaptive_bound(analysis.hardness(gaps))

    def key(self) -> int:
        text = f"{self.l_beams}|{complex(self.alpha)!r}|{float(self.phi)!r}|" \
               f"{float(self.snr_db)!r}|{int(self.budget)}|{self.algorithm}"
        return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "little")


@lru_cache(maxsize=64)
def _gains(l_beams: int, alpha: complex, phi: float) -> GainProfile:
    return effective_gains(dft_codebook(l_beams), alpha, phi)


@lru_cache(maxsize=64)
def _channels(l_beams: int, alpha: complex, phi: float) -> np.ndarray:
    h = effective_channels(dft_codebook(l_beams), alpha, phi)
    h.setflags(write=False)
    return h


@dataclass(frozen=True)
class MisalignmentEstimate:
    p_hat: float
    trials: int
    ci_low: float
    ci_high: float
    seed: int
    misaligned: int


@dataclass(frozen=True)
class SlopeFit:
    points: tuple[tuple[int, float], ...]
    slope: float
    intercept: float
    residual: float
    excluded: tuple[int, ...] = ()


@dataclass
class SweepResult:
    scenarios: list[Scenario]
    estimates: list[MisalignmentEstimate | None]
    errors: dict[int, str] = field(default_factory=dict)


def wilson_interval(successes: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    if trials < 1:
        raise InvalidArgumentError("trials must be >= 1")
    p = successes / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    # clamp so the interval always brackets p_hat despite rounding
    return max(0.0, min(centre - half, p)), min(1.0, max(centre + half, p))


def block_rng(seed: int, key: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence([seed, key & 0xFFFFFFFF, key >> 32, block])
    return np.random.Generator(np.random.PCG64(ss))


def _blocks(trials: int) -> list[tuple[int, int]]:
    n_full, rest = divmod(trials, BLOCK_TRIALS)
    out = [(b, BLOCK_TRIALS) for b in range(n_full)]
    if rest:
        out.append((n_full, rest))
    return out


def simulate(scenario: Scenario, trials: int, rng: np.random.Generator,
             noise: NoiseModel | None = None) -> TrainingResult:
    """Run ``trials`` training runs of ``scenario`` on one random stream."""
    noise = scenario.noise() if noise is None else noise
    env = TrainingEnvironment.create(scenario.effective_channels(), noise, scenario.budget, rng, trials)
    if scenario.algorithm == "exhaustive":
        return run_exhaustive(env)
    return run_adaptive(env, phase_schedule(scenario.budget, scenario.l_beams))


def _count_block(scenario: Scenario, seed: int, block: int, size: int) -> int:
    rng = block_rng(seed, scenario.key(), block)
    result = simulate(scenario, size, rng)
    return int(np.count_nonzero(result.selected != scenario.gain_profile().opt_index))


def _count_block_task(args) -> int:
    return _count_block(*args)


def _estimate(trials: int, seed: int, misaligned: int) -> MisalignmentEstimate:
    lo, hi = wilson_interval(misaligned, trials)
    return MisalignmentEstimate(misaligned / trials, trials, lo, hi, seed, misaligned)


def _check(scenario: Scenario, allow_degenerate: bool) -> None:
    if not allow_degenerate:
        scenario.gaps().require_nondegenerate()
    if scenario.budget < scenario.l_beams:
        # surfaces InsufficientBudgetError before any trial runs
        phase_schedule(scenario.budget, scenario.l_beams)


def sweep(scenarios: Sequence[Scenario], trials: int, seed: int, workers: int = 1,
          allow_degenerate: bool = False, keep_going: bool = False) -> SweepResult:
    """Estimate every scenario. With ``keep_going`` failing scenarios are
    recorded in ``errors`` instead of raising."""
    scenarios = list(scenarios)
    if not scenarios:
        raise InvalidArgumentError("sweep needs at least one scenario")
    if trials < 1:
        raise InvalidArgumentError(f"trials must be >= 1, got {trials}")
    if seed < 0:
        raise InvalidArgumentError(f"seed must be >= 0, got {seed}")
    errors: dict[int, str] = {}
    tasks, owners = [], []
    for i, sc in enumerate(scenarios):
        try:
            _check(sc, allow_degenerate)
        except Exception as exc:
            if not keep_going:
                raise type(exc)(f"scenario {i} ({sc}): {exc}") from exc
            errors[i] = f"{type(exc).__name__}: {exc}"
            continue
        for block, size in _blocks(trials):
            tasks.append((sc, seed, block, size))
            owners.append(i)
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(_count_block_task, tasks))
    else:
        counts = [_count_block_task(t) for t in tasks]
    totals = [0] * len(scenarios)
    for i, c in zip(owners, counts):
        totals[i] += c
    estimates = [None if i in errors else _estimate(trials, seed, totals[i])
                 for i in range(len(scenarios))]
    return SweepResult(scenarios, estimates, errors)


def estimate_misalignment(scenario: Scenario, trials: int, seed: int, workers: int = 1,
                          allow_degenerate: bool = False) -> MisalignmentEstimate:
    return sweep([scenario], trials, seed, workers, allow_degenerate).estimates[0]


def fit_exponent(estimates) -> SlopeFit:
    """Least-squares slope of ``ln p_hat`` against the budget ``N``.

    ``estimates`` is a sequence of ``(budget, MisalignmentEstimate)`` pairs;
    points with ``p_hat == 0`` are excluded and listed in ``excluded``.
    """
    points, excluded = [], []
    for budget, est in estimates:
        if est.p_hat > 0:
            points.append((int(budget), math.log(est.p_hat)))
        else:
            excluded.append(int(budget))
    if len(points) < 2:
        raise InsufficientDataError(f"need >= 2 points with p_hat > 0, got {len(points)}")
    x = np.array([p[0] for p in points], dtype=float)
    y = np.array([p[1] for p in points])
    if np.ptp(x) == 0:
        raise InsufficientDataError("all usable points share one budget")
    (slope, intercept), res, *_ = np.polyfit(x, y, 1, full=True)
    residual = float(res[0]) if res.size else 0.0
    return SlopeFit(tuple(points), float(slope), float(intercept), residual, tuple(excluded))
