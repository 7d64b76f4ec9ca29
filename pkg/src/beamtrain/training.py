"""Exhaustive search and successive-rejects beam selection.

Both algorithms run on a :class:`TrainingEnvironment`, which only exposes the
beams through accumulators; the true gains are never consulted. Every call
simulates ``env.trials`` independent training runs at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .analysis import logbar_exact
from .errors import InsufficientBudgetError, InvalidArgumentError, InvalidStateError
from .statistic import AccumulatorBank, NoiseModel


@dataclass(frozen=True)
class PhaseSchedule:
    """Cumulative per-survivor symbol counts ``n_1 <= ... <= n_{L-1}``."""

    n: tuple[int, ...]
    l_beams: int
    budget: int

    @property
    def total(self) -> int:
        # the last two survivors both receive n_{L-1}
        return sum(self.n) + self.n[-1]


@dataclass
class TrainingEnvironment:
    bank: AccumulatorBank
    noise: NoiseModel
    rng: np.random.Generator
    budget: int

    @classmethod
    def create(cls, h_eff, noise: NoiseModel, budget: int, rng: np.random.Generator,
               trials: int = 1) -> "TrainingEnvironment":
        if trials < 1:
            raise InvalidArgumentError(f"trials must be >= 1, got {trials}")
        return cls(AccumulatorBank(h_eff, trials), noise, rng, int(budget))

    @property
    def l_beams(self) -> int:
        return self.bank.l_beams

    @property
    def trials(self) -> int:
        return self.bank.trials

    def symbols_used(self) -> np.ndarray:
        return self.bank.k.copy()

    def _check_budget(self):
        used = self.bank.k.sum(axis=1)
        if np.any(used > self.budget):
            raise InvalidStateError(f"consumed {used.max()} symbols with budget {self.budget}")


@dataclass
class TrainingResult:
    """Outcome per trial: arrays with a leading trial axis.

    ``discard_order`` has ``L - 1`` columns for the adaptive algorithm and
    none for exhaustive search.
    """

    selected: np.ndarray
    discard_order: np.ndarray
    symbols_used: np.ndarray
    stats: Optional[np.ndarray] = field(default=None, repr=False)


def _pick_random_extreme(values: np.ndarray, rng: np.random.Generator, lowest: bool) -> np.ndarray:
    """Column of the row-wise min (or max), ties broken uniformly at random."""
    ext = values.min(axis=1) if lowest else values.max(axis=1)
    hits = values == ext[:, None]
    pick = np.argmax(hits, axis=1)
    tied = np.flatnonzero(hits.sum(axis=1) > 1)
    if tied.size:
        keys = rng.random((tied.size, values.shape[1]))
        keys[~hits[tied]] = -1.0
        pick[tied] = np.argmax(keys, axis=1)
    return pick


def phase_schedule(budget: int, l_beams: int) -> PhaseSchedule:
    """``n_k = ceil((N - L) / (logbar(L) (L + 1 - k)))`` for ``k = 1..L-1``.

    Evaluated in exact rational arithmetic so that integral quotients never
    round up spuriously.
    """
    if int(l_beams) != l_beams or l_beams < 2:
        raise InvalidArgumentError(f"need at least two beams, got {l_beams!r}")
    if int(budget) != budget or budget < l_beams:
        raise InsufficientBudgetError(f"budget {budget} is below the beam count {l_beams}")
    lb = logbar_exact(l_beams)
    n = tuple(
        math.ceil((budget - l_beams) / (lb * (l_beams + 1 - k))) for k in range(1, l_beams)
    )
    schedule = PhaseSchedule(n, l_beams, budget)
    if schedule.total > budget:
        raise InvalidStateError(f"schedule {n} spends {schedule.total} > budget {budget}")
    return schedule


def run_exhaustive(env: TrainingEnvironment) -> TrainingResult:
    """Give every beam ``floor(N / L)`` symbols and select the largest statistic."""
    per_beam = env.budget // env.l_beams
    if per_beam < 1:
        raise InsufficientBudgetError(f"budget {env.budget} is below the beam count {env.l_beams}")
    env.bank.absorb(per_beam, env.noise, env.rng)
    env._check_budget()
    stats = env.bank.statistic(env.noise)
    selected = _pick_random_extreme(stats, env.rng, lowest=False)
    return TrainingResult(
        selected=selected,
        discard_order=np.empty((env.trials, 0), dtype=np.int64),
        symbols_used=env.symbols_used(),
        stats=stats,
    )


PhaseHook = Callable[[int, np.ndarray, TrainingEnvironment], None]


def run_adaptive(env: TrainingEnvironment, schedule: PhaseSchedule,
                 on_phase: PhaseHook | None = None) -> TrainingResult:
    """Successive rejects over ``L - 1`` phases.

    In phase ``k`` every surviving beam receives ``n_k - n_{k-1}`` more
    symbols, then the survivor with the smallest cumulative statistic is
    dropped. Beams that have never received a symbol rank below everything.
    ``on_phase(k, survivors, env)`` is called after absorption and before the
    rejection of phase ``k``.
    """
    if schedule.l_beams != env.l_beams or schedule.budget != env.budget:
        raise InvalidArgumentError(
            f"schedule is for L={schedule.l_beams}, N={schedule.budget}; "
            f"environment has L={env.l_beams}, N={env.budget}"
        )
    trials, l_beams = env.trials, env.l_beams
    alive = np.tile(np.arange(l_beams), (trials, 1))
    discards = np.empty((trials, l_beams - 1), dtype=np.int64)
    rows = np.arange(trials)
    prev = 0
    for k, n_k in enumerate(schedule.n, start=1):
        env.bank.absorb(n_k - prev, env.noise, env.rng, beams=alive)
        prev = n_k
        env._check_budget()
        if on_phase is not None:
            on_phase(k, alive, env)
        stats = env.bank.statistic(env.noise, beams=alive)
        col = _pick_random_extreme(stats, env.rng, lowest=True)
        discards[:, k - 1] = alive[rows, col]
        keep = np.ones(alive.shape, dtype=bool)
        keep[rows, col] = False
        alive = alive[keep].reshape(trials, -1)
    return TrainingResult(
        selected=alive[:, 0].copy(),
        discard_order=discards,
        symbols_used=env.symbols_used(),
    )
