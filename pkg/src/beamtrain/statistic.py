"""Matched-filter processing output of a training beam.

A beam that has received ``K`` identical training symbols of power ``P_T``
through effective channel ``h_l`` has matched-filter sum

    m = y_l s^H = h_l K P_T + w,   w ~ CN(0, sigma2 K P_T)

and statistic ``T = 2|m|^2 / (sigma2 K P_T)``, a non-central chi-square
variable with two degrees of freedom and non-centrality ``2 K P_T g / sigma2``.
Because ``m`` is linear in the per-symbol noise, a batch of ``n`` new symbols
is absorbed with one aggregated complex Gaussian draw.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, InvalidStateError


@dataclass(frozen=True)
class NoiseModel:
    """Receiver noise power and per-symbol transmit power.

    ``noisy=False`` suppresses the noise draws while keeping ``sigma2`` as the
    normalizer of the statistic; used for deterministic checks.
    """

    sigma2: float = 1.0
    p_t: float = 1.0
    noisy: bool = True

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise InvalidArgumentError(f"sigma2 must be > 0, got {self.sigma2!r}")
        if not self.p_t > 0:
            raise InvalidArgumentError(f"p_t must be > 0, got {self.p_t!r}")

    @classmethod
    def from_snr_db(cls, snr_db: float, noisy: bool = True) -> "NoiseModel":
        """sigma2 = 1 and P_T = 10^(snr_db/10)."""
        return cls(sigma2=1.0, p_t=10.0 ** (snr_db / 10.0), noisy=noisy)


@dataclass
class BeamAccumulator:
    h_eff: complex
    m: complex = 0j
    k: int = 0


@dataclass(frozen=True)
class TestStatistic:
    __test__ = False  # not a pytest class

    value: float
    k: int


def noncentrality(k_symbols: int, noise: NoiseModel, gain: float) -> float:
    if k_symbols < 0:
        raise InvalidArgumentError(f"k_symbols must be >= 0, got {k_symbols}")
    return 2.0 * k_symbols * noise.p_t * gain / noise.sigma2


def normalized_gain(noise: NoiseModel, gain):
    """Per-symbol non-centrality ``xi = 2 P_T g / sigma2``; works on arrays."""
    xi = 2.0 * noise.p_t * np.asarray(gain, dtype=float) / noise.sigma2
    return float(xi) if xi.ndim == 0 else xi


def sample_ncx2_2dof(lam, rng: np.random.Generator, size=None):
    """Draw ``(G1 + sqrt(lam))^2 + G2^2`` with independent standard normals."""
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr < 0) or not np.all(np.isfinite(lam_arr)):
        raise InvalidArgumentError(f"non-centrality must be finite and >= 0, got {lam!r}")
    if size is None:
        shape = lam_arr.shape
    else:
        shape = np.broadcast_shapes(lam_arr.shape, (size,) if np.isscalar(size) else tuple(size))
    g = rng.standard_normal((2,) + shape)
    out = (g[0] + np.sqrt(lam_arr)) ** 2 + g[1] ** 2
    return float(out) if out.ndim == 0 else out


def absorb_symbols(
    acc: BeamAccumulator, n_new: int, noise: NoiseModel, rng: np.random.Generator
) -> BeamAccumulator:
    """Receive ``n_new`` more symbols on ``acc`` in place and return it."""
    if n_new < 0:
        raise InvalidArgumentError(f"n_new must be >= 0, got {n_new}")
    if n_new == 0:
        return acc
    acc.m += acc.h_eff * n_new * noise.p_t
    if noise.noisy:
        scale = np.sqrt(noise.sigma2 * n_new * noise.p_t / 2.0)
        re, im = rng.standard_normal(2) * scale
        acc.m += complex(re, im)
    acc.k += n_new
    return acc


def statistic(acc: BeamAccumulator, noise: NoiseModel) -> TestStatistic:
    if acc.k < 1:
        raise InvalidStateError("statistic is undefined before any symbol is received")
    value = 2.0 * abs(acc.m) ** 2 / (noise.sigma2 * acc.k * noise.p_t)
    return TestStatistic(value, acc.k)


class AccumulatorBank:
    """``BeamAccumulator`` state for a batch of independent trials.

    Arrays have shape ``(trials, l_beams)``; every cell evolves exactly like a
    scalar accumulator. Beams are addressed per trial by integer index arrays
    so survivors of an elimination run can be updated without touching the
    discarded ones.
    """

    def __init__(self, h_eff: np.ndarray, trials: int):
        self.h_eff = np.asarray(h_eff, dtype=complex)
        self.m = np.zeros((trials, self.h_eff.shape[0]), dtype=complex)
        self.k = np.zeros((trials, self.h_eff.shape[0]), dtype=np.int64)

    @property
    def trials(self) -> int:
        return self.m.shape[0]

    @property
    def l_beams(self) -> int:
        return self.m.shape[1]

    def absorb(self, n_new: int, noise: NoiseModel, rng: np.random.Generator, beams=None):
        """Add ``n_new`` symbols to ``beams`` (``(trials, b)`` indices; all beams if None)."""
        if n_new < 0:
            raise InvalidArgumentError(f"n_new must be >= 0, got {n_new}")
        if n_new == 0:
            return
        if beams is None:
            beams = np.broadcast_to(np.arange(self.l_beams), self.m.shape)
        rows = np.arange(self.trials)[:, None]
        delta = self.h_eff[beams] * (n_new * noise.p_t)
        if noise.noisy:
            scale = np.sqrt(noise.sigma2 * n_new * noise.p_t / 2.0)
            g = rng.standard_normal((2,) + beams.shape)
            delta = delta + scale * (g[0] + 1j * g[1])
        self.m[rows, beams] += delta
        self.k[rows, beams] += n_new

    def statistic(self, noise: NoiseModel, beams=None) -> np.ndarray:
        """Current statistics; cells with no symbols yet read ``-inf``."""
        if beams is None:
            m, k = self.m, self.k
        else:
            rows = np.arange(self.trials)[:, None]
            m, k = self.m[rows, beams], self.k[rows, beams]
        out = np.full(m.shape, -np.inf)
        seen = k > 0
        out[seen] = 2.0 * np.abs(m[seen]) ** 2 / (noise.sigma2 * k[seen] * noise.p_t)
        return out

    def accumulator(self, trial: int, beam: int) -> BeamAccumulator:
        """Snapshot of one cell as a scalar accumulator."""
        return BeamAccumulator(
            complex(self.h_eff[beam]), complex(self.m[trial, beam]), int(self.k[trial, beam])
        )
