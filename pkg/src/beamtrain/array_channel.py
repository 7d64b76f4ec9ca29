"""Uniform linear array geometry, single-path channel and DFT codebook.

Conventions: receive beams are row vectors ``f_l`` of length ``N_R`` and the
channel is the column ``h = alpha * u(phi)^H``, so the effective channel of a
beam is the plain product ``f_l @ h`` with no extra conjugation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

HALF_PI = math.pi / 2


def _check_phi(phi: float) -> None:
    if not np.isfinite(phi) or abs(phi) > HALF_PI:
        raise InvalidArgumentError(f"AoA phi={phi!r} outside [-pi/2, pi/2]")


def _check_count(n: int, name: str) -> None:
    if int(n) != n or n < 1:
        raise InvalidArgumentError(f"{name} must be a positive integer, got {n!r}")


@dataclass(frozen=True)
class SteeringVector:
    entries: np.ndarray
    phi: float

    @property
    def n_antennas(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class ChannelVector:
    entries: np.ndarray
    alpha: complex
    phi: float


@dataclass(frozen=True)
class BeamCodebook:
    """Ordered receive beams, one row per beam."""

    beams: np.ndarray
    theta: np.ndarray

    @property
    def l_beams(self) -> int:
        return self.beams.shape[0]

    @property
    def n_antennas(self) -> int:
        return self.beams.shape[1]

    def permuted(self, order) -> "BeamCodebook":
        order = np.asarray(order)
        return BeamCodebook(self.beams[order], self.theta[order])


@dataclass(frozen=True)
class GainProfile:
    gains: np.ndarray
    opt_index: int

    @property
    def l_beams(self) -> int:
        return self.gains.shape[0]


def steering_vector(phi: float, n_antennas: int) -> SteeringVector:
    """ULA response with half-wavelength spacing: ``exp(j*pi*k*sin(phi))``."""
    _check_phi(phi)
    _check_count(n_antennas, "n_antennas")
    k = np.arange(n_antennas)
    entries = np.exp(1j * np.pi * k * np.sin(phi))
    entries.setflags(write=False)
    return SteeringVector(entries, float(phi))


def channel_vector(alpha: complex, phi: float, n_antennas: int) -> ChannelVector:
    u = steering_vector(phi, n_antennas)
    entries = alpha * np.conj(u.entries)
    entries.setflags(write=False)
    return ChannelVector(entries, complex(alpha), float(phi))


def dft_codebook(l_beams: int) -> BeamCodebook:
    """DFT codebook with ``N_R = L_R`` and grid ``theta_l = -1/2 + l/L_R`` (0-based l)."""
    _check_count(l_beams, "l_beams")
    theta = -0.5 + np.arange(l_beams) / l_beams
    k = np.arange(l_beams)
    beams = np.exp(-2j * np.pi * np.outer(theta, k)) / math.sqrt(l_beams)
    beams.setflags(write=False)
    theta.setflags(write=False)
    return BeamCodebook(beams, theta)


def project(codebook: BeamCodebook, channel: ChannelVector) -> np.ndarray:
    """Per-beam effective channel ``h_l = f_l @ h``."""
    if channel.entries.shape[0] != codebook.n_antennas:
        raise InvalidArgumentError(
            f"channel has {channel.entries.shape[0]} antennas, "
            f"codebook expects {codebook.n_antennas}"
        )
    return codebook.beams @ channel.entries


def effective_channels(codebook: BeamCodebook, alpha: complex, phi: float) -> np.ndarray:
    return project(codebook, channel_vector(alpha, phi, codebook.n_antennas))


def effective_gains(codebook: BeamCodebook, alpha: complex, phi: float) -> GainProfile:
    _check_phi(phi)
    gains = np.abs(effective_channels(codebook, alpha, phi)) ** 2
    gains.setflags(write=False)
    # np.argmax returns the first maximum, i.e. lowest index on ties
    return GainProfile(gains, int(np.argmax(gains)))
