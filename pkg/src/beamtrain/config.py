"""Experiment configuration: a flat YAML mapping with list values.

Only ``trials`` and ``master_seed`` are required; everything else defaults to
the 64-beam scenario (``phi = 0.47``, ``alpha = 1``, ``N = 1280``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .errors import BeamTrainingError
from .montecarlo import ALGORITHMS

PRESETS = ("fig3", "fig4", "fig5")
# stream id for drawing a random AoA from the master seed
_PHI_STREAM = 0x5EED


class ConfigError(BeamTrainingError, ValueError):
    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.violations))


@dataclass(frozen=True)
class ExperimentConfig:
    trials: int
    master_seed: int
    l_beams: int = 64
    phi: float | str = 0.47
    alpha: complex = 1.0
    snr_db: tuple[float, ...] = (-2.0,)
    budget: tuple[int, ...] = (1280,)
    algorithms: tuple[str, ...] = ALGORITHMS
    output_path: str = "results.csv"
    workers: int = 1

    def resolved_phi(self) -> float:
        if self.phi == "random":
            rng = np.random.default_rng([self.master_seed, _PHI_STREAM])
            return float(rng.uniform(-math.pi / 2, math.pi / 2))
        return float(self.phi)


_REQUIRED = ("trials", "master_seed")
_KNOWN = {"trials", "master_seed", "l_beams", "phi", "alpha", "snr_db", "budget",
          "algorithms", "output_path", "workers"}


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_real(v) -> bool:
    return (_is_int(v) or isinstance(v, float)) and math.isfinite(v)


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a YAML document, reporting every violation at once."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"not valid YAML: {exc}"]) from exc
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError([f"top level must be a mapping, got {type(doc).__name__}"])

    bad: list[str] = []
    out: dict = {}
    for key in doc:
        if key not in _KNOWN:
            bad.append(f"{key}: unknown key")
    for key in _REQUIRED:
        if key not in doc:
            bad.append(f"{key}: required key is missing")

    def positive_int(key, minimum=1):
        if key not in doc:
            return
        v = doc[key]
        if not _is_int(v):
            bad.append(f"{key}: expected integer, got {v!r}")
        elif v < minimum:
            bad.append(f"{key}: must be >= {minimum}, got {v}")
        else:
            out[key] = v

    positive_int("trials")
    positive_int("master_seed", minimum=0)
    positive_int("l_beams", minimum=2)
    positive_int("workers")

    if "phi" in doc:
        v = doc["phi"]
        if v == "random":
            out["phi"] = v
        elif not _is_real(v):
            bad.append(f"phi: expected number or 'random', got {v!r}")
        elif abs(v) > math.pi / 2:
            bad.append(f"phi: must lie in [-pi/2, pi/2], got {v}")
        else:
            out["phi"] = float(v)

    if "alpha" in doc:
        v = doc["alpha"]
        try:
            if isinstance(v, bool) or not isinstance(v, (int, float, str)):
                raise ValueError
            alpha = complex(v.replace(" ", "")) if isinstance(v, str) else complex(v)
            if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
                raise ValueError
            out["alpha"] = alpha.real if alpha.imag == 0 else alpha
        except ValueError:
            bad.append(f"alpha: expected a number such as 1 or '1+0.5j', got {v!r}")

    def number_list(key, check, kind, convert):
        if key not in doc:
            return
        values = _as_list(doc[key])
        if not values:
            bad.append(f"{key}: must not be empty")
            return
        good = True
        for i, v in enumerate(values):
            if not check(v):
                bad.append(f"{key}[{i}]: expected {kind}, got {v!r}")
                good = False
        if good:
            out[key] = tuple(convert(v) for v in values)

    number_list("snr_db", _is_real, "number", float)
    number_list("budget", lambda v: _is_int(v) and v >= 1, "positive integer", int)

    if "algorithms" in doc:
        values = _as_list(doc["algorithms"])
        unknown = [v for v in values if v not in ALGORITHMS]
        if not values:
            bad.append("algorithms: must not be empty")
        elif unknown:
            bad.append(f"algorithms: unsupported {unknown}; supported are {list(ALGORITHMS)}")
        else:
            out["algorithms"] = tuple(dict.fromkeys(values))

    if "output_path" in doc:
        v = doc["output_path"]
        if isinstance(v, str) and v:
            out["output_path"] = v
        else:
            bad.append(f"output_path: expected non-empty string, got {v!r}")

    l_beams = out.get("l_beams", 64)
    for i, n in enumerate(out.get("budget", ())):
        if n < l_beams:
            bad.append(f"budget[{i}]: {n} is below l_beams={l_beams}")

    if bad:
        raise ConfigError(bad)
    return ExperimentConfig(**out)


def load_config(source: str | Path) -> ExperimentConfig:
    """Read a config file, or a bundled preset by name (``fig3``, ``fig4``, ``fig5``)."""
    path = Path(source)
    if not path.exists() and str(source) in PRESETS:
        text = resources.files("beamtrain").joinpath(f"presets/{source}.yaml").read_text()
    else:
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError([f"cannot read {path}: {exc.strerror or exc}"]) from exc
    return parse_config(text)
