"""Experiment execution and CSV/text reporting."""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from . import analysis
from .config import ExperimentConfig
from .errors import BeamTrainingError, InsufficientDataError
from .montecarlo import Scenario, fit_exponent, simulate, block_rng, sweep
from .statistic import normalized_gain


@dataclass(frozen=True)
class ResultRow:
    """One (algorithm, SNR, budget) cell; numeric fields are None for failed cells."""

    algorithm: str
    snr_db: float
    budget: int
    p_hat: Optional[float]
    ci_low: Optional[float]
    ci_high: Optional[float]
    trials: int
    theory_exponent: Optional[float]
    error: str = ""


CSV_COLUMNS = tuple(f.name for f in fields(ResultRow))


def scenarios_for(config: ExperimentConfig) -> list[Scenario]:
    phi = config.resolved_phi()
    return [
        Scenario(config.l_beams, config.alpha, phi, snr, n, alg)
        for alg, snr, n in itertools.product(
            sorted(config.algorithms), sorted(config.snr_db), sorted(config.budget)
        )
    ]


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> list[ResultRow]:
    scenarios = scenarios_for(config)
    result = sweep(scenarios, config.trials, config.master_seed,
                   workers=config.workers if workers is None else workers, keep_going=True)
    rows = []
    for i, (sc, est) in enumerate(zip(scenarios, result.estimates)):
        try:
            theory = sc.theory_exponent()
        except BeamTrainingError:
            theory = None
        if est is None:
            rows.append(ResultRow(sc.algorithm, sc.snr_db, sc.budget, None, None, None,
                                  config.trials, theory, result.errors[i]))
        else:
            rows.append(ResultRow(sc.algorithm, sc.snr_db, sc.budget, est.p_hat, est.ci_low,
                                  est.ci_high, est.trials, theory))
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(rows: Iterable[ResultRow], path) -> None:
    """Write rows sorted by (algorithm, snr_db, budget) with round-trippable floats."""
    ordered = sorted(rows, key=lambda r: (r.algorithm, r.snr_db, r.budget))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in ordered:
        writer.writerow([_fmt(v) for v in astuple(row)])
    path = Path(path)
    try:
        path.write_text(buf.getvalue())
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _opt_float(s: str) -> Optional[float]:
    return float(s) if s else None


def read_csv(path) -> list[ResultRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            ResultRow(
                algorithm=r["algorithm"],
                snr_db=float(r["snr_db"]),
                budget=int(r["budget"]),
                p_hat=_opt_float(r["p_hat"]),
                ci_low=_opt_float(r["ci_low"]),
                ci_high=_opt_float(r["ci_high"]),
                trials=int(r["trials"]),
                theory_exponent=_opt_float(r["theory_exponent"]),
                error=r["error"],
            )
            for r in reader
        ]


def summarize(rows: list[ResultRow]) -> str:
    """Per (algorithm, SNR): estimates, fitted slope over budgets, and the theory line."""
    lines = []
    key = lambda r: (r.algorithm, r.snr_db)
    for (alg, snr), group in itertools.groupby(sorted(rows, key=lambda r: (*key(r), r.budget)), key):
        group = list(group)
        theory = group[0].theory_exponent
        lines.append(f"{alg} @ {snr:g} dB   theory exponent: "
                     + ("n/a" if theory is None else f"{theory:.4e}"))
        for r in group:
            if r.error:
                lines.append(f"  N={r.budget:<7d} error: {r.error}")
            else:
                lines.append(f"  N={r.budget:<7d} p_hat={r.p_hat:.4e}  "
                             f"95% CI [{r.ci_low:.4e}, {r.ci_high:.4e}]  trials={r.trials}")
        usable = [(r.budget, r) for r in group if not r.error]
        if len(usable) >= 2:
            try:
                fit = fit_exponent(usable)
                lines.append(f"  fitted slope: {fit.slope:.4e} over {len(fit.points)} points"
                             + (f" (p_hat=0 at N={list(fit.excluded)})" if fit.excluded else ""))
            except InsufficientDataError as exc:
                lines.append(f"  fitted slope: n/a ({exc})")
    return "\n".join(lines)


def gains_table(config: ExperimentConfig) -> list[dict]:
    """Per-beam gain and the allocation of one adaptive run (first SNR and budget)."""
    sc = Scenario(config.l_beams, config.alpha, config.resolved_phi(),
                  sorted(config.snr_db)[0], sorted(config.budget)[0], "adaptive")
    profile = sc.gain_profile()
    rng = block_rng(config.master_seed, sc.key(), 0)
    result = simulate(sc, 1, rng)
    xi = normalized_gain(sc.noise(), profile.gains)
    discard_rank = np.empty(sc.l_beams, dtype=int)
    discard_rank[result.discard_order[0]] = np.arange(1, sc.l_beams)
    discard_rank[result.selected[0]] = sc.l_beams
    theta = -0.5 + np.arange(sc.l_beams) / sc.l_beams
    return [
        {"beam": l, "theta": float(theta[l]), "gain": float(profile.gains[l]), "xi": float(xi[l]),
         "symbols_used": int(result.symbols_used[0, l]), "elimination_rank": int(discard_rank[l]),
         "optimal": int(l == profile.opt_index)}
        for l in range(sc.l_beams)
    ]


def exponent_tables(config: ExperimentConfig) -> tuple[list[dict], list[dict]]:
    """Analysis-only view: one summary row per SNR and the per-beam gap profile."""
    phi = config.resolved_phi()
    summary, per_beam = [], []
    for snr in sorted(config.snr_db):
        sc = Scenario(config.l_beams, config.alpha, phi, snr, config.budget[0], "adaptive")
        gaps = sc.gaps()
        row = {"snr_db": snr, "l_beams": sc.l_beams, "opt_index": gaps.opt_index,
               "second_best": gaps.second_best, "delta_min": gaps.delta_min,
               "hardness": None, "l_h": None, "logbar": analysis.logbar(sc.l_beams),
               "exponent_exhaustive": None, "exponent_adaptive_bound": None,
               "adaptive_dominates": None, "error": ""}
        if gaps.degenerate:
            row["error"] = "degenerate: tied strongest beams"
        else:
            h = analysis.hardness(gaps)
            row.update(hardness=h.h_value, l_h=h.l_h,
                       exponent_exhaustive=analysis.exponent_exhaustive(gaps),
                       exponent_adaptive_bound=analysis.exponent_adaptive_bound(h),
                       adaptive_dominates=analysis.adaptive_dominates(gaps))
        summary.append(row)
        rank = np.empty(sc.l_beams, dtype=int)
        rank[gaps.order] = np.arange(1, sc.l_beams + 1)
        for l in range(sc.l_beams):
            per_beam.append({"snr_db": snr, "beam": l, "rank": int(rank[l]),
                             "xi": float(gaps.xi[l]), "delta": float(gaps.delta[l])})
    return summary, per_beam


def dict_rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows({k: _fmt(v) for k, v in r.items()} for r in rows)
    return buf.getvalue()
