"""Command line entry point: ``beamtrain {run,gains,exponents} CONFIG``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import report
from .config import PRESETS, load_config
from .errors import BeamTrainingError


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="beamtrain", description="mmWave beam training experiments.")
    sub = p.add_subparsers(dest="cmd", required=True)
    cfg_help = f"YAML config file, or a bundled preset: {', '.join(PRESETS)}"

    r = sub.add_parser("run", help="Monte Carlo sweep; writes CSV and prints a summary.")
    r.add_argument("config", help=cfg_help)
    r.add_argument("--workers", type=int, default=None, help="Override worker processes.")
    r.add_argument("--output", default=None, help="Override the CSV output path.")
    r.add_argument("--quiet", action="store_true", help="Skip the text summary.")

    g = sub.add_parser("gains", help="Per-beam gains and one adaptive run's symbol allocation.")
    g.add_argument("config", help=cfg_help)
    g.add_argument("--output", default=None, help="CSV path (default: stdout).")

    e = sub.add_parser("exponents", help="Gap profile, hardness and theoretical exponents.")
    e.add_argument("config", help=cfg_help)
    e.add_argument("--per-beam", action="store_true", help="Also emit the per-beam gap table.")
    return p


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.cmd == "run":
            if args.workers is not None and args.workers < 1:
                raise BeamTrainingError("--workers must be >= 1")
            rows = report.run_experiment(config, workers=args.workers)
            out = args.output or config.output_path
            report.write_csv(rows, out)
            if not args.quiet:
                print(report.summarize(rows))
                print(f"wrote {out}")
        elif args.cmd == "gains":
            _emit(report.dict_rows_to_csv(report.gains_table(config)), args.output)
        else:
            summary, per_beam = report.exponent_tables(config)
            text = report.dict_rows_to_csv(summary)
            if args.per_beam:
                text += "\n" + report.dict_rows_to_csv(per_beam)
            sys.stdout.write(text)
    except (BeamTrainingError, OSError) as exc:
        print(f"beamtrain: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
