"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 a row whose fits did not
converge (output is still written).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .config import DEFAULT_CONFIG_TEXT, EXPERIMENTS, ConfigError, RunConfig, parse_config
from .experiments import run_experiment, write_table
from .fringes import FitError, fit_fringe
from .interferometer import FringeProfile

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNCONVERGED = 3


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="configuration file (defaults if omitted)")
    p.add_argument("--seed", type=int, help="override noise.seed")
    p.add_argument("--out", type=Path, help="output directory (overrides output.dir)")
    p.add_argument("--shots", type=int, help="override noise.n_shots")
    p.add_argument("--noiseless", action="store_true",
                   help="exact patterns, one fit per measurement, sem = 0")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clockinterf",
        description="Clock interferometry simulator: complementarity sweeps as CSV/JSON tables.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in EXPERIMENTS:
        _add_run_flags(sub.add_parser(name, help=f"run the {name} experiment"))
    fit = sub.add_parser("fit", help="fit a profile CSV (columns z_m, density) and print JSON")
    fit.add_argument("profile", type=Path)
    fit.add_argument("--out", type=Path, help="write the fit JSON here instead of stdout")
    sub.add_parser("defaults", help="print a commented configuration file with all defaults")
    return parser


def load_config(args) -> RunConfig:
    cfg = parse_config(args.config) if args.config else RunConfig()
    if args.seed is not None and args.seed < 0:
        raise ConfigError("--seed: must be >= 0")
    return cfg.with_overrides(seed=args.seed, n_shots=args.shots,
                              output_dir=args.out, noiseless=args.noiseless)


def read_profile(path: Path) -> FringeProfile:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"z_m", "density"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected columns z_m, density")
        rows = [(float(r["z_m"]), float(r["density"])) for r in reader]
    data = np.array(rows, dtype=float).reshape(-1, 2)
    return FringeProfile(data[:, 0], data[:, 1])


def _cmd_fit(args) -> int:
    try:
        profile = read_profile(args.profile)
        fit = fit_fringe(profile)
    except (OSError, ValueError) as exc:
        kind = "fit error" if isinstance(exc, FitError) else "input error"
        print(f"clockinterf: {kind}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = json.dumps(fit.to_dict(), sort_keys=True, indent=2) + "\n"
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK if fit.converged else EXIT_UNCONVERGED


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "defaults":
        sys.stdout.write(DEFAULT_CONFIG_TEXT)
        return EXIT_OK
    if args.command == "fit":
        return _cmd_fit(args)
    try:
        cfg = load_config(args)
        table = run_experiment(cfg, args.command)
        paths = write_table(table, cfg, cfg.output_dir)
    except ConfigError as exc:
        print(f"clockinterf: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"clockinterf: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in paths:
        print(path)
    if table.unconverged:
        rows = ", ".join(str(i) for i in table.extras["unconverged_rows"])
        print(f"clockinterf: fits did not converge in row(s) {rows}", file=sys.stderr)
        return EXIT_UNCONVERGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
