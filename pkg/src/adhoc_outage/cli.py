"""Command-line experiment runner.

    adhoc-outage --preset table-1 --out results/
    adhoc-outage --config run.cfg --seed 7 --realizations 2000

Writes ``<name>.csv`` and ``<name>.manifest`` into the output directory. The
manifest holds every resolved parameter in the config format, so feeding it
back through ``--config`` reproduces the CSV byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import __version__
from .config import ExperimentConfig, parse_config, required_fields_message
from .errors import ConfigError, NumericalError, OutageError, SaturationError
from .experiments import PRESETS, preset_config, run_experiment

log = logging.getLogger("adhoc_outage")

EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def format_number(value):
    """Ten significant digits; integers print without a decimal point."""
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return f"{float(value):.10g}"


def emit_csv(result, path):
    """Write a ResultTable as CSV with a header row; returns the path."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(result.columns)
        for row in result.rows:
            writer.writerow([format_number(v) for v in row])
    return path


def read_csv(path):
    """Parse a CSV written by :func:`emit_csv` into (columns, rows of floats)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        columns = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    return columns, rows


def write_manifest(cfg, path, outputs=()):
    lines = [
        f"# adhoc_outage {__version__}",
        *(f"# output: {o}" for o in outputs),
        cfg.to_text().rstrip("\n"),
    ]
    Path(path).write_text("\n".join(lines) + "\n")
    return Path(path)


def resolve_config(config_text=None, preset=None, overrides=None):
    """Preset bundle, then config-file keys, then command-line overrides."""
    file_values = parse_config(config_text) if config_text is not None else {}
    if config_text is not None and not file_values and preset is None:
        raise ConfigError("empty configuration: " + required_fields_message())
    name = preset or file_values.get("preset")
    base = preset_config(name) if name else ExperimentConfig()
    values = {k: v for k, v in file_values.items() if k != "preset"}
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    cfg = base.replace(**values)
    if cfg.preset is None and cfg.sweep is None:
        raise ConfigError(required_fields_message())
    return cfg


def run(cfg, out_dir):
    """Execute one configuration and write its CSV and manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = run_experiment(cfg)
    name = cfg.preset or f"custom-{cfg.sweep}"
    csv_path = emit_csv(result, out / f"{name}.csv")
    write_manifest(cfg, out / f"{name}.manifest", [csv_path.name])
    for key, value in result.notes.items():
        log.info("%s: %s", key, value)
    return csv_path


def build_parser():
    ap = argparse.ArgumentParser(
        prog="adhoc-outage",
        description="Outage probability and transmission capacity of finite ad hoc networks.",
    )
    ap.add_argument("--config", type=Path, help="key = value configuration file")
    ap.add_argument("--preset", choices=sorted(PRESETS), help="named experiment")
    ap.add_argument("--seed", type=int, help="master seed")
    ap.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    ap.add_argument("--trials", type=int, help="oracle trials per point")
    ap.add_argument("--realizations", type=int, help="network realizations N")
    ap.add_argument("--no-oracle", action="store_true", help="skip the fading-level simulation")
    ap.add_argument("--workers", type=int, help="worker processes")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    overrides = dict(seed=args.seed, trials=args.trials, realizations=args.realizations,
                     workers=args.workers, oracle=False if args.no_oracle else None)
    try:
        text = args.config.read_text() if args.config else None
        if text is None and args.preset is None:
            raise ConfigError("nothing to run: pass --preset or --config; " + required_fields_message())
        cfg = resolve_config(text, args.preset, overrides)
        path = run(cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SaturationError, NumericalError, OutageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
