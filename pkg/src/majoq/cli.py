"""Command line entry point: ``majoq <experiment> [--param value]... --out DIR``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .runner import (
    SCHEMAS,
    ConfigError,
    ExperimentConfig,
    SimulationError,
    default_out_root,
    read_config_file,
    results_matrix,
    run,
)

EXIT_OK, EXIT_CONFIG, EXIT_SIMULATION = 0, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="majoq", description=__doc__)
    parser.add_argument("--version", action="version", version=f"majoq {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, schema in SCHEMAS.items():
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--out", type=Path, help="output directory (default: $MAJOQ_OUT/<experiment>)")
        p.add_argument("--config", type=Path, help="INI file; the [%s] section supplies values" % name)
        for key, spec in schema.items():
            default = "none" if spec.default is None else spec.default
            hint = f"{spec.help} " if spec.help else ""
            choices = f" {{{','.join(spec.choices)}}}" if spec.choices else ""
            # raw strings; typing and range checks happen in ExperimentConfig
            p.add_argument(f"--{key}", dest=f"param_{key}", metavar=spec.kind.__name__.upper(),
                           help=f"{hint}(default {default}){choices}")
    s = sub.add_parser("suite", help="run the canonical suite and write the results matrix")
    s.add_argument("--out", type=Path, help="output root (default: $MAJOQ_OUT/suite)")
    s.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "suite":
            out = args.out or default_out_root() / "suite"
            results_matrix(out, jobs=max(1, args.jobs))
            print((Path(out) / "results.txt").read_text(), end="")
            print(f"wrote {out}")
            return EXIT_OK
        values = read_config_file(args.config, args.command) if args.config else {}
        for key in SCHEMAS[args.command]:
            raw = getattr(args, f"param_{key}")
            if raw is not None:
                values[key] = raw
        config = ExperimentConfig.create(args.command, values, args.out)
        result = run(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationError as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    s = result.summary
    print(f"{s.experiment}: violations={s.violation_count} clean_cycle={s.is_clean_cycle} "
          f"final_success={s.final_success_probability:.6g} wall={s.wall_time:.2f}s")
    print(f"wrote {result.files['summary'].parent}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
