"""Command-line front end.

Usage:
    prodset-lab <command> [--config FILE] [--seed N] [--out DIR] [--jobs J]

Commands: jin-verify, thm2-bound, counterexample, walk-density,
cover-greedy, selftest.

The config file is key = value text ('#' comments). Reserved keys:
experiment, seed, jobs, out. Group descriptors, where accepted, use the form
kind=free,rank=2 | kind=lattice,dim=1 | kind=cyclic,moduli=4x3. Periodic
sets are written mod=m;residues=0,1,4; arc fixtures are "l,r" lines (inline
under the key arcs=..., with ';' separating lines, or via arcs-file=PATH).

Exit codes: 0 all bounds verified; 1 at least one bound violated;
2 nothing violated but some trials undetermined; 3 usage or config error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigError, LabError
from .lab import ExperimentConfig, RUNNERS, parse_config, run_experiment, selftest


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prodset-lab",
        description="Reproducible experiments on product sets, covers, and walks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in sorted(RUNNERS) + ["selftest"]:
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--jobs", type=int, default=None)
    return parser


def _load_config(args) -> ExperimentConfig:
    if args.config:
        text = Path(args.config).read_text()
        config = parse_config(text, experiment=args.command)
        if config.experiment != args.command:
            raise ConfigError(
                f"config names experiment {config.experiment!r}, "
                f"command is {args.command!r}"
            )
    else:
        config = ExperimentConfig(args.command)
    if args.seed is not None:
        config.seed = args.seed
    if args.jobs is not None:
        config.jobs = args.jobs
    if args.out is not None:
        config.out_dir = args.out
    return config


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 0 if err.code == 0 else 3

    try:
        if args.command == "selftest":
            seed = args.seed if args.seed is not None else 12345
            jobs = args.jobs if args.jobs is not None else 1
            records = selftest(seed=seed, jobs=jobs)
            code = 0
            for record in records:
                print(
                    f"{record.experiment}: passed={record.passed} "
                    f"failed={record.failed} undetermined={record.undetermined}"
                )
                if args.out:
                    record.write(args.out)
                code = max(code, record.exit_code())
            return code

        config = _load_config(args)
        record = run_experiment(config)
        print(
            f"{record.experiment}: trials={len(record.trials)} "
            f"passed={record.passed} failed={record.failed} "
            f"undetermined={record.undetermined}"
        )
        for key, value in sorted(record.aggregate.items()):
            print(f"  {key}: {value}")
        if config.out_dir:
            json_path, csv_path = record.write(config.out_dir)
            print(f"  wrote {json_path} and {csv_path}")
        return record.exit_code()
    except (ConfigError, FileNotFoundError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except LabError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
