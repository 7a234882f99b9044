"""Command line entry point: run campaigns or validate a config file."""

from __future__ import annotations

import argparse
import sys

from .harness import EXPERIMENTS, ExperimentConfig, run_experiment, write_csv


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ris-chest",
        description="Monte-Carlo experiments for RIS channel estimation "
                    "with a few active elements",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment campaign")
    run.add_argument("--config", required=True, help="flat YAML config file")
    run.add_argument("--experiment", required=True, choices=EXPERIMENTS)
    run.add_argument("--seed", type=int, default=None, help="override master_seed")
    run.add_argument("--workers", type=int, default=None, help="override worker count")
    run.add_argument("--out", default=None, help="override output directory")

    val = sub.add_parser("validate", help="schema-check a config file")
    val.add_argument("--config", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            ExperimentConfig.from_file(args.config)
            print(f"{args.config}: OK")
            return 0
        cfg = ExperimentConfig.from_file(
            args.config,
            master_seed=args.seed, workers=args.workers, out_dir=args.out,
        )
        result = run_experiment(cfg, args.experiment)
        paths = write_csv(result, cfg.out_dir)
        for kind, path in paths.items():
            print(f"{kind}: {path}")
        return 0
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
