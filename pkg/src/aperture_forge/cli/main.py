"""aperture-forge entry point.

Usage: aperture-forge <scenario> --config <path> [--seed N] [--out DIR]

Failures print one JSON object on stderr with a stable numeric code so
scripts can branch on the kind of error without scraping messages.
"""

import argparse
import json
import sys

from .config import CliError, parse_config
from .scenarios import REGISTRY, run


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="aperture-forge",
        description="run a canned simulation + reconstruction scenario",
    )
    parser.add_argument("scenario", choices=sorted(REGISTRY),
                        help="which pipeline to run")
    parser.add_argument("--config", required=True,
                        help="path to the JSON run configuration")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for every random draw in the run")
    parser.add_argument("--out", default=None,
                        help="artifact directory (default runs/<scenario>)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = parse_config(args.config, scenario=args.scenario,
                              seed=args.seed, out_dir=args.out)
        report = run(config)
    except CliError as err:
        payload = {"error": {
            "code": err.code,
            "kind": type(err).__name__,
            "message": str(err),
        }}
        print(json.dumps(payload), file=sys.stderr)
        return err.code
    for name in sorted(report.metrics):
        print(f"{name} = {report.metrics[name]}")
    print(f"runtime_s = {report.runtime_s:.3f}")
    print(f"report: {report.path}")
    return 0


def cli():
    raise SystemExit(main())


if __name__ == "__main__":
    cli()
