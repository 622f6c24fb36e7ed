"""Command-line interface.

Subcommands::

    fracac convergence   --config FILE [--out DIR] [--order {2,4}] [--threads N]
    fracac simulate      --config FILE --out DIR [--seed N] [--order {2,4}]
                         [--extrapolate] [--threads N]
    fracac window        --config FILE [--order {2,4}]
    fracac amplification --config FILE

Config files are flat ``key=value`` text (see the manifest module); the
flags override the matching config entries.  ``--threads`` caps the linear
algebra thread pool for the duration of the command.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
from pathlib import Path

from .drivers import (
    amplification_result,
    convergence_csv,
    convergence_table,
    run_convergence,
    run_simulation,
    window_result,
)
from .manifest import ConfigError, parse_config

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracac",
        description="Operator-splitting ADI solver for space-fractional Allen-Cahn equations",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("convergence", "simulate", "window", "amplification"):
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="key=value config file")
        cmd.add_argument("--out", default=None, help="output directory")
        cmd.add_argument("--seed", type=int, default=None, help="override the config seed")
        cmd.add_argument("--threads", type=int, default=None, help="cap BLAS threads")
        cmd.add_argument("--order", type=int, choices=(2, 4), default=None,
                         help="override the spatial order")
        cmd.add_argument("--extrapolate", action="store_true",
                         help="enable final-time extrapolation")
    return parser


def _thread_limit(n):
    if n is None:
        return contextlib.nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def _load_manifest(args):
    text = Path(args.config).read_text(encoding="utf-8")
    manifest = parse_config(text)
    if manifest.kind != args.command:
        raise ConfigError(
            f"config kind '{manifest.kind}' does not match subcommand '{args.command}'"
        )
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError(f"seed: must be non-negative, got {args.seed}")
        manifest.seed = args.seed
    if args.order is not None:
        manifest.order = args.order
    if args.extrapolate:
        manifest.extrapolate = True
    return manifest


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        manifest = _load_manifest(args)
        with _thread_limit(args.threads):
            if args.command == "convergence":
                rows = run_convergence(manifest)
                csv_text = convergence_csv(rows)
                sys.stdout.write(csv_text)
                if args.out is not None:
                    out = Path(args.out)
                    out.mkdir(parents=True, exist_ok=True)
                    (out / "convergence.csv").write_text(csv_text, encoding="ascii")
                    (out / "convergence.txt").write_text(
                        convergence_table(rows), encoding="ascii"
                    )
            elif args.command == "simulate":
                if args.out is None:
                    raise ConfigError("simulate requires --out")
                result = run_simulation(manifest, args.out)
                print(result.summary)
            elif args.command == "window":
                window = window_result(manifest)
                print(
                    f"dt_min={window.dt_min:.6g} dt_max={window.dt_max:.6g} "
                    f"variant={window.constant_variant}"
                )
            else:
                result = amplification_result(manifest)
                per_axis = " ".join(f"{v:.15g}" for v in result["per_axis_max"])
                print(f"max_modulus={result['max_modulus']:.15g} per_axis={per_axis}")
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
