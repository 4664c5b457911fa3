# Copyright (c) 2026, itsdave GmbH and contributors
# For license information, please see license.txt

import argparse
import json
import logging
import sys

from nonreciprocal_entanglement import __version__
from nonreciprocal_entanglement.exceptions import ConfigError, OutputError, ValidationError, throw
from nonreciprocal_entanglement.model.params.params import load_params, reference_params, resolve, with_direction
from nonreciprocal_entanglement.model.sweep.sweep import FAILURE_STATUSES, Axis, SweepSpec, emit, presets, run_sweep
from nonreciprocal_entanglement.tasks import run_all_presets, run_preset
from nonreciprocal_entanglement.tools import dump_matrices, evaluate_point, point_summary

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_IO = 3


def configure_logging(verbose=False):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)],
    )


def parse_axis(text):
    """PATH:START:STOP:COUNT[:log][:couple]"""
    parts = text.split(":")
    if len(parts) < 4:
        throw(f"axis {text!r} must look like PATH:START:STOP:COUNT[:log][:couple]", ConfigError)
    flags = parts[4:]
    unknown = [f for f in flags if f not in ("linear", "log", "couple")]
    if unknown:
        throw(f"axis {text!r}: unknown flag(s) {unknown}", ConfigError)
    try:
        return Axis(
            path=parts[0],
            start=float(parts[1]),
            stop=float(parts[2]),
            count=int(parts[3]),
            scale="log" if "log" in flags else "linear",
            couple_m="couple" in flags,
        )
    except ValueError as e:
        throw(f"axis {text!r}: {e}", ConfigError)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nonreciprocal-entanglement",
        description="Steady-state entanglement of a spinning-resonator molecular optomechanical system.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--params", help="parameter file; the reference parameter set if omitted")
    parser.add_argument("--out", help="output file (sweep, point, dump-matrices) or directory (preset)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv", help="result file format")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    parser.add_argument("--branch", type=int, default=None, help="mean-field branch index instead of the default selection")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="one- or two-axis parameter sweep")
    sweep.add_argument("--axis", action="append", default=[],
                       help="PATH:START:STOP:COUNT[:log][:couple], at most twice")
    sweep.add_argument("--paired", action="store_true", help="evaluate every point for CW and CCW")
    sweep.add_argument("--reference", action="store_true", help="with --paired, add a non-spinning row")
    sweep.add_argument("--outputs", nargs="+", default=None, help="stability, entanglement, contrast")
    sweep.add_argument("--name", default="sweep")

    preset = sub.add_parser("preset", help="built-in figure presets")
    preset.add_argument("name", nargs="?")
    preset.add_argument("--all", action="store_true", help="run every preset")

    point = sub.add_parser("point", help="single point with full diagnostics")
    point.add_argument("--direction", choices=("CW", "CCW", "none"), default=None)

    sub.add_parser("dump-matrices", help="drift and diffusion matrix of one point")
    return parser


def _load(args):
    if args.params:
        return load_params(args.params)
    return reference_params(), {}


def cmd_sweep(args, base, overrides):
    spec = SweepSpec(
        base=base,
        axes=tuple(parse_axis(text) for text in args.axis),
        paired_spin=args.paired,
        outputs=tuple(args.outputs) if args.outputs else None,
        name=args.name,
        include_reference=args.reference,
        overrides=overrides,
    )
    table = run_sweep(spec, jobs=args.jobs, branch=args.branch)
    emit(table, args.out or f"{args.name}.{args.format}", args.format)
    return EXIT_RUNTIME if table.failed() else EXIT_OK


def cmd_preset(args, base, overrides):
    all_presets = presets(base, overrides)
    out_dir = args.out or "results"
    if args.all:
        _, failed = run_all_presets(out_dir, args.format, args.jobs, args.branch, base, overrides)
    else:
        if args.name not in all_presets:
            logger.error("unknown preset %r, available: %s", args.name, ", ".join(all_presets))
            return EXIT_CONFIG
        _, failed = run_preset(all_presets[args.name], out_dir, args.format, args.jobs, args.branch)
    return EXIT_RUNTIME if failed else EXIT_OK


def _write_text(text, path):
    if not path:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e.strerror or e}") from e


def cmd_point(args, base, overrides):
    np_ = resolve(base, overrides)
    if args.direction:
        np_ = with_direction(np_, args.direction)
    result = evaluate_point(np_, args.branch)
    _write_text(json.dumps(point_summary(result), indent=1) + "\n", args.out)
    return EXIT_RUNTIME if result.status in FAILURE_STATUSES else EXIT_OK


def cmd_dump_matrices(args, base, overrides):
    A, D = dump_matrices(resolve(base, overrides), args.branch)
    if args.format == "json":
        text = json.dumps({"drift": A.values.tolist(), "diffusion": D.values.tolist(),
                           "quadratures": list(A.columns)}, indent=1) + "\n"
    else:
        text = "# drift\n" + A.to_csv(float_format="%.11e") + "# diffusion\n" + D.to_csv(float_format="%.11e")
    _write_text(text, args.out)
    return EXIT_OK


COMMANDS = {
    "sweep": cmd_sweep,
    "preset": cmd_preset,
    "point": cmd_point,
    "dump-matrices": cmd_dump_matrices,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    if args.command == "preset" and not args.all and not args.name:
        parser.error("preset needs a name or --all")

    try:
        base, overrides = _load(args)
        return COMMANDS[args.command](args, base, overrides)
    except OSError as e:
        logger.error("%s", e)
        return EXIT_IO
    except ValidationError as e:
        # configuration and parameter problems surface before any point runs
        logger.error("%s", e)
        return EXIT_CONFIG if e.status == "invalid-parameter" else EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
