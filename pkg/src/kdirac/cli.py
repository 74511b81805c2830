"""Command-line interface.

Subcommands: run, sweep, analyze, fields, resume.  Config and sweep-plan
files use the flat `key = value` format (see config.py / sweep.py).
"""

import argparse
import os
import sys

from . import io
from .analysis import analyze_rundir
from .config import ConfigError, load_config, validate
from .io import FormatError, write_fields_csv
from .sweep import load_plan, run_sweep, scaling_report


def _fail(msg):
    print(f"error: {msg}", file=sys.stderr)
    return 2


def _load_checked_config(path):
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    config = load_config(path)
    problems = validate(config)
    if problems:
        raise ConfigError("invalid configuration: " + "; ".join(problems))
    return config


def cmd_run(args):
    config = _load_checked_config(args.config)
    mask = tuple(args.snapshot_mask.split(",")) if args.snapshot_mask \
        else io.DEFAULT_MASK
    rundir = io.execute(
        config,
        args.out,
        workers=args.threads,
        mask=mask,
        checkpoint_every=args.checkpoint_every,
        log_every=args.log_every,
    )
    print(f"run complete: {rundir.path}")
    return 0


def cmd_sweep(args):
    if not os.path.exists(args.plan):
        return _fail(f"plan file not found: {args.plan}")
    plan = load_plan(args.plan)
    paths = run_sweep(plan, args.out, threads=args.threads)
    try:
        report = scaling_report(paths, out_csv=os.path.join(args.out, "scaling.csv"))
    except ValueError as exc:
        print(f"sweep complete ({len(paths)} runs); no scaling fit: {exc}")
        return 0
    print(f"sweep complete ({len(paths)} runs)")
    for name, (slope, err) in sorted(report.items()):
        print(f"  {name}: slope {slope:+.3f} +- {err:.3f}")
    return 0


def cmd_analyze(args):
    if not os.path.isdir(args.rundir):
        return _fail(f"run directory not found: {args.rundir}")
    peaks = analyze_rundir(args.rundir, orders=range(args.min_order,
                                                     args.max_order + 1))
    for p in peaks:
        print(
            f"n={p.n:+d}  p=({p.found_p[0]:+.4f}, {p.found_p[1]:+.4f}) mc  "
            f"|phi|^2={p.amp_total:.3e}  |c+|^2={p.amp_plus:.3e}  "
            f"|c-|^2={p.amp_minus:.3e}"
        )
    return 0


def cmd_fields(args):
    config = _load_checked_config(args.config)
    out = args.out or "fields.csv"
    write_fields_csv(out, config.grid, args.t, config.beam)
    print(f"field dump written: {out}")
    return 0


def cmd_resume(args):
    target = args.rundir
    checkpoint = args.checkpoint
    if os.path.isfile(target):
        # a checkpoint file was given; its run directory sits alongside
        checkpoint = target
        target = os.path.dirname(os.path.abspath(target))
    rundir = io.resume(
        target,
        checkpoint_path=checkpoint,
        workers=args.threads,
        log_every=args.log_every,
    )
    print(f"resumed run complete: {rundir.path}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kdirac",
        description="2D Dirac split-operator simulator for Kapitza-Dirac "
                    "spin dynamics in focused standing light waves",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one simulation into a run directory")
    p.add_argument("config")
    p.add_argument("--out", default="rundir")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--snapshot-mask", default=None,
                   help="comma list of: pos_density,mom_density,spin,"
                        "ydensity,linecut,psi")
    p.add_argument("--checkpoint-every", type=int, default=0,
                   help="steps between checkpoints (multiple of snapshot_every)")
    p.add_argument("--log-every", type=int, default=0)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a parameter-sweep plan")
    p.add_argument("plan")
    p.add_argument("--out", default="sweep")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("analyze", help="extract peaks/CSVs from a run directory")
    p.add_argument("rundir")
    p.add_argument("--min-order", type=int, default=-2)
    p.add_argument("--max-order", type=int, default=2)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("fields", help="dump the standing-wave coupling on the grid")
    p.add_argument("config")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fields)

    p = sub.add_parser("resume", help="continue a run from its checkpoint")
    p.add_argument("rundir", help="run directory or checkpoint file")
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--log-every", type=int, default=0)
    p.set_defaults(func=cmd_resume)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FormatError, ValueError) as exc:
        return _fail(exc)


if __name__ == "__main__":
    sys.exit(main())
