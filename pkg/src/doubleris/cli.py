"""Command-line entry point: ``doubleris {sweep,validate,rbd-check}``."""

import argparse
import sys

from .channel_model import SystemConfig, build_correlation_set
from .exceptions import DoubleRisError
from .experiments import (
    SWEEP_PARAMETERS,
    SweepSpec,
    load_scenario,
    rows_to_csv,
    run_sweep,
    validate,
    write_csv,
)
from .rbd import rbd_check


def _config(path):
    return load_scenario(path) if path else SystemConfig.default()


def _grid(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse grid {text!r}")


def _cmd_sweep(args):
    config = _config(args.config)
    if args.trials is not None:
        config = config.replace(trials=args.trials)
    spec = SweepSpec(args.param, tuple(args.grid), config)
    rows = run_sweep(spec, args.mode, workers=args.workers)
    if args.out:
        write_csv(rows, args.out)
    else:
        sys.stdout.write(rows_to_csv(rows))
    return 0


def _cmd_validate(args):
    config = _config(args.config)
    report = validate(config, args.trials, samples=args.samples, workers=args.workers)
    print(report.format())
    return 0 if report.passed else 1


def _cmd_rbd_check(args):
    config = _config(args.config)
    result = rbd_check(config, build_correlation_set(config), args.samples)
    print(f"random designs tested: {result.samples}")
    print(f"max v1 excess over tr(R1^2): {result.max_v1_excess:.3e}")
    print(f"max v2 excess over tr(R2^2): {result.max_v2_excess:.3e}")
    print(f"equal-phase sum rate: {result.optimal_sum_rate:.6f} bit/s/Hz")
    print(f"best random sum rate: {result.best_random_sum_rate:.6f} bit/s/Hz")
    print("PASS" if result.passed else "FAIL")
    return 0 if result.passed else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="doubleris",
        description="Double-RIS MU-MISO rate analysis under phase noise and spatial correlation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="sweep one parameter and write per-user rates as CSV")
    p.add_argument("--config", help="JSON scenario file (default: reference scenario)")
    p.add_argument("--param", required=True, choices=SWEEP_PARAMETERS)
    p.add_argument("--grid", required=True, type=_grid, help="comma-separated values")
    p.add_argument("--mode", default="closed", choices=("closed", "mc", "both"))
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--trials", type=int, help="override Monte Carlo trial count")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("validate", help="run the Monte Carlo oracle checks")
    p.add_argument("--config")
    p.add_argument("--trials", type=int)
    p.add_argument("--samples", type=int, default=1000, help="random phase designs")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("rbd-check", help="test equal-phase optimality against random designs")
    p.add_argument("--config")
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(func=_cmd_rbd_check)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DoubleRisError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
