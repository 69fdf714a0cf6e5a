"""
Command Line Interface for fixedb-calib
Handles command line argument parsing and execution
"""

import argparse
import logging
import sys

from .config import Config
from .manager import CalibrationManager

EXAMPLES = """\
Examples:
  fixedb-calib init
  fixedb-calib ci --data series.txt --l 10 --alpha 0.05 --method ss --calibration fixed-b --shape symmetric
  fixedb-calib region --data series.txt --l 10 --estimator mean,median --n-prime 15
  fixedb-calib band --data series.txt --b 0.1 --target cdf-band --out band.csv
  fixedb-calib pvalue --data series.txt --l 10 --theta0 0 --kind symmetric
  fixedb-calib select-blocksize --data series.txt --b 0.1 --target cdf-band
  fixedb-calib coverage --config c.cfg --out r.csv
  fixedb-calib regen-table --preset desk --out table.csv
"""


def _series_options(parser):
    group = parser.add_argument_group("series")
    group.add_argument("--data", help="one number per line; '#' starts a comment")
    group.add_argument("--model", default="arma11", help="arma11 | nonlinear_sine | tar1 (when simulating)")
    group.add_argument("--rho", type=float, default=0.0)
    group.add_argument("--theta", type=float, default=0.0)
    group.add_argument("--mu", type=float, default=0.0)
    group.add_argument("--err", default="gaussian", help="gaussian | exp")
    group.add_argument("--n", type=int, default=100)
    group.add_argument("--seed", type=int, default=0)


def _window_options(parser, need_l=True):
    group = parser.add_mutually_exclusive_group(required=True)
    if need_l:
        group.add_argument("--l", type=int, help="window / block length")
    group.add_argument("--b", type=float, help="window fraction b = l/n")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fixedb-calib",
        description="Fixed-b calibrated subsampling and moving block bootstrap inference",
        epilog=EXAMPLES,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--log-level", default=None, help="overrides LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create an experiment configuration template")
    p.add_argument("--out", default="experiment.cfg")

    p = sub.add_parser("ci", help="confidence interval for a scalar parameter")
    _series_options(p)
    _window_options(p)
    p.add_argument("--estimator", default="mean", help="mean | median | trimmed_mean[:gamma]")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--method", choices=["ss", "mbb"], default="ss")
    p.add_argument("--B", type=int, default=None, help="bootstrap draws for --method mbb")
    p.add_argument("--calibration", choices=["small-b", "fixed-b"], default="small-b")
    p.add_argument("--shape", choices=["symmetric", "equal-tailed", "one-sided-upper", "one-sided-lower"],
                   default="symmetric")

    p = sub.add_parser("region", help="confidence region for a vector parameter")
    _series_options(p)
    _window_options(p)
    p.add_argument("--estimator", default="mean,median")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--n-prime", type=int, default=None)
    p.add_argument("--traditional", action="store_true", help="use alpha as the p-value threshold")

    p = sub.add_parser("band", help="confidence band for the marginal CDF or spectral distribution")
    _series_options(p)
    _window_options(p)
    p.add_argument("--target", choices=["cdf-band", "spec-band"], default="cdf-band")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--n-prime", type=int, default=None)
    p.add_argument("--traditional", action="store_true")
    p.add_argument("--out", help="write grid, center, lower and upper to this CSV")

    p = sub.add_parser("pvalue", help="subsampling or MBB p-value")
    _series_options(p)
    _window_options(p)
    p.add_argument("--estimator", default="mean")
    p.add_argument("--theta0", help="hypothesized value, comma separated for vectors")
    p.add_argument("--kind", choices=["upper", "lower", "symmetric", "vector-norm"], default="symmetric")
    p.add_argument("--method", choices=["ss", "mbb"], default="ss")
    p.add_argument("--B", type=int, default=None)
    p.add_argument("--exact", action="store_true", help="enumerate every MBB sample (n <= 12)")
    p.add_argument("--null", help="band null: normal:<mu>:<sigma>, white-noise or arma:<rho>:<theta>")

    p = sub.add_parser("select-blocksize", help="Bickel-Sakov choice of the second-stage window")
    _series_options(p)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--target", choices=["region", "cdf-band", "spec-band"], default="cdf-band")
    p.add_argument("--estimator", default=None)
    p.add_argument("--K1", type=int, default=None)
    p.add_argument("--K2", type=int, default=None)
    p.add_argument("--g", type=float, default=0.75)

    p = sub.add_parser("coverage", help="run a coverage experiment")
    p.add_argument("--config", help="experiment file (key = value)")
    p.add_argument("--preset", default=None)
    p.add_argument("--paper-scale", action="store_true", help="replication counts of the published studies")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", help="CSV path (default: standard output)")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--store", action="store_true", help="record finished cells in the results ledger")

    p = sub.add_parser("regen-table", help="re-simulate the critical-value table")
    p.add_argument("--preset", choices=["paper", "desk"], default=None)
    p.add_argument("--paths", type=int, default=None)
    p.add_argument("--grid-n", type=int, default=None)
    p.add_argument("--boot-draws", type=int, default=None)
    p.add_argument("--b-grid", default=None, help="comma separated b values (default 0.01..0.20)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV path (default: standard output)")
    p.add_argument("--workers", type=int, default=None)
    return parser


def _series(manager, args):
    return manager.load_series(args.data, args.model, args.rho, args.theta, args.mu, args.err,
                               args.n, args.seed)


def dispatch(manager, args):
    command = args.command
    if command == "init":
        manager.init_project(args.out)
        return

    if command == "coverage":
        if not args.config and not args.preset:
            raise ValueError("coverage needs --config or --preset")
        manager.run_coverage(args.config, args.preset, args.paper_scale, args.seed, args.out,
                             args.workers, args.store)
        return

    if command == "regen-table":
        from .fixedb_limits import DESK_SCALE, PAPER_SCALE

        scale = {"paper": PAPER_SCALE, "desk": DESK_SCALE}.get(args.preset)
        b_grid = [float(v) for v in args.b_grid.split(",")] if args.b_grid else None
        manager.regen_table(
            args.seed, args.out, b_grid, workers=args.workers,
            paths=args.paths or (scale and scale.paths),
            grid_n=args.grid_n or (scale and scale.grid_n),
            boot_draws=args.boot_draws or (scale and scale.boot_draws),
        )
        return

    ts = _series(manager, args)
    if command == "select-blocksize":
        manager.select_blocksize(ts, args.b, args.K1, args.K2, args.g, args.target, args.estimator)
        return

    spec = manager.block_spec(ts, args.l, args.b)
    if command == "ci":
        manager.confidence_interval(ts, spec, args.estimator, args.alpha, args.method, args.calibration,
                                    args.shape, args.B, args.seed)
    elif command == "region":
        manager.region(ts, spec, args.estimator, args.alpha, args.n_prime, args.traditional)
    elif command == "band":
        manager.band(ts, spec, args.alpha, args.target, args.n_prime, args.traditional, args.out)
    elif command == "pvalue":
        manager.pvalue(ts, spec, args.estimator, args.theta0, args.kind, args.method, args.B, args.seed,
                       args.exact, args.null)


def main(argv=None):
    """Main CLI entry point."""
    args = build_parser().parse_args(argv)

    try:
        config = Config()
        logging.basicConfig(
            level=(args.log_level or config.LOG_LEVEL).upper(),
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        dispatch(CalibrationManager(config), args)
    except KeyboardInterrupt:
        print("\n❌ Operation cancelled by user.", file=sys.stderr)
        return 1
    except Exception as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
