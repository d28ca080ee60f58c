"""Command-line benchmark harness.

Output CSV columns (one row per traced iteration, reals with 17 significant
digits, ``NaN`` where a value is unavailable):

  k                  iteration index
  f_gap              f(x_k) - f* (raw f(x_k) when f* is unknown)
  lyapunov           discrete Lyapunov value E_k (sr2fista with known optimum)
  schedule_residual  relative residual of the schedule equality for step k
  eta                prox step used to produce x_k
  bound_sublinear    2 L_g ||x_0 - x*||^2 / k^2
  bound_linear       exp(-sqrt(2q) k) (f(x_0) - f*), q = mu / (L_g + mu_h)
"""

import argparse
import logging
import sys

from .bench import PROBLEMS, REGULARIZERS, BenchConfig, run_benchmark
from .exceptions import SR2Error
from .solver import Backtracking


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sr2fista-bench",
        description="Run the accelerated forward-backward method on benchmark "
                    "problems and certify its convergence inequalities.",
        epilog=__doc__.split("\n", 2)[2],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--problem", choices=PROBLEMS, default="paper6")
    parser.add_argument("--algorithm", choices=("sr2fista", "ista", "both"),
                        default="sr2fista")
    parser.add_argument("--beta-mode", choices=("compromised", "plain"),
                        default="compromised")
    parser.add_argument("--max-iters", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="bench_out", help="output directory")
    parser.add_argument("--plot", action="store_true", help="also write SVG gap plots")
    parser.add_argument("--trace-every", type=int, default=1)
    parser.add_argument("--backtracking", metavar="L0,FACTOR",
                        help="estimate L_g by backtracking from L0")
    parser.add_argument("--dimension", type=int, default=100,
                        help="dimension of the random quadratic problems")
    parser.add_argument("--coef-file", help="CSV with columns weight,center (custom)")
    parser.add_argument("--regularizer", choices=REGULARIZERS, default="l1",
                        help="regularizer of the custom problem")
    parser.add_argument("--lam", type=float, default=1.0)
    parser.add_argument("--gamma", type=float, default=3.0, help="MCP gamma")
    parser.add_argument("--scad-a", type=float, default=3.7, help="SCAD a")
    parser.add_argument("--wdg-samples", type=int, default=100)
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        bt = Backtracking.parse(args.backtracking) if args.backtracking else None
        cfg = BenchConfig(
            problem=args.problem, algorithm=args.algorithm, beta_mode=args.beta_mode,
            max_iters=args.max_iters, seed=args.seed, output_path=args.out,
            plot=args.plot, trace_every=args.trace_every, backtracking=bt,
            dimension=args.dimension, coef_file=args.coef_file,
            regularizer=args.regularizer, lam=args.lam, gamma=args.gamma,
            scad_a=args.scad_a, wdg_samples=args.wdg_samples)
        return run_benchmark(cfg)
    except SR2Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
