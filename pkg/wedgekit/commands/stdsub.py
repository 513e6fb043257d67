import argparse

from wedgekit.commands.output import common_options, emit, run_config
from wedgekit.exceptions import ViolationError
from wedgekit.services.stdsub_service import stdsub_service


def cmd_roundtrip(args: argparse.Namespace) -> int:
    run = run_config(args, "stdsub roundtrip")
    report = stdsub_service.roundtrip_suite(
        args.dim, args.trials, seed=run.seed, threads=run.threads, tolerance=run.tolerance
    )
    emit(
        report,
        args,
        [
            f"dim {report.dim}, {report.trials} trials, {report.conditioning_failures} ill conditioned",
            f"  subspace angle {report.max_subspace_angle:.3e}, pair residual {report.max_pair_residual:.3e}",
            f"  duality residual {report.max_duality_residual:.3e}, invariance angle {report.max_invariance_angle:.3e}",
            "PASS" if report.passed else "FAIL",
        ],
        run,
    )
    if not report.passed:
        raise ViolationError(f"round trip failed on {report.trials} trials of dimension {report.dim}")
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("stdsub", help="standard subspace calculus")
    actions = parser.add_subparsers(dest="action", required=True)
    roundtrip = actions.add_parser("roundtrip", parents=[common_options(tolerance=True)], help="pair/subspace bijection suite")
    roundtrip.add_argument("--dim", type=int, default=6)
    roundtrip.add_argument("--trials", type=int, default=100)
    roundtrip.set_defaults(handler=cmd_roundtrip)
