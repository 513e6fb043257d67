import argparse
import re

from wedgekit.commands.output import common_options, emit, run_config
from wedgekit.exceptions import ConstructionError, UnsupportedError
from wedgekit.models import CovarianceVerdict
from wedgekit.services.modular_service import modular_service


def cmd_counterexample(args: argparse.Namespace) -> int:
    match = re.fullmatch(r"sl(\d)", args.algebra)
    if match is None:
        raise UnsupportedError(f"Counterexamples are built on sl_n, got {args.algebra}")
    run = run_config(args, "modcov counterexample")
    puzzle = modular_service.build_covariance_counterexample(int(match.group(1)))
    report = modular_service.modular_covariance_test(puzzle)
    emit(
        report,
        args,
        [
            f"{report.algebra}: {report.verdict.value}",
            f"  witness {report.witness} with norm {report.witness_norm:.6f} outside ker(ad h2)",
            f"  assumption: {report.assumptions[0]}",
        ],
        run,
    )
    if report.verdict != CovarianceVerdict.VIOLATED:
        raise ConstructionError(f"{report.algebra} counterexample no longer violates covariance")
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("modcov", help="modular covariance analysis")
    actions = parser.add_subparsers(dest="action", required=True)
    counter = actions.add_parser("counterexample", parents=[common_options()], help="non-covariant Euler pair on sl_n")
    counter.add_argument("--algebra", default="sl3")
    counter.set_defaults(handler=cmd_counterexample)
