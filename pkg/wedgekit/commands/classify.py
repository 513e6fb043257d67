import argparse
import logging
from typing import Dict

from wedgekit.commands.output import common_options, emit, float_list, run_config
from wedgekit.exceptions import DomainError, ViolationError
from wedgekit.models import LieAlgebra
from wedgekit.schemas import GradingReport, SymmetryReport
from wedgekit.services.atlas_service import atlas_service, witness_report
from wedgekit.services.euler_service import euler_service
from wedgekit.services.liealg_service import liealg_service
from wedgekit.storage import load_algebra

logger = logging.getLogger(__name__)


def _algebra_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--family", help="sl, so, sp, gl, iso, aff or abelian")
    parser.add_argument("--rank", type=int, help="matrix parameter n for sl_n and sp_2n")
    parser.add_argument("--n", type=int)
    parser.add_argument("--p", type=int)
    parser.add_argument("--q", type=int)
    parser.add_argument("--d", type=int)
    parser.add_argument("--algebra-file", help="JSON algebra file instead of a family")
    return parser


def family_params(args: argparse.Namespace) -> Dict[str, int]:
    if args.family == "so":
        return {"p": args.p, "q": args.q}
    if args.family == "iso":
        return {"d": args.d}
    n = args.rank if args.rank is not None else args.n
    return {"n": n}


def resolve_algebra(args: argparse.Namespace) -> LieAlgebra:
    if args.algebra_file:
        return load_algebra(args.algebra_file)
    if not args.family:
        raise DomainError("Give --family or --algebra-file")
    params = {k: v for k, v in family_params(args).items() if v is not None}
    return liealg_service.make_algebra(args.family, **params)


def cmd_classify(args: argparse.Namespace) -> int:
    if not args.family:
        raise DomainError("classify needs --family")
    params = {k: v for k, v in family_params(args).items() if v is not None}
    run = run_config(args, "classify")
    report = atlas_service.classify(args.family, params, seed=run.seed)
    lines = [f"{report.algebra}: {report.orbit_count} Euler orbit(s)"]
    for i, orbit in enumerate(report.orbits):
        lines.append(f"  orbit {i}: dims {orbit.dims}, symmetric {orbit.symmetric} ({orbit.source})")
    if report.tube_type is not None:
        lines.append(f"  hermitian tube type: {report.tube_type}")
    lines += [f"  mismatch: {m}" for m in report.mismatches]
    emit(report, args, lines, run)
    if report.expected_match is False:
        raise ViolationError(f"{report.algebra} disagrees with the expected table")
    return 0


def cmd_grade(args: argparse.Namespace) -> int:
    algebra = resolve_algebra(args)
    h = algebra.element(args.h)
    diagnosis = euler_service.diagnose(h)
    report = GradingReport(algebra=algebra.name, h=list(args.h), euler=diagnosis.grading is not None, reason=diagnosis.reason)
    lines = [f"{algebra.name}: h is {'an' if report.euler else 'not an'} Euler element ({diagnosis.reason})"]
    if diagnosis.grading is not None:
        grading = diagnosis.grading
        tau = euler_service.euler_involution(grading).matrix
        report.dims = list(grading.dims)
        report.spectrum_residual = grading.spectrum_residual
        report.involution = tau.tolist()
        report.exponential_residual = float(abs(euler_service.involution_from_exponential(grading) - tau).max())
        lines.append(f"  dims (g_-1, g_0, g_1) = {tuple(grading.dims)}")
    emit(report, args, lines, run_config(args, "grade"))
    return 0


def cmd_symmetric(args: argparse.Namespace) -> int:
    algebra = resolve_algebra(args)
    run = run_config(args, "symmetric")
    grading = euler_service.is_euler(algebra.element(args.h))
    if grading is None:
        raise DomainError("h is not an Euler element")
    result = euler_service.is_symmetric(grading, seed=run.seed, threads=run.threads)
    report = SymmetryReport(
        algebra=algebra.name,
        h=list(args.h),
        symmetric=result.symmetric,
        source=result.source,
        reason=result.reason,
        witness=witness_report(result),
    )
    lines = [f"{algebra.name}: symmetric = {result.symmetric} ({result.source}: {result.reason})"]
    if report.witness is not None:
        lines.append(f"  conjugator residual {report.witness.witness_residual:.3e}")
    emit(report, args, lines, run)
    return 3 if result.symmetric is None else 0


def cmd_atlas(args: argparse.Namespace) -> int:
    run = run_config(args, "atlas")
    report = atlas_service.build_atlas(seed=run.seed, threads=run.threads)
    lines = [f"{e.family}{e.params}: {e.orbit_count} orbit(s), tube type {e.tube_type}" for e in report.entries]
    lines.append("atlas matches the expected table" if report.matches else "atlas MISMATCH")
    lines += [f"  {m}" for m in report.mismatches]
    emit(report, args, lines, run)
    if not report.matches:
        raise ViolationError(f"atlas mismatches: {len(report.mismatches)}")
    return 0


def register(subparsers) -> None:
    common = common_options()
    algebra = _algebra_options()

    parser = subparsers.add_parser("classify", parents=[common, algebra], help="Euler orbits of a simple algebra")
    parser.set_defaults(handler=cmd_classify)

    parser = subparsers.add_parser("grade", parents=[common, algebra], help="Euler test and 3-grading of h")
    parser.add_argument("--h", type=float_list, required=True, help="coordinates of h in the algebra basis")
    parser.set_defaults(handler=cmd_grade)

    parser = subparsers.add_parser("symmetric", parents=[common, algebra], help="is -h conjugate to h")
    parser.add_argument("--h", type=float_list, required=True, help="coordinates of h in the algebra basis")
    parser.set_defaults(handler=cmd_symmetric)

    parser = subparsers.add_parser("atlas", parents=[common], help="classification table for all supported algebras")
    parser.set_defaults(handler=cmd_atlas)
