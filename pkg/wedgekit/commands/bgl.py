import argparse
from typing import List, Optional

import numpy as np

from wedgekit.commands.output import common_options, emit, float_list, run_config
from wedgekit.config import settings
from wedgekit.exceptions import ViolationError
from wedgekit.schemas import CutoffRefinement
from wedgekit.services.fock_service import fock_service
from wedgekit.services.rapidity_service import rapidity_service
from wedgekit.storage import load_test_functions


def cmd_rapidity(args: argparse.Namespace) -> int:
    run = run_config(args, "bgl rapidity", settings.bw_threshold)
    model = rapidity_service.make_model(args.mass, args.grid, args.theta_max)
    checks = [c.strip() for c in args.check.split(",") if c.strip()]
    # user supplied right-wedge functions join the BW check
    extra = load_test_functions(args.functions) if args.functions else []
    report = rapidity_service.run_checks(model, checks, extra_functions=extra, tolerance=run.tolerance)

    lines = [f"rapidity model m={model.mass}, n={model.n}, theta_max={model.theta_max}"]
    if report.bw_residuals:
        lines.append(f"  worst BW residual {max(r.residual for r in report.bw_residuals):.3e}")
    if report.left_wedge_residuals:
        lines.append(f"  smallest left-wedge residual {min(r.residual for r in report.left_wedge_residuals):.3e}")
    if report.refinement:
        worst = max(report.refinement, key=lambda r: r.fine_residual)
        lines.append(f"  worst BW residual at n={worst.fine_n}: {worst.fine_residual:.3e} ({worst.label})")
    for label, value in report.locality_residuals.items():
        lines.append(f"  Im pairing ({label}) {value:.3e}")
    for profile in report.regularity:
        lines.append(f"  regularity {profile.translations}: ranks {profile.real_rank}/{profile.complex_rank}")
    if report.borchers is not None:
        lines.append(
            f"  Borchers residuals {report.borchers.reflection_residual:.3e}, {report.borchers.dilation_residual:.3e}"
        )
    if not report.converged:
        lines.append("NOT CONVERGED: residuals grow under grid refinement")
    lines.append("PASS" if report.passed else "FAIL: " + "; ".join(report.failures))
    emit(report, args, lines, run)
    if not report.converged:
        return 3
    if not report.passed:
        raise ViolationError("; ".join(report.failures))
    return 0


def _amplitude(values) -> np.ndarray:
    # re,im pairs per mode
    values = np.asarray(values, dtype=float).reshape(-1, 2)
    return values[:, 0] + 1j * values[:, 1]


def _refinement_lines(refinement: Optional[CutoffRefinement]) -> List[str]:
    if refinement is None:
        return ["  no cutoff refinement inside the dimension envelope"]
    worst = max(refinement.fine.values())
    status = "converged" if refinement.converged else "NOT CONVERGED"
    return [f"  n_max={refinement.fine_n_max}: worst residual {worst:.3e}, {status}"]


def cmd_weyl(args: argparse.Namespace) -> int:
    run = run_config(args, "fock weyl-check", 1e-6)
    report = fock_service.weyl_check(_amplitude(args.xi), _amplitude(args.eta), n_max=args.n_max)
    vacuum_ok = report.vacuum_residual < 1e-8
    composition_ok = report.composition_residual < run.tolerance
    emit(
        report,
        args,
        [
            f"{report.modes} mode(s), n_max={report.n_max}",
            f"  vacuum residual {report.vacuum_residual:.3e}",
            f"  composition residual {report.composition_residual:.3e}",
            f"  unitarity residual {report.unitarity_residual:.3e}",
            f"  truncation bound 1e{report.truncation_log10_bound:.1f}",
            *_refinement_lines(report.refinement),
            "PASS" if vacuum_ok and composition_ok else "FAIL",
        ],
        run,
    )
    if report.refinement is not None and not report.refinement.converged:
        return 3
    if not (vacuum_ok and composition_ok):
        raise ViolationError(
            f"Weyl relations fail (vacuum {report.vacuum_residual:.3e}, composition {report.composition_residual:.3e})"
        )
    return 0


def register(subparsers) -> None:
    common = common_options(tolerance=True)

    parser = subparsers.add_parser("bgl", help="BGL nets and the rapidity model")
    actions = parser.add_subparsers(dest="action", required=True)
    rapidity = actions.add_parser("rapidity", parents=[common], help="BW, locality and regularity probes")
    rapidity.add_argument("--mass", type=float, default=None)
    rapidity.add_argument("--grid", type=int, default=None)
    rapidity.add_argument("--theta-max", type=float, default=None)
    rapidity.add_argument("--check", default="bw,locality")
    rapidity.add_argument("--functions", default=None, help="JSON Gaussian-sum test functions")
    rapidity.set_defaults(handler=cmd_rapidity)

    parser = subparsers.add_parser("fock", help="truncated Fock space checks")
    actions = parser.add_subparsers(dest="action", required=True)
    weyl = actions.add_parser("weyl-check", parents=[common], help="Weyl relations on a truncated Fock space")
    weyl.add_argument("--xi", type=float_list, default=[0.5, 0.0], help="re,im per mode")
    weyl.add_argument("--eta", type=float_list, default=[0.0, 0.5], help="re,im per mode")
    weyl.add_argument("--n-max", type=int, default=64)
    weyl.set_defaults(handler=cmd_weyl)
