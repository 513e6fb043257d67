import argparse

import numpy as np

from wedgekit.commands.output import common_options, emit, float_list, run_config
from wedgekit.exceptions import DomainError, ViolationError
from wedgekit.models import ConeLabel, GroupElement, OrderStatus
from wedgekit.schemas import OrderReport
from wedgekit.services.cone_service import cone_service
from wedgekit.services.euler_service import euler_service
from wedgekit.services.liealg_service import liealg_service
from wedgekit.services.wedge_service import wedge_service


def _matrix(values) -> np.ndarray:
    if len(values) != 4:
        raise DomainError("sl2 group elements are given as a,b,c,d")
    return np.asarray(values, dtype=float).reshape(2, 2)


def cmd_order(args: argparse.Namespace) -> int:
    run = run_config(args, "wedge order")
    algebra = liealg_service.make_algebra("sl", n=2)
    grading = euler_service.is_euler(algebra.element([0.0, 0.0, 0.5]))
    base = wedge_service.base_couple(grading, seed=run.seed)
    cone = cone_service.make_cone(args.cone, algebra)

    g1, g2 = _matrix(args.g1), _matrix(args.g2)
    w1 = wedge_service.act(GroupElement(g1), base)
    w2 = wedge_service.act(GroupElement(g2), base)
    result = wedge_service.leq(w1, w2, cone)

    report = OrderReport(
        status=result.status,
        c_plus=result.c_plus,
        m=list(result.m) if result.m is not None else None,
        c_minus=result.c_minus,
        reason=result.reason,
    )
    if cone.label == ConeLabel.SL2_STANDARD:
        report.oracle = wedge_service.interval_contains(
            wedge_service.interval_image(g2), wedge_service.interval_image(g1)
        )
        if report.oracle is not None and result.status != OrderStatus.INDETERMINATE:
            report.agrees = report.oracle == (result.status == OrderStatus.HOLDS)

    lines = [f"g1.W <= g2.W: {result.status.value} ({result.reason})"]
    if report.oracle is not None:
        lines.append(f"  half-line containment: {report.oracle}")
    emit(report, args, lines, run)
    if result.status == OrderStatus.INDETERMINATE:
        return 3
    if report.agrees is False:
        raise ViolationError("Gauss decomposition disagrees with half-line containment")
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("wedge", help="abstract Euler wedges")
    actions = parser.add_subparsers(dest="action", required=True)
    order = actions.add_parser("order", parents=[common_options()], help="cone order of two sl2 wedges")
    order.add_argument("--g1", type=float_list, required=True, help="a,b,c,d of the first transporter")
    order.add_argument("--g2", type=float_list, required=True, help="a,b,c,d of the second transporter")
    order.add_argument("--cone", default=ConeLabel.SL2_STANDARD.value)
    order.set_defaults(handler=cmd_order)
