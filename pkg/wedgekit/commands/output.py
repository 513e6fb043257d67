import argparse
import logging
from typing import Iterable, Optional

from pydantic import BaseModel

from wedgekit.config import settings
from wedgekit.schemas import RunConfig
from wedgekit.storage import save_report

logger = logging.getLogger(__name__)


def common_options(tolerance: bool = False) -> argparse.ArgumentParser:
    """Flags shared by every subcommand; --tolerance only where a pass threshold exists."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--seed", type=int, default=None, help="random seed (default from settings)")
    if tolerance:
        parser.add_argument("--tolerance", type=float, default=None, help="pass threshold override")
    parser.add_argument("--threads", type=int, default=None, help="joblib workers for searches and trial suites")
    parser.add_argument("--json", dest="json_path", default=None, help="write the report to this path")
    return parser


def float_list(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}")


def run_config(args: argparse.Namespace, command: str, default_tolerance: Optional[float] = None) -> RunConfig:
    tolerance = getattr(args, "tolerance", None)
    if tolerance is None:
        tolerance = settings.kernel_threshold if default_tolerance is None else default_tolerance
    return RunConfig(
        command=command,
        seed=settings.seed if args.seed is None else args.seed,
        tolerance=tolerance,
        threads=settings.threads if args.threads is None else args.threads,
        output=args.json_path,
        format_version=settings.format_version,
    )


def emit(report: BaseModel, args: argparse.Namespace, lines: Iterable[str], run: Optional[RunConfig] = None) -> None:
    """Attach the run config, write JSON when asked and print the summary."""
    if run is not None and "run" in type(report).model_fields:
        report.run = run
    if hasattr(report, "stamp"):
        report.stamp()
    if args.json_path:
        save_report(report, args.json_path)
    for line in lines:
        print(line)
