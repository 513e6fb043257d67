import argparse
import logging
import sys
from typing import List, Optional

from wedgekit import __version__
from wedgekit.commands import bgl, classify, modcov, stdsub, wedge
from wedgekit.config import settings
from wedgekit.exceptions import WedgekitError

logger = logging.getLogger(__name__)


def _parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="wedgekit",
        description="Euler elements, abstract wedges and standard subspaces",
    )
    parser.add_argument("--version", action="version", version=f"wedgekit {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in (classify, stdsub, bgl, modcov, wedge):
        module.register(subparsers)
    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=getattr(logging, settings.log.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    args = _parse_args(argv)
    try:
        return args.handler(args)
    except WedgekitError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        logger.error(f"Invalid input: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
