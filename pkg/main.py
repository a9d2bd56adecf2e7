#!/usr/bin/env python3
"""
KPP Front Lab - numerical laboratory for delayed KPP-Fisher wavefronts
Main entry point
"""
import argparse
import sys
from pathlib import Path
from typing import List, Optional

# Add current directory to path for relative imports
sys.path.insert(0, str(Path(__file__).parent))

from core.config import get_config
from core.exceptions import LabError
from core.run_config import COMMANDS, load_config
from core.runner import LabRunner


def build_parser() -> argparse.ArgumentParser:
    """Command-line interface"""
    parser = argparse.ArgumentParser(
        prog="kpp-front-lab",
        description=f"Run one of: {', '.join(COMMANDS)}. The command is set in the config file.",
    )
    parser.add_argument("config", type=Path, help="run configuration (key = value per line)")
    parser.add_argument("overrides", nargs="*", metavar="key=value", help="settings applied after the file")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    args = build_parser().parse_args(argv)
    logger = get_config().logger
    try:
        run_config = load_config(args.config, args.overrides)
    except LabError as e:
        logger.error(f"Invalid configuration: {e.detail}")
        return e.exit_code
    return LabRunner().run(run_config)


if __name__ == "__main__":
    sys.exit(main())
