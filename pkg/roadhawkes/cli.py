from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional

from roadhawkes import __version__
from roadhawkes.commands import command
from roadhawkes.commands.config import build_run_config, read_config_file
from roadhawkes.commands.core import CORE_COMMANDS
from roadhawkes.errors import RoadHawkesError


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="roadhawkes",
        description="Self-exciting incident models on a directed roadway.",
    )
    ap.add_argument("--version", action="version", version=f"roadhawkes {__version__}")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND", required=True)
    for name, cls in CORE_COMMANDS.items():
        p = sub.add_parser(name, help=cls.SUMMARY, description=cls.SUMMARY)
        p.add_argument("--config", type=Path, help="Flat key=value file; flags win")
        p.add_argument("--out-dir", help="Directory for written files (default .)")
        p.add_argument("-v", "--verbose", action="store_true", help="Log progress to stderr")
        cls.add_arguments(p)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )

    try:
        file_values = read_config_file(args.config) if args.config else None
        cfg = build_run_config(args.command, args, file_values)
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        return command(args.command, cfg).run()
    except (RoadHawkesError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
