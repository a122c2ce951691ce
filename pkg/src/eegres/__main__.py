"""Main entry point for eegres."""

import argparse
import asyncio
import logging
import sys
from pathlib import Path

from eegres import __version__
from eegres.app import main as app_main
from eegres.config.settings import get_settings
from eegres.config.validation import ConfigValidator
from eegres.errors import EegresError


def setup_logging(
    debug: bool = False, level_name: str = "INFO", log_dir: Path | None = None
) -> None:
    """Configure logging for the application."""
    level = logging.DEBUG if debug else logging.getLevelNamesMapping()[level_name]

    # Create formatter
    formatter = logging.Formatter(
        fmt="%(asctime)s | %(levelname)-8s | %(name)s | %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    # Console handler
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    console_handler.setLevel(level)

    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG)
    # replace handlers of an earlier call in the same process
    for handler in [h for h in root_logger.handlers if getattr(h, "eegres", False)]:
        root_logger.removeHandler(handler)
    console_handler.eegres = True  # type: ignore[attr-defined]
    root_logger.addHandler(console_handler)

    # File handler
    if log_dir is not None:
        log_dir.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_dir / "eegres.log", encoding="utf-8")
        file_handler.setFormatter(formatter)
        file_handler.setLevel(logging.DEBUG)  # Always log debug to file
        file_handler.eegres = True  # type: ignore[attr-defined]
        root_logger.addHandler(file_handler)


def build_parser() -> argparse.ArgumentParser:
    """Build the command-line parser."""
    parser = argparse.ArgumentParser(
        prog="eegres",
        description="Feature resolution sweeps for multichannel signal classification",
        epilog=ConfigValidator.format_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "-d", "--debug", action="store_true", help="Enable debug logging"
    )
    parser.add_argument(
        "-s",
        "--settings",
        type=Path,
        default=None,
        help="JSON run-config file with per-section overrides",
    )
    parser.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override one setting, e.g. svm.c=0.5 (repeatable)",
    )
    parser.add_argument(
        "-v", "--version", action="version", version=f"%(prog)s {__version__}"
    )

    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="Generate a synthetic bundle")
    synth.add_argument("--spec", type=Path, required=True)
    synth.add_argument("--out", type=Path, required=True)

    imp = sub.add_parser("import-csv", help="Import CSV samples of one subject")
    imp.add_argument("--fs", type=float, required=True)
    imp.add_argument("--subject", required=True)
    imp.add_argument("--label", type=int, choices=(0, 1), required=True)
    imp.add_argument("--name", default="imported")
    imp.add_argument("--out", type=Path, required=True)
    imp.add_argument("files", nargs="+", type=Path)

    dec = sub.add_parser("decimate", help="Block-mean decimation of a bundle")
    dec.add_argument("--bundle", type=Path, required=True)
    dec.add_argument("--factor", type=int, required=True)
    dec.add_argument("--out", type=Path, required=True)

    part = sub.add_parser("partition", help="Cut samples into fixed windows")
    part.add_argument("--bundle", type=Path, required=True)
    part.add_argument("--window-seconds", type=float, required=True)
    part.add_argument("--out", type=Path, required=True)

    sweep = sub.add_parser("sweep", help="Cross-validate every configuration")
    sweep.add_argument("--bundle", type=Path, required=True)
    sweep.add_argument("--budget", type=int, help="Feature budget, e.g. 60 or 180")
    sweep.add_argument("--fmax", type=float)
    sweep.add_argument("--folds", type=int)
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--diagnostics", action="store_true")
    sweep.add_argument("--out", type=Path, required=True)

    edge = sub.add_parser("edge", help="Accuracy along the triangle edges")
    edge.add_argument("--result", type=Path, required=True)
    edge.add_argument("--out", type=Path, required=True)

    ev = sub.add_parser("eval", help="Per-fold accuracies of given configurations")
    ev.add_argument("--bundle", type=Path, required=True)
    ev.add_argument("--config", action="append", required=True, metavar="F,T,G")
    ev.add_argument("--fmax", type=float)
    ev.add_argument("--folds", type=int)
    ev.add_argument("--seed", type=int)

    feat = sub.add_parser("features", help="Dump temporally pooled tensors")
    feat.add_argument("--bundle", type=Path, required=True)
    feat.add_argument("--config", required=True, metavar="F,T,G")
    feat.add_argument("--fmax", type=float)
    feat.add_argument("--out", type=Path, required=True)

    return parser


def main(argv: list[str] | None = None) -> int:
    """Main entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)

    settings = get_settings()
    setup_logging(
        debug=args.debug, level_name=settings.log_level, log_dir=settings.log_dir
    )

    logger = logging.getLogger(__name__)
    logger.debug(f"eegres {__version__}: {args.command}")

    try:
        asyncio.run(app_main(args))
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return 130
    except EegresError as e:
        logger.error(f"{type(e).__name__}: {e.message}")
        return e.exit_code
    except Exception as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
