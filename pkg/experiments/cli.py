"""
Command-line interface.

    smtj <subcommand> [--config PATH] [--seed N] [--out DIR] [--format {csv,json}]

Exit codes: 0 success, 1 config or usage error, 2 runtime error.
"""

import argparse
import time
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from config import settings
from configs.config_loader import config_with_overrides, load_config
from experiments.runners import RUNNERS
from utils.errors import ConfigError, UsageError
from utils.logging_config import configure_logging, generate_trace_id, get_logger, log_error, log_experiment
from utils.manifest import build_manifest, write_manifest
from utils.output import TABLE_FORMATS

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting."""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="smtj", description="SMTJ temporal sampler experiments")
    sub = parser.add_subparsers(dest="command", metavar="subcommand", parser_class=_Parser)
    for name, runner in RUNNERS.items():
        cmd = sub.add_parser(name, help=(runner.__doc__ or "").strip().splitlines()[0])
        cmd.add_argument("--config", default="default", help="Config JSON path or shipped config name")
        cmd.add_argument("--seed", type=int, default=None, help="Override the config seed")
        cmd.add_argument("--out", default=None, help="Output directory")
        cmd.add_argument("--format", choices=TABLE_FORMATS, default="csv", dest="fmt")
        cmd.add_argument("--workers", type=int, default=None, help="Processes for trial batches")
    return parser


def cli_dispatch(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv``, run one experiment and return the exit code."""
    configure_logging(settings.LOG_LEVEL, settings.LOG_DIR)
    trace_id = generate_trace_id()
    log = get_logger(trace_id)
    parser = build_parser()

    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            # --help prints and exits through argparse
            return EXIT_OK if e.code in (None, 0) else EXIT_CONFIG
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        cfg = load_config(args.config)
        workers = args.workers if args.workers is not None else (settings.WORKERS if settings.WORKERS > 1 else None)
        cfg = config_with_overrides(cfg, seed=args.seed, workers=workers)
    except (ConfigError, UsageError) as e:
        log.error(f"[X] {e}")
        return EXIT_CONFIG

    out_dir = Path(args.out or Path(settings.OUT_DIR) / args.command)
    out_dir.mkdir(parents=True, exist_ok=True)
    log.info(f"EXPERIMENT_START | {args.command} | seed={cfg.seed} | out={out_dir}")

    start = time.perf_counter()
    try:
        outputs, summary = RUNNERS[args.command](cfg, out_dir, args.fmt, trace_id=trace_id)
    except (ConfigError, UsageError) as e:
        log_error(trace_id, e, {"command": args.command})
        return EXIT_CONFIG
    except ValidationError as e:
        log_error(trace_id, ConfigError(str(e)), {"command": args.command})
        return EXIT_CONFIG
    except Exception as e:
        log_error(trace_id, e, {"command": args.command})
        log_experiment(trace_id, args.command, cfg.seed, time.perf_counter() - start, False)
        return EXIT_RUNTIME

    duration = time.perf_counter() - start
    manifest = build_manifest(args.command, cfg, outputs, trace_id, duration, summary)
    manifest_path = write_manifest(out_dir, manifest)
    log_experiment(trace_id, args.command, cfg.seed, duration, True, [p.name for p in [*outputs, manifest_path]])
    return EXIT_OK
