"""
Structured logging configuration for the SMTJ simulator.
Uses loguru for structured, rotated logs with trace IDs.
"""
import sys
import time
import uuid
from functools import wraps
from pathlib import Path
from typing import Optional, Union

from loguru import logger

CONSOLE_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{extra[trace_id]}</cyan> | <level>{message}</level>"
)
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {extra[trace_id]} | {message}"

# Library modules log without binding a trace id
logger.configure(extra={"trace_id": "-"})


def configure_logging(level: str = "INFO", log_dir: Optional[Union[str, Path]] = None) -> None:
    """
    Replace loguru's default sink with the simulator's sinks.

    Args:
        level: Minimum console level.
        log_dir: Directory for rotated file logs; None disables file logging.
    """
    logger.remove()
    logger.add(sys.stderr, format=CONSOLE_FORMAT, level=level.upper(), colorize=True)

    if log_dir is None:
        return

    log_path = Path(log_dir)
    log_path.mkdir(parents=True, exist_ok=True)

    logger.add(
        log_path / "smtj_{time:YYYY-MM-DD}.log",
        format=FILE_FORMAT,
        level="DEBUG",
        rotation="10 MB",
        retention="7 days",
        compression="zip",
    )
    logger.add(
        log_path / "errors_{time:YYYY-MM-DD}.log",
        format=FILE_FORMAT + "\n{exception}",
        level="ERROR",
        rotation="5 MB",
        retention="30 days",
        compression="zip",
    )


def generate_trace_id() -> str:
    """Generate a unique trace ID for run tracking"""
    return f"smtj-{uuid.uuid4().hex[:12]}"


def get_logger(trace_id: Optional[str] = None):
    """Get a logger instance with trace ID context"""
    if trace_id is None:
        trace_id = generate_trace_id()
    return logger.bind(trace_id=trace_id)


def log_experiment(
    trace_id: str,
    experiment: str,
    seed: int,
    duration_seconds: float,
    success: bool,
    outputs: Optional[list] = None,
):
    """Log a one-line experiment summary"""
    log = get_logger(trace_id)
    files = ",".join(outputs or [])

    if success:
        log.info(
            f"EXPERIMENT_SUCCESS | "
            f"experiment={experiment} | "
            f"seed={seed} | "
            f"duration={duration_seconds:.2f}s | "
            f"outputs={files}"
        )
    else:
        log.error(
            f"EXPERIMENT_FAILED | "
            f"experiment={experiment} | "
            f"seed={seed} | "
            f"duration={duration_seconds:.2f}s"
        )


def log_error(trace_id: str, error: Exception, context: Optional[dict] = None):
    """Log an error with full context"""
    log = get_logger(trace_id)
    context_str = " | ".join(f"{k}={v}" for k, v in (context or {}).items())
    log.opt(exception=error).error(f"ERROR | {type(error).__name__}: {error} | {context_str}")


def timed_operation(operation_name: str):
    """
    Decorator to log operation timing.

    The wrapped call accepts an extra ``trace_id`` keyword, consumed here.
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            trace_id = kwargs.pop("trace_id", None) or generate_trace_id()
            log = get_logger(trace_id)

            start = time.perf_counter()
            log.debug(f"OPERATION_START | {operation_name}")

            try:
                result = func(*args, **kwargs)
                duration = time.perf_counter() - start
                log.info(f"OPERATION_SUCCESS | {operation_name} | duration={duration:.2f}s")
                return result
            except Exception as e:
                duration = time.perf_counter() - start
                log.error(f"OPERATION_FAILED | {operation_name} | duration={duration:.2f}s | error={e}")
                raise

        return wrapper
    return decorator
