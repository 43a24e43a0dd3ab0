"""
lawbench - exact computations of laws, word complexity and lawlessness growth
"""

import os
import sys
from pathlib import Path

from loguru import logger

# Configure logger
log_dir = Path(os.getenv("LAWBENCH_LOG_DIR", "logs"))
log_dir.mkdir(parents=True, exist_ok=True)

logger.remove()
_stderr_sink = logger.add(sys.stderr, level="INFO")

logger.add(
    log_dir / "lawbench.log",
    rotation="500 MB",
    retention="10 days",
    compression="zip",
    level="INFO"
)

logger.add(
    log_dir / "errors.log",
    rotation="100 MB",
    retention="7 days",
    compression="zip",
    level="ERROR"
)


def set_stderr_level(level: str) -> None:
    """Re-adds the stderr sink at ``level``; file sinks are untouched."""
    global _stderr_sink
    logger.remove(_stderr_sink)
    _stderr_sink = logger.add(sys.stderr, level=level)


from .error_handler import (
    BudgetExceeded,
    CertificateFailure,
    ConfigurationError,
    ErrorHandler,
    LawbenchError,
    MalformedWord,
    NotFound,
    NotFoundWithin,
)
from .words import FreeWord, MixedWord, enumerate_reduced, evaluate, format_word, parse_word, reduce
from .groups import FreeBackend, GroupBackend, SymBackend, make_backend
from .engine import Ball, GrowthTable, combine, complexity, lawlessness_growth
from .monitoring import monitor, OPERATIONS, OPERATION_ERRORS, OPERATION_DURATION, ACTIVE_OPERATIONS

__all__ = [
    'BudgetExceeded',
    'CertificateFailure',
    'ConfigurationError',
    'ErrorHandler',
    'LawbenchError',
    'MalformedWord',
    'NotFound',
    'NotFoundWithin',
    'FreeWord',
    'MixedWord',
    'enumerate_reduced',
    'evaluate',
    'format_word',
    'parse_word',
    'reduce',
    'FreeBackend',
    'GroupBackend',
    'SymBackend',
    'make_backend',
    'Ball',
    'GrowthTable',
    'combine',
    'complexity',
    'lawlessness_growth',
    'monitor',
    'OPERATIONS',
    'OPERATION_ERRORS',
    'OPERATION_DURATION',
    'ACTIVE_OPERATIONS',
    'set_stderr_level',
]
