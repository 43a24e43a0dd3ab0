import os
from typing import Optional

import psutil
from dotenv import load_dotenv
from loguru import logger

from .error_handler import ConfigurationError, MemoryBudgetExceeded

load_dotenv()

DEFAULT_MEMORY_MB = 2048


def env_int(name: str, default: int, minimum: int = 1) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}")
    if value < minimum:
        raise ConfigurationError(f"{name} must be >= {minimum}, got {value}")
    return value


def thread_cap() -> int:
    """Worker cap from LAWBENCH_THREADS."""
    return env_int("LAWBENCH_THREADS", 1)


def memory_budget_mb() -> int:
    return env_int("LAWBENCH_MEMORY_MB", DEFAULT_MEMORY_MB)


class MemoryGuard:
    """Polls the resident set size of this process against a budget.

    Only every ``interval``-th call to :meth:`tick` actually queries psutil.
    """

    def __init__(self, budget_mb: Optional[int] = None, interval: int = 4096):
        self.budget_mb = budget_mb if budget_mb is not None else memory_budget_mb()
        self.interval = interval
        self._process = psutil.Process(os.getpid())
        self._ticks = 0

    def used_mb(self) -> float:
        return self._process.memory_info().rss / (1024 * 1024)

    def check(self) -> None:
        used = self.used_mb()
        if used > self.budget_mb:
            logger.error(f"Memory budget exceeded: {used:.0f} MB > {self.budget_mb} MB")
            raise MemoryBudgetExceeded(used, self.budget_mb)

    def tick(self) -> None:
        self._ticks += 1
        if self._ticks % self.interval == 0:
            self.check()
