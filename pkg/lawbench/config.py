from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import List, Optional
import os

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .error_handler import ConfigurationError
from .utils import memory_budget_mb, thread_cap

# Load environment variables
load_dotenv()

DEFAULT_BUDGET = 12
GROUP_NAMES = ("grig", "thompson")
GROUP_FAMILIES = ("free", "sym", "dihedral", "wreath")


class OutputFormat(Enum):
    CSV = "csv"
    JSON = "json"


class EntryStatus(Enum):
    EXACT = "exact"
    LOWER_BOUND = "lower-bound"


@dataclass
class EngineConfig:
    budget: int = DEFAULT_BUDGET
    memory_mb: Optional[int] = None
    max_ball_size: int = 2_000_000

    def resolved_memory_mb(self) -> int:
        return self.memory_mb if self.memory_mb is not None else memory_budget_mb()


class ExperimentConfig(BaseModel):
    """Validated parameters of one CLI run. Unknown fields are rejected."""

    model_config = ConfigDict(extra="forbid")

    command: str
    group: str = "free2"
    n: Optional[int] = Field(default=None, ge=0)
    m: Optional[int] = Field(default=None, ge=0)
    l: Optional[int] = Field(default=None, ge=0)
    budget: int = Field(default=DEFAULT_BUDGET, gt=0)
    rank: int = Field(default=2, gt=0)
    words: List[str] = Field(default_factory=list)
    words_file: Optional[Path] = None
    output_format: OutputFormat = OutputFormat.JSON
    seed: int = 0
    out: Optional[Path] = None
    metrics_out: Optional[Path] = None
    threads: int = Field(default_factory=thread_cap, gt=0)
    action: Optional[str] = None
    table: str = "lawlessness"
    schedule: Optional[Path] = None
    function: str = "log"
    law_class: str = "p2"
    max_len: Optional[int] = Field(default=None, ge=1)
    quick: bool = False
    parallel: bool = False
    checks: List[str] = Field(default_factory=list)
    include_long: bool = False
    verbose: bool = False

    @field_validator("group")
    @classmethod
    def known_group(cls, value: str) -> str:
        if value in GROUP_NAMES:
            return value
        for prefix in GROUP_FAMILIES:
            if value.startswith(prefix) and value[len(prefix):].isdigit():
                return value
        raise ValueError(f"unknown group {value!r}; expected freeK, symN, dihedralN, wreathN, grig or thompson")

    def load_words(self) -> List[str]:
        """Words given inline plus one word per non-empty line of the words file."""
        words = list(self.words)
        if self.words_file is not None:
            if not self.words_file.exists():
                raise ConfigurationError(f"words file {self.words_file} does not exist")
            for line in self.words_file.read_text().splitlines():
                line = line.split("#", 1)[0].strip()
                if line:
                    words.append(line)
        return words


def report_dir() -> Path:
    return Path(os.getenv("LAWBENCH_REPORT_DIR", "reports"))
