import csv
import io
import json
from datetime import datetime, timedelta
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from loguru import logger
from pydantic import BaseModel

from .config import OutputFormat, report_dir


class ClaimStatus(BaseModel):
    """Outcome of one checked claim."""

    name: str
    passed: bool
    provenance: str = "exact"
    detail: Dict[str, Any] = {}


class Report(BaseModel):
    command: str
    seed: int = 0
    passed: bool = True
    claims: List[ClaimStatus] = []
    data: Dict[str, Any] = {}

    def add_claim(self, name: str, passed: bool, provenance: str = "exact", **detail: Any) -> ClaimStatus:
        claim = ClaimStatus(name=name, passed=passed, provenance=provenance, detail=detail)
        self.claims.append(claim)
        self.passed = self.passed and passed
        return claim


def dumps_json(payload: Any) -> str:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    if isinstance(payload, BaseModel):
        payload = json.loads(payload.model_dump_json())
    return json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"


def table_csv(rows: List[Dict[str, Any]], columns: List[str]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


class ReportWriter:
    def __init__(self, directory: Optional[Union[str, Path]] = None):
        self.directory = Path(directory) if directory is not None else report_dir()

    def _target(self, name: str, fmt: OutputFormat, out: Optional[Path]) -> Path:
        if out is not None:
            return Path(out)
        return self.directory / f"{name}.{fmt.value}"

    def write(
        self,
        name: str,
        payload: Any,
        fmt: OutputFormat = OutputFormat.JSON,
        out: Optional[Path] = None,
        columns: Optional[List[str]] = None,
    ) -> Path:
        """Writes a report body. CSV requires ``payload`` to be a list of rows."""
        path = self._target(name, fmt, out)
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt is OutputFormat.CSV:
            if not isinstance(payload, list):
                raise TypeError("CSV reports need a list of rows")
            columns = columns or (list(payload[0].keys()) if payload else [])
            path.write_text(table_csv(payload, columns))
        else:
            path.write_text(dumps_json(payload))
        logger.info(f"Report written to {path}")
        return path

    def cleanup_old_reports(self, max_age_days: int = 7) -> int:
        """Remove reports older than max_age_days; returns the number removed."""
        if not self.directory.exists():
            return 0
        cutoff_time = datetime.now() - timedelta(days=max_age_days)
        removed = 0
        for report_file in list(self.directory.glob("*.json")) + list(self.directory.glob("*.csv")):
            if datetime.fromtimestamp(report_file.stat().st_mtime) < cutoff_time:
                report_file.unlink()
                removed += 1
        if removed:
            logger.info(f"Removed {removed} stale reports from {self.directory}")
        return removed

    def get_report_stats(self) -> Dict[str, int]:
        if not self.directory.exists():
            return {"total_files": 0, "total_size": 0, "csv_files": 0, "json_files": 0}
        files = list(self.directory.glob("*.json")) + list(self.directory.glob("*.csv"))
        return {
            "total_files": len(files),
            "total_size": sum(f.stat().st_size for f in files),
            "csv_files": len([f for f in files if f.suffix == ".csv"]),
            "json_files": len([f for f in files if f.suffix == ".json"]),
        }
