# src/hardyprobe/reporting.py
"""report.json, report.csv and plotdata/*.dat writers.

Reports carry no timestamps and sort their keys, so identical runs give identical bytes.
"""

import csv
import io
import json
import logging
import math
import re
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from . import __version__

logger = logging.getLogger(__name__)


def clean(value: Any) -> Any:
    """JSON-safe copy: non-finite floats become strings, tuples become lists."""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, dict):
        return {str(k): clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean(v) for v in value]
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


def _atomic_write(path: Path, content: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    temp_path = path.with_suffix(path.suffix + ".tmp")
    try:
        with temp_path.open("w", encoding="utf-8", newline="") as f:
            f.write(content)
        temp_path.replace(path)
    except OSError:
        if temp_path.exists():
            temp_path.unlink()
        raise


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name).strip("_") or "item"


def render_json(command: str, seed: int, records: Sequence[Dict[str, Any]]) -> str:
    payload = {"version": __version__, "command": command, "seed": seed, "records": clean(list(records))}
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _cell(value: Any) -> Any:
    value = clean(value)
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


def render_csv(rows: Sequence[Dict[str, Any]]) -> str:
    """Header from the first row; later rows may add columns at the end."""
    if not rows:
        return ""
    header: List[str] = list(rows[0])
    for row in rows[1:]:
        header.extend(k for k in row if k not in header)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(row.get(k)) for k in header})
    return buffer.getvalue()


def render_plot(points: Iterable[Tuple[Any, Any]]) -> str:
    lines = ["# x y"]
    for x, y in points:
        lines.append(f"{_cell(float(x))} {_cell(float(y))}")
    return "\n".join(lines) + "\n"


class ReportWriter:
    """Collects the outputs of one command and writes them under ``out_dir``."""

    def __init__(self, out_dir: Path, command: str, seed: int, formats: Optional[Sequence[str]] = None):
        self.out_dir = Path(out_dir)
        self.command = command
        self.seed = seed
        self.formats = set(formats or ("json", "csv", "plot"))
        self.records: List[Dict[str, Any]] = []
        self.rows: List[Dict[str, Any]] = []
        self.plots: Dict[str, List[Tuple[float, float]]] = {}

    def add(self, record: Dict[str, Any], rows: Optional[Sequence[Dict[str, Any]]] = None):
        """Adds one record; ``rows`` replaces the record in the CSV when given."""
        self.records.append(record)
        self.rows.extend(rows if rows is not None else [record])

    def add_plot(self, name: str, points: Sequence[Tuple[float, float]]):
        self.plots[_slug(name)] = list(points)

    def write(self) -> List[Path]:
        written = []
        if "json" in self.formats:
            path = self.out_dir / "report.json"
            _atomic_write(path, render_json(self.command, self.seed, self.records))
            written.append(path)
        if "csv" in self.formats:
            path = self.out_dir / "report.csv"
            _atomic_write(path, render_csv(self.rows))
            written.append(path)
        if "plot" in self.formats:
            for name in sorted(self.plots):
                path = self.out_dir / "plotdata" / f"{name}.dat"
                _atomic_write(path, render_plot(self.plots[name]))
                written.append(path)
        logger.info(f"Wrote {len(written)} report file(s) to {self.out_dir}")
        return written
