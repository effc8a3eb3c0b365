"""
Reports and their deterministic JSON / CSV serialization
Copyright (c) 2025 Arjun-M/CKNKit

JSON: UTF-8, sorted keys, floats with 17 significant digits, LF line endings.
CSV: comma separated, header row, same float format, LF line endings.
Non-finite floats are written as the strings "inf", "-inf" and "nan".
"""

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


def format_float(value: float) -> str:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, '.17g')


def _plain(value: Any) -> Any:
    """numpy scalars and arrays, enums, paths and tuples to plain JSON types"""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, 'to_dict'):
        return value.to_dict()
    return value


def _render(value: Any, indent: int, level: int) -> str:
    value = _plain(value)
    pad = ' ' * (indent * (level + 1))
    close = ' ' * (indent * level)

    if value is None or isinstance(value, (bool, str)):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value) if math.isfinite(value) else json.dumps(format_float(value))
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f"{pad}{json.dumps(str(key), ensure_ascii=False)}: {_render(value[key], indent, level + 1)}"
            for key in sorted(value, key=str)
        ]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{pad}{_render(item, indent, level + 1)}" for item in value]
        return "[\n" + ",\n".join(items) + "\n" + close + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(value: Any, indent: int = 2) -> str:
    """Deterministic JSON text with a trailing newline."""
    return _render(value, indent, 0) + "\n"


def _cell(value: Any) -> str:
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


@dataclass
class Table:
    """Rows for one CSV file"""
    name: str
    columns: Tuple[str, ...]
    rows: List[Dict[str, Any]]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_cell(row.get(column)) for column in self.columns])
        return buffer.getvalue()


@dataclass
class Report:
    command: str
    inputs: Dict[str, Any]
    results: Dict[str, Any] = field(default_factory=dict)
    discrepancy_notes: List[str] = field(default_factory=list)
    version: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            'command': self.command,
            'inputs': self.inputs,
            'results': self.results,
            'discrepancy_notes': list(self.discrepancy_notes),
            'version': self.version,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())


def write_outputs(report: Report, tables: Sequence[Table], formats: Sequence[str], output_dir: Path) -> List[Path]:
    """
    Write ``<command>.json`` and one ``<name>.csv`` per table into ``output_dir``.

    Files are written in binary mode so line endings stay LF on every platform.
    """
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if 'json' in formats:
        path = output_dir / f"{report.command}.json"
        path.write_bytes(report.to_json().encode('utf-8'))
        written.append(path)
    if 'csv' in formats:
        for table in tables:
            path = output_dir / f"{table.name}.csv"
            path.write_bytes(table.to_csv().encode('utf-8'))
            written.append(path)
    logger.info(f"wrote {', '.join(str(p) for p in written) or 'nothing'}")
    return written
