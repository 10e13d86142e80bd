"""Tables of experiment results and their CSV / JSON serialization.

Floats are written with 17 significant digits so that reading a report
back reproduces every number bit for bit.  Nothing time-dependent is
written unless the caller puts it in the provenance block, so identical
inputs give byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .errors import DynFramesError

FORMATS = ("csv", "json")


class IoError(DynFramesError, OSError):
    pass


@dataclass
class ReportTable:
    columns: list
    rows: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        for i, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise ValueError(
                    f"row {i} has {len(row)} cells, table has {len(self.columns)} columns")

    def add_row(self, row) -> None:
        row = list(row)
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} cells, table has {len(self.columns)} columns")
        self.rows.append(row)


def format_number(x: float) -> str:
    s = format(x, ".17g")
    if s.lstrip("-").isdigit():
        s += ".0"
    return s


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_number(v) if math.isfinite(v) else str(v)
    if isinstance(v, complex):
        return f"{format_number(v.real)}{'+' if v.imag >= 0 else '-'}{format_number(abs(v.imag))}j"
    return str(v)


def _json_value(v: Any) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format_number(v) if math.isfinite(v) else "null"
    if isinstance(v, complex):
        return _json_value([v.real, v.imag])
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    if isinstance(v, dict):
        items = (f"{json.dumps(str(k))}: {_json_value(val)}" for k, val in v.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    if hasattr(v, "item"):  # numpy scalar
        return _json_value(v.item())
    raise TypeError(f"cannot serialize {type(v).__name__}")


def to_csv(table: ReportTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_csv_cell(_plain(v)) for v in row])
    return buf.getvalue()


def to_json(table: ReportTable) -> str:
    rows = ",\n    ".join(_json_value([_plain(v) for v in row]) for row in table.rows)
    body = [
        f'  "columns": {_json_value(list(table.columns))}',
        '  "rows": [' + (f"\n    {rows}\n  ]" if table.rows else "]"),
        f'  "provenance": {_json_value(table.provenance)}',
    ]
    return "{\n" + ",\n".join(body) + "\n}\n"


def _plain(v):
    return v.item() if hasattr(v, "item") else v


def render(table: ReportTable, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(table)
    if fmt == "json":
        return to_json(table)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def emit(table: ReportTable, path: Optional[str], fmt: str) -> str:
    """Serialize ``table`` and write it to ``path`` (UTF-8, LF newlines).

    Returns the serialized text; ``path=None`` only renders.
    """
    text = render(table, fmt)
    if path is not None:
        try:
            with open(Path(path), "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return text


def read_json(text: str) -> ReportTable:
    data = json.loads(text)
    return ReportTable(data["columns"], data["rows"], data.get("provenance", {}))
