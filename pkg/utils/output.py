"""
Result writers.

Tables are written as CSV with a header row, or as JSON lists of records.
Floats use repr so reruns with the same seed produce identical bytes.
"""

import csv
import json
from pathlib import Path
from typing import Any, Iterable, Sequence, Union

from pydantic import BaseModel

TABLE_FORMATS = ("csv", "json")


def _cell(value: Any) -> Any:
    if isinstance(value, float):
        return repr(value)
    return value


def write_table(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Any]],
                fmt: str = "csv") -> Path:
    """
    Write a table; ``fmt="json"`` swaps the suffix to .json.

    Raises:
        ValueError: If a row's length differs from the header's.
    """
    path = Path(path)
    rows = [list(r) for r in rows]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row {row} has {len(row)} columns, header has {len(header)}")
    path.parent.mkdir(parents=True, exist_ok=True)

    if fmt == "json":
        path = path.with_suffix(".json")
        records = [dict(zip(header, row)) for row in rows]
        write_json(path, records)
        return path

    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([_cell(v) for v in row] for row in rows)
    return path


def write_json(path: Union[str, Path], payload: Any) -> Path:
    """Write a dict, list or pydantic model as indented JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(payload, BaseModel):
        text = payload.model_dump_json(indent=2)
    else:
        text = json.dumps(payload, indent=2, default=_default)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def _default(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    if hasattr(value, "tolist"):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"cannot serialise {type(value).__name__}")


def read_table(path: Union[str, Path]) -> list:
    """Rows of a CSV table as lists of strings, header first."""
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.reader(f))
