"""
JSON and CSV writers that print every float with full round-trip precision.
"""

import csv
import json
import math
import sys
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, TextIO

import numpy as np
from pydantic import BaseModel

from isostables.core.config import settings


def format_float(value: float, digits: Optional[int] = None) -> str:
    """Format with `digits` significant digits; non-finite values are spelled out."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, f".{digits or settings.FLOAT_DIGITS}g")


def _encode(obj: Any, indent: Optional[int], level: int) -> str:
    if isinstance(obj, BaseModel):
        return _encode(obj.model_dump(), indent, level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, Enum):
        return _encode(obj.value, indent, level)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode({"re": obj.real, "im": obj.imag}, indent, level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, Path):
        return json.dumps(str(obj))
    if isinstance(obj, datetime):
        return json.dumps(obj.isoformat())
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)

    if isinstance(obj, dict):
        items = [(json.dumps(str(key)), value) for key, value in obj.items()]
        if not items:
            return "{}"
        if indent is None:
            return "{" + ", ".join(f"{key}: {_encode(value, indent, level + 1)}" for key, value in items) + "}"
        pad = " " * (indent * (level + 1))
        body = ",\n".join(f"{pad}{key}: {_encode(value, indent, level + 1)}" for key, value in items)
        return "{\n" + body + "\n" + " " * (indent * level) + "}"

    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # numeric rows stay on one line
        if indent is None or all(not isinstance(item, (dict, list, tuple, np.ndarray)) for item in obj):
            return "[" + ", ".join(_encode(item, None, level + 1) for item in obj) + "]"
        pad = " " * (indent * (level + 1))
        body = ",\n".join(pad + _encode(item, indent, level + 1) for item in obj)
        return "[\n" + body + "\n" + " " * (indent * level) + "]"

    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def dumps(obj: Any, indent: Optional[int] = None) -> str:
    """
    Serialize to JSON. Floats carry 17 significant digits, NaN and infinities
    become null, complex numbers become {"re", "im"} objects.
    """
    return _encode(obj, indent, 0)


def write_json(obj: Any, destination: Optional[Path] = None, stream: Optional[TextIO] = None) -> None:
    text = dumps(obj, indent=2) + "\n"
    if destination is not None:
        destination = Path(destination)
        destination.parent.mkdir(parents=True, exist_ok=True)
        destination.write_text(text, encoding="utf-8")
    else:
        (stream or sys.stdout).write(text)


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], destination: Optional[Path] = None,
              stream: Optional[TextIO] = None) -> None:
    """Write rows with floats formatted by `format_float`."""

    def cell(value: Any) -> str:
        if isinstance(value, (float, np.floating)):
            return format_float(value)
        if isinstance(value, Enum):
            return str(value.value)
        return str(value)

    def emit(handle: TextIO) -> None:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([cell(value) for value in row])

    if destination is not None:
        destination = Path(destination)
        destination.parent.mkdir(parents=True, exist_ok=True)
        with destination.open("w", encoding="utf-8", newline="") as handle:
            emit(handle)
    else:
        emit(stream or sys.stdout)


def timestamp() -> str:
    return datetime.now(timezone.utc).isoformat()

