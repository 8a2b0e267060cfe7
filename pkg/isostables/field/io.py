import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from isostables.core.errors import ConfigError
from isostables.core.output import timestamp, write_csv, write_json
from isostables.field.models import ContourSet, ScalarField
from isostables.field.schemas import GridSpec

logger = logging.getLogger(__name__)

VALUE_COLUMNS = ["magnitude", "phase", "tau", "status", "basin", "s1_re", "s1_im"]


def header_path(csv_path: Path) -> Path:
    """The JSON header sits next to the CSV with the same stem."""
    return Path(csv_path).with_suffix(".json")


def field_columns(dim: int) -> list:
    return [f"x{i + 1}" for i in range(dim)] + VALUE_COLUMNS


def write_field(field: ScalarField, destination: Path, with_timestamp: bool = True) -> Path:
    """Write the per-point CSV and its JSON header; returns the header path."""
    destination = Path(destination)
    rows = (
        [*point, magnitude, phase, tau, status, int(basin), s1.real, s1.imag]
        for point, magnitude, phase, tau, status, basin, s1 in zip(
            field.points, field.magnitude, field.phase, field.tau, field.status, field.basin, field.s1
        )
    )
    write_csv(field_columns(field.dim), rows, destination)

    header: Dict[str, Any] = {
        "grid": field.grid.model_dump(exclude_none=True),
        "columns": field_columns(field.dim),
        **field.metadata,
        "counts": field.counts(),
    }
    if with_timestamp:
        header["created_at"] = timestamp()
    target = header_path(destination)
    write_json(header, target)
    logger.info(f"Field written to {destination} ({len(field)} points)")
    return target


def read_field(source: Path) -> ScalarField:
    """Read a field CSV and its header back into a ScalarField."""
    source = Path(source)
    target = header_path(source)
    if not target.exists():
        raise ConfigError("Field header not found", resolution="Keep the .json header next to the field CSV",
                          path=str(target))
    header = json.loads(target.read_text(encoding="utf-8"))
    grid = GridSpec(**header["grid"])

    with source.open(encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        records = list(reader)
    coordinates = [f"x{i + 1}" for i in range(grid.dim)]
    missing = [c for c in coordinates + VALUE_COLUMNS if reader.fieldnames is None or c not in reader.fieldnames]
    if missing:
        raise ConfigError("Field file is missing columns", path=str(source), missing=missing)
    if len(records) != grid.size:
        raise ConfigError("Field file does not match its grid", path=str(source),
                          expected=grid.size, received=len(records))

    def column(name: str, dtype=float) -> np.ndarray:
        return np.array([dtype(record[name]) for record in records])

    metadata = {key: value for key, value in header.items() if key not in ("grid", "columns", "counts")}
    return ScalarField(
        grid=grid,
        points=np.stack([column(c) for c in coordinates], axis=1),
        magnitude=column("magnitude"),
        phase=column("phase"),
        tau=column("tau"),
        status=column("status", str),
        s1=column("s1_re") + 1j * column("s1_im"),
        basin=column("basin", int),
        metadata=metadata,
    )


def write_contours(contours: ContourSet, directory: Path, source: Optional[str] = None,
                   with_timestamp: bool = True) -> Path:
    """One `contour_<i>.json` per level plus an `index.json` listing levels and empty levels."""
    directory = Path(directory)
    files = []
    for index, level in enumerate(contours.levels):
        document: Dict[str, Any] = {"level": level, "quantity": contours.quantity.value}
        if contours.dim == 2:
            document["polylines"] = [line.tolist() for line in contours.polylines[index]]
        else:
            document["points"] = contours.point_clouds[index].tolist()
        name = f"contour_{index}.json"
        write_json(document, directory / name)
        files.append(name)

    index_document: Dict[str, Any] = {
        "quantity": contours.quantity.value,
        "dim": contours.dim,
        "levels": contours.levels,
        "empty_levels": contours.empty_levels,
        "files": files,
    }
    if source is not None:
        index_document["field"] = source
    if with_timestamp:
        index_document["created_at"] = timestamp()
    target = directory / "index.json"
    write_json(index_document, target)
    return target
