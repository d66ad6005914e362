"""
Structured-text and CSV input/output.

YAML or JSON is chosen by file suffix (``.yaml``/``.yml``/``.json``). Output
is deterministic: YAML keeps insertion order, JSON is indented with two
spaces, CSV rows keep the column order they were built with.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Literal, Mapping, Sequence, Union

import yaml

from .coloring import Schedule, ScheduleFormatError
from .models import Model, ModelFormatError
from .routing import PathFormatError, PathSet
from .system_graph import GraphFormatError, SystemGraph

logger = logging.getLogger(__name__)

DocumentFormat = Literal["yaml", "json"]

_SUFFIXES: dict[str, DocumentFormat] = {".yaml": "yaml", ".yml": "yaml", ".json": "json"}


class SerializationError(Exception):
    """Raised when a document cannot be read, parsed or written."""
    pass


def format_for(path: Union[str, Path]) -> DocumentFormat:
    suffix = Path(path).suffix.lower()
    if suffix not in _SUFFIXES:
        raise SerializationError(f"Unsupported file format: {suffix or '<none>'} ({path})")
    return _SUFFIXES[suffix]


def render_document(data: Any, fmt: DocumentFormat = "yaml") -> str:
    if fmt == "json":
        return json.dumps(data, indent=2) + "\n"
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None, width=100)


def parse_document(text: str, fmt: DocumentFormat, source: str = "<string>") -> Any:
    try:
        if fmt == "json":
            return json.loads(text)
        return yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise SerializationError(f"Failed to parse YAML from {source}: {e}")
    except json.JSONDecodeError as e:
        raise SerializationError(f"Failed to parse JSON from {source}: {e}")


def dump_document(data: Any, path: Union[str, Path]) -> Path:
    """Write ``data`` to ``path`` in the format its suffix names."""
    target = Path(path)
    text = render_document(data, format_for(target))
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text)
    except OSError as e:
        raise SerializationError(f"Failed to write {target}: {e}")
    logger.info(f"Wrote {target}")
    return target


def load_document(path: Union[str, Path]) -> Any:
    source = Path(path)
    fmt = format_for(source)
    try:
        text = source.read_text()
    except OSError as e:
        raise SerializationError(f"Failed to read {source}: {e}")
    return parse_document(text, fmt, str(source))


def _load_mapping(path: Union[str, Path], what: str) -> Mapping[str, Any]:
    data = load_document(path)
    if not isinstance(data, dict):
        raise SerializationError(f"{what.capitalize()} file {path} must contain a mapping")
    return data


def load_graph(path: Union[str, Path]) -> SystemGraph:
    try:
        return SystemGraph.from_dict(_load_mapping(path, "graph"))
    except GraphFormatError as e:
        raise GraphFormatError(f"{path}: {e}")


def load_model(path: Union[str, Path]) -> Model:
    try:
        return Model.from_dict(_load_mapping(path, "model"))
    except ModelFormatError as e:
        raise ModelFormatError(f"{path}: {e}")


def load_paths(path: Union[str, Path]) -> PathSet:
    data = load_document(path)
    if isinstance(data, dict) and "paths" in data:
        data = data["paths"]
    if not isinstance(data, dict):
        raise PathFormatError(f"Path set file {path} must contain a mapping")
    return PathSet.from_dict(data)


def load_schedule(path: Union[str, Path]) -> Schedule:
    try:
        return Schedule.from_dict(_load_mapping(path, "schedule"))
    except ScheduleFormatError as e:
        raise ScheduleFormatError(f"{path}: {e}")


def render_csv(rows: Sequence[Mapping[str, Any]], columns: Sequence[str]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({column: row.get(column, "") for column in columns})
    return buffer.getvalue()


def write_csv(rows: Sequence[Mapping[str, Any]], columns: Sequence[str], path: Union[str, Path]) -> Path:
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(render_csv(rows, columns))
    except OSError as e:
        raise SerializationError(f"Failed to write {target}: {e}")
    logger.info(f"Wrote {target}")
    return target
