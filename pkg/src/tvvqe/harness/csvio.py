"""Fixed-schema CSV files with a versioned comment header.

Floats are written with ``repr`` so every value survives a write/read round
trip exactly; ``None`` is written as an empty field.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

SCHEMA_VERSION = 1

# column name -> type, per file kind
SCHEMAS: dict[str, tuple[tuple[str, type], ...]] = {
    "convergence": (
        ("system", str),
        ("method", str),
        ("state_index", int),
        ("state_label", str),
        ("occupation", str),
        ("iteration", int),
        ("phase", str),
        ("energy", float),
        ("exact_energy", float),
        ("log_error", float),
        ("tangent_norm", float),
    ),
    "convergence_summary": (
        ("state_index", int),
        ("state_label", str),
        ("final_energy", float),
        ("exact_energy", float),
        ("final_log_error", float),
        ("start_tv_opt", int),
        ("local_minimum_suspect", int),
    ),
    "tangent_scatter": (
        ("state_index", int),
        ("state_label", str),
        ("iteration", int),
        ("phase", str),
        ("tangent_norm", float),
        ("log_error", float),
        ("tv_start", int),
    ),
    "bond_scan": (
        ("method", str),
        ("bond_length", float),
        ("state_index", int),
        ("state_label", str),
        ("energy", float),
        ("exact_energy", float),
        ("log_error", float),
        ("phase1_log_error", float),
    ),
    "bond_scan_summary": (
        ("method", str),
        ("state_index", int),
        ("state_label", str),
        ("mean_log_error", float),
        ("points", int),
    ),
    "gradient_check": (
        ("draw", int),
        ("component", int),
        ("analytic", float),
        ("fdm", float),
        ("abs_diff", float),
    ),
    "exact_spectrum": (
        ("index", int),
        ("energy", float),
        ("electrons", float),
        ("sz", float),
    ),
}


class CsvSchemaError(ValueError):
    pass


@dataclass
class Table:
    kind: str
    rows: list[dict]
    meta: dict[str, str]


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dumps(kind: str, rows, meta: dict[str, str] | None = None) -> str:
    if kind not in SCHEMAS:
        raise CsvSchemaError(f"unknown CSV kind {kind!r}")
    columns = [c for c, _ in SCHEMAS[kind]]
    head = {"schema": str(SCHEMA_VERSION), "kind": kind, **(meta or {})}
    buf = io.StringIO()
    buf.write("# " + " ".join(f"{k}={v}" for k, v in head.items()) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        missing = set(columns) - set(row)
        if missing:
            raise CsvSchemaError(f"row is missing columns {sorted(missing)}")
        w.writerow([_format(row[c]) for c in columns])
    return buf.getvalue()


def write(path, kind: str, rows, meta: dict[str, str] | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(kind, rows, meta), encoding="utf-8")
    return path


def _parse_meta(line: str) -> dict[str, str]:
    meta = {}
    for tok in line[1:].split():
        if "=" in tok:
            k, v = tok.split("=", 1)
            meta[k] = v
    return meta


def loads(text: str, source: str = "<csv>") -> Table:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise CsvSchemaError(f"{source}:1: missing schema header comment")
    meta = _parse_meta(lines[0])
    kind = meta.pop("kind", None)
    version = meta.pop("schema", None)
    if kind not in SCHEMAS:
        raise CsvSchemaError(f"{source}:1: unknown CSV kind {kind!r}")
    if version != str(SCHEMA_VERSION):
        raise CsvSchemaError(f"{source}:1: unsupported schema version {version!r}")
    schema = SCHEMAS[kind]
    reader = csv.reader(lines[1:])
    header = next(reader, None)
    if header != [c for c, _ in schema]:
        raise CsvSchemaError(f"{source}:2: header {header} does not match the {kind} schema")
    rows = []
    for lineno, fields in enumerate(reader, start=3):
        if len(fields) != len(schema):
            raise CsvSchemaError(f"{source}:{lineno}: expected {len(schema)} fields, got {len(fields)}")
        row = {}
        for (name, typ), raw in zip(schema, fields):
            if raw == "":
                row[name] = None
                continue
            try:
                row[name] = typ(raw)
            except ValueError as exc:
                raise CsvSchemaError(f"{source}:{lineno}: bad {name} value {raw!r}") from exc
        rows.append(row)
    return Table(kind, rows, meta)


def read(path) -> Table:
    path = Path(path)
    return loads(path.read_text(encoding="utf-8"), str(path))
