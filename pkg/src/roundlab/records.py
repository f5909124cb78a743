"""Line-delimited JSON result streams and flat summary tables."""
from __future__ import annotations

import json
import math
from typing import Iterable, TextIO

SCHEMA = "roundlab.records/1"


def header(command: str, config: dict) -> dict:
    return {"schema": SCHEMA, "command": command, "config": config}


def dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def write_stream(stream: TextIO, command: str, config: dict, records: Iterable[dict]) -> None:
    stream.write(dumps(header(command, config)) + "\n")
    for rec in records:
        stream.write(dumps(rec) + "\n")


def read_stream(stream: TextIO) -> tuple[dict, list[dict]]:
    lines = [json.loads(line) for line in stream if line.strip()]
    if not lines or lines[0].get("schema") != SCHEMA:
        raise ValueError(f"stream does not start with a {SCHEMA} header")
    return lines[0], lines[1:]


def format_value(value) -> str:
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            return str(value)
        return f"{value:.4g}"
    if isinstance(value, (list, dict)):
        return json.dumps(value, separators=(",", ":"))
    return str(value)


def render_table(records: list[dict], columns: list[str] | None = None) -> str:
    """Aligned text table; columns default to scalar keys in first-seen order."""
    if columns is None:
        columns = []
        for rec in records:
            columns += [k for k, v in rec.items()
                        if k not in columns and not isinstance(v, (list, dict))]
    cells = [[format_value(rec.get(c, "")) for c in columns] for rec in records]
    widths = [max([len(c)] + [len(row[j]) for row in cells]) for j, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


def report(results: list[dict], columns: list[str] | None = None) -> tuple[str, list[str]]:
    """Rendered table plus one serialized line per record."""
    return render_table(results, columns), [dumps(r) for r in results]
