"""Text and JSON file formats for arcs, maps and run manifests."""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Iterable, TextIO

from .geometry import Arc, ProjPoint
from .gf2m import FieldSpec
from .pqmaps import PqMap

ARC_MAGIC = "maxarc v1"
_HEADER = re.compile(r"^maxarc v1 m=(\d+) modulus=([0-9a-fA-F]+) n=(\d+)$")


class FormatError(ValueError):
    def __init__(self, msg: str, line: int | None = None, path: str | None = None):
        where = ""
        if path:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {msg}".strip())
        self.line = line


def format_arc(arc: Arc) -> str:
    f = arc.field
    lines = [f"{ARC_MAGIC} m={f.m} modulus={f.modulus:x} n={arc.degree_claim}"]
    lines.extend(str(p) for p in sorted(arc.points))
    return "\n".join(lines) + "\n"


def write_arc(arc: Arc, path: str | Path) -> None:
    Path(path).write_text(format_arc(arc))


def parse_arc(text: str | Iterable[str], path: str | None = None) -> Arc:
    lines = text.splitlines() if isinstance(text, str) else list(text)
    if not lines:
        raise FormatError("empty arc file", 1, path)
    m = _HEADER.match(lines[0].strip())
    if not m:
        raise FormatError(f"bad header {lines[0].strip()!r}", 1, path)
    try:
        f = FieldSpec(int(m.group(1)), int(m.group(2), 16))
    except ValueError as exc:
        raise FormatError(str(exc), 1, path) from exc
    n = int(m.group(3))
    seen: dict[ProjPoint, int] = {}
    for lineno, raw in enumerate(lines[1:], start=2):
        s = raw.strip()
        if not s:
            continue
        parts = s.split()
        if len(parts) != 3:
            raise FormatError(f"expected 3 coordinates, got {len(parts)}", lineno, path)
        try:
            xyz = [f.check(int(h, 16)) for h in parts]
            p = ProjPoint.of(f, *xyz)
        except ValueError as exc:
            raise FormatError(str(exc), lineno, path) from exc
        if p in seen:
            raise FormatError(f"duplicate point {p} (first on line {seen[p]})", lineno, path)
        seen[p] = lineno
    return Arc(f, tuple(sorted(seen)), n)


def read_arc(path: str | Path) -> Arc:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(str(exc), None, str(path)) from exc
    return parse_arc(text, str(path))


def write_json(obj, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path: str | Path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(str(exc), getattr(exc, "lineno", None), str(path)) from exc


def write_pqmap(pq: PqMap, path: str | Path) -> None:
    write_json(pq.to_json(), path)


def read_pqmap(path: str | Path) -> PqMap:
    obj = read_json(path)
    try:
        return PqMap.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"invalid map: {exc}", None, str(path)) from exc


def write_jsonl(rows: Iterable[dict], fh: TextIO) -> int:
    n = 0
    for row in rows:
        fh.write(json.dumps(row, sort_keys=True) + "\n")
        n += 1
    return n
