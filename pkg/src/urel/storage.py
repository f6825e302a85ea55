"""Directory-of-TSV database format.

Layout::

    DIR/manifest.json     relations, partitions, world file, flags
    DIR/world.tsv         var, val[, prob]
    DIR/<rel>_<i>.tsv     d, t1..tk, one column per covered attribute

Descriptors are written as ``var=val`` pairs joined by ``;`` (sorted by
variable; empty for the empty descriptor) and tuple-id atoms as ``tag:id``.
"""
from __future__ import annotations

import csv
import datetime
import io
import json
import re
from decimal import Decimal
from pathlib import Path
from typing import Iterable, Sequence

from .errors import StorageError
from .model import (
    Descriptor,
    RelationDef,
    UDatabase,
    URelation,
    Value,
    WorldTable,
    format_value,
    value_tag,
)

_INT = re.compile(r"-?\d+\Z")
_DEC = re.compile(r"-?\d+\.\d+\Z")
_DATE = re.compile(r"\d{4}-\d{2}-\d{2}\Z")


def parse_value(text: str, tag: str | None = None) -> Value:
    """Parse a serialized value, inferring its type tag unless one is given."""
    if tag is None:
        if text.startswith("(") and text.endswith(")"):
            tag = "tuple"
        elif _INT.match(text):
            tag = "integer"
        elif _DEC.match(text):
            tag = "decimal"
        elif _DATE.match(text):
            tag = "date"
        else:
            tag = "string"
    try:
        if tag == "integer":
            return int(text)
        if tag == "decimal":
            return Decimal(text)
        if tag == "date":
            return datetime.date.fromisoformat(text)
        if tag == "tuple":
            inner = text[1:-1]
            return tuple(parse_value(part) for part in _split_tuple(inner)) if inner else ()
    except ValueError as exc:
        raise StorageError(f"cannot parse {text!r} as {tag}") from exc
    if tag == "string":
        return text
    raise StorageError(f"unknown value type {tag!r}")


def _split_tuple(inner: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in inner:
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        cur.append(ch)
    parts.append("".join(cur))
    return parts


def format_descriptor(d: Descriptor) -> str:
    return ";".join(f"{var}={format_value(val)}" for var, val in d.items)


def parse_descriptor(text: str) -> Descriptor:
    if not text:
        return Descriptor()
    pairs = []
    for part in text.split(";"):
        var, sep, val = part.partition("=")
        if not sep:
            raise StorageError(f"malformed descriptor entry {part!r}")
        pairs.append((var, parse_value(val)))
    return Descriptor(pairs)


def format_atom(tag: str, value) -> str:
    return "" if value is None else f"{tag}:{format_value(value)}"


def parse_atom(text: str, tag: str | None, type_tag: str | None = None):
    if text == "":
        return None
    got, sep, ident = text.partition(":")
    if not sep:
        raise StorageError(f"malformed tuple-id atom {text!r}")
    if tag is not None and got != tag:
        raise StorageError(f"tuple-id atom {text!r} does not carry origin tag {tag!r}")
    return parse_value(ident, type_tag)


# ---------------------------------------------------------------------------
# TSV


def _write_tsv(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _read_tsv(path: Path) -> tuple[list[str], list[list[str]]]:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh, delimiter="\t")
            rows = list(reader)
    except OSError as exc:
        raise StorageError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise StorageError(f"{path} has no header row")
    return rows[0], rows[1:]


def world_tsv(w: WorldTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    writer.writerow(["var", "val", "prob"] if w.probabilistic else ["var", "val"])
    for var, val in w.entries():
        row = [var, format_value(val)]
        if w.probabilistic:
            row.append(repr(w.probs[(var, val)]))
        writer.writerow(row)
    return buf.getvalue()


def urelation_tsv(u: URelation) -> str:
    """Render a U-relation in the partition TSV layout (rows in stored order)."""
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    writer.writerow(_partition_header(u))
    writer.writerows(_partition_rows(u))
    return buf.getvalue()


def _partition_header(u: URelation) -> list[str]:
    return ["d"] + [f"t{i + 1}" for i in range(u.tid_arity)] + list(u.attrs)


def _partition_rows(u: URelation):
    for d, t, a in u.rows:
        yield [format_descriptor(d)] + [format_atom(tag, x) for tag, x in zip(u.tid_cols, t)] + [format_value(v) for v in a]


def read_world(path: Path) -> WorldTable:
    header, rows = _read_tsv(path)
    if header[:2] != ["var", "val"]:
        raise StorageError(f"{path}: world table header must start with var, val")
    probabilistic = len(header) > 2 and header[2] == "prob"
    entries, probs = [], {}
    for row in rows:
        var, val = row[0], parse_value(row[1])
        entries.append((var, val))
        if probabilistic:
            probs[(var, val)] = float(row[2])
    return WorldTable.from_entries(entries, probs if probabilistic else None)


def read_partition(path: Path, attrs: Sequence[str], tid_tags: Sequence[str] | int, types: dict | None = None) -> URelation:
    """Read one partition file.  ``tid_tags`` may be an arity, in which case
    the origin tags are taken from the atoms themselves."""
    header, rows = _read_tsv(path)
    if isinstance(tid_tags, int):
        k = tid_tags
        tid_tags = [_column_tag(rows, 1 + i) or f"t{i + 1}" for i in range(k)]
    k = len(tid_tags)
    expected = ["d"] + [f"t{i + 1}" for i in range(k)] + list(attrs)
    if header != expected:
        raise StorageError(f"{path}: header {header} does not match expected {expected}")
    types = types or {}
    tid_type = types.get("__tid__")
    attr_types = [types.get(a) for a in attrs]
    out = []
    for row in rows:
        if len(row) != len(expected):
            raise StorageError(f"{path}: row {row} has {len(row)} fields, expected {len(expected)}")
        d = parse_descriptor(row[0])
        t = tuple(parse_atom(cell, tag, tid_type) for cell, tag in zip(row[1 : 1 + k], tid_tags))
        a = tuple(parse_value(cell, tt) for cell, tt in zip(row[1 + k :], attr_types))
        out.append((d, t, a))
    return URelation(attrs, tid_tags, out)


def _column_tag(rows, col):
    for row in rows:
        if col < len(row) and row[col]:
            return row[col].partition(":")[0]
    return None


# ---------------------------------------------------------------------------
# whole databases


def _column_types(rel: RelationDef) -> dict[str, str]:
    types: dict[str, str] = {}
    for part in rel.partitions:
        for _, t, a in part.rows:
            for attr, v in zip(part.attrs, a):
                types.setdefault(attr, value_tag(v))
            if t and t[0] is not None:
                types.setdefault("__tid__", value_tag(t[0]))
    return types


def save_database(db: UDatabase, directory: str | Path) -> Path:
    """Write ``db`` to ``directory``; output is a pure function of ``db``."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    (root / "world.tsv").write_text(world_tsv(db.world), encoding="utf-8")
    manifest = {"relations": [], "world_file": "world.tsv", "probabilistic": db.world.probabilistic,
                "reduced": db.reduced, "normalized": db.normalized}
    for name, rel in db.relations.items():
        entry = {"name": name, "attrs": list(rel.attrs), "types": _column_types(rel), "partitions": []}
        for i, part in enumerate(rel.partitions):
            fname = f"{name}_{i}.tsv"
            _write_tsv(root / fname, _partition_header(part), _partition_rows(part))
            entry["partitions"].append({"file": fname, "tid_arity": part.tid_arity, "covered_attrs": list(part.attrs)})
        manifest["relations"].append(entry)
    (root / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return root


def load_database(directory: str | Path) -> UDatabase:
    root = Path(directory)
    try:
        manifest = json.loads((root / "manifest.json").read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise StorageError(f"cannot read manifest in {root}: {exc}") from exc
    world = read_world(root / manifest.get("world_file", "world.tsv"))
    if manifest.get("probabilistic") and not world.probabilistic:
        raise StorageError("manifest declares a probabilistic database but the world table has no prob column")
    relations = {}
    for entry in manifest["relations"]:
        name = entry["name"]
        parts = []
        for p in entry["partitions"]:
            arity = int(p.get("tid_arity", 1))
            tags = [name] if arity == 1 else arity
            parts.append(read_partition(root / p["file"], p["covered_attrs"], tags, entry.get("types")))
        relations[name] = RelationDef(tuple(entry["attrs"]), tuple(parts))
    return UDatabase(world, relations, reduced=bool(manifest.get("reduced", False)),
                     normalized=bool(manifest.get("normalized", False)))


def relation_tsv(attrs: Sequence[str], rows: Iterable[Sequence[Value]]) -> str:
    """Plain value-column TSV (used for possible/certain answers)."""
    from .model import sort_key

    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    writer.writerow(list(attrs))
    for row in sorted(rows, key=lambda r: tuple(map(sort_key, r))):
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()
