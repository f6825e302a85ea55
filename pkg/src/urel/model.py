"""The U-relational data model.

A database is a world table (finite variables with finite domains) plus,
for every logical relation, a list of vertical partitions.  Each partition
is a :class:`URelation` whose rows are ``(descriptor, tids, values)``
triples: the values are present in exactly those worlds that extend the
descriptor.
"""
from __future__ import annotations

import datetime
import math
from dataclasses import dataclass, field
from decimal import Decimal
from itertools import combinations
from typing import Any, Iterable, Iterator, Mapping, Sequence

from .errors import (
    ConflictingAssignment,
    InvalidWorldTable,
    NotProbabilistic,
    SchemaError,
    ValueTypeError,
)

Value = Any  # int | Decimal | str | datetime.date | tuple (fused values)

PROB_TOLERANCE = 1e-9


# ---------------------------------------------------------------------------
# values


def value_tag(v: Value) -> str:
    if isinstance(v, bool):
        raise ValueTypeError(f"booleans are not database values: {v!r}")
    if isinstance(v, int):
        return "integer"
    if isinstance(v, Decimal):
        return "decimal"
    if isinstance(v, str):
        return "string"
    if isinstance(v, datetime.date):
        return "date"
    if isinstance(v, tuple):
        return "tuple"
    raise ValueTypeError(f"unsupported value {v!r} of type {type(v).__name__}")


_TAG_ORDER = {"integer": 0, "decimal": 1, "string": 2, "date": 3, "tuple": 4}


def sort_key(v: Value):
    """Total order over all values, used only for deterministic output."""
    if v is None:
        return (-1,)
    tag = value_tag(v)
    if tag == "tuple":
        return (4, tuple(sort_key(x) for x in v))
    return (_TAG_ORDER[tag], v)


_COMPARATORS = {
    "=": lambda a, b: a == b,
    "<>": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
}

COMPARISON_OPS = tuple(_COMPARATORS)


def compare(left: Value, op: str, right: Value) -> bool:
    lt, rt = value_tag(left), value_tag(right)
    if lt != rt:
        raise ValueTypeError(f"cannot compare {lt} {left!r} with {rt} {right!r}")
    return _COMPARATORS[op](left, right)


# ---------------------------------------------------------------------------
# ws-descriptors


class Descriptor:
    """A consistent partial valuation, kept sorted by variable id.

    >>> d = Descriptor({"y": 2, "x": 1})
    >>> d
    {x↦1, y↦2}
    >>> d.consistent(Descriptor({"x": 2}))
    False
    """

    __slots__ = ("_items", "_map", "_hash")

    def __init__(self, assignments: Mapping[str, Value] | Iterable[tuple[str, Value]] = ()):
        pairs = assignments.items() if isinstance(assignments, Mapping) else assignments
        mapping: dict[str, Value] = {}
        for var, val in pairs:
            if var in mapping and mapping[var] != val:
                raise ConflictingAssignment(var, mapping[var], val)
            mapping[var] = val
        items = tuple(sorted(mapping.items(), key=lambda kv: kv[0]))
        self._items = items
        self._map = dict(items)
        self._hash = hash(items)

    @property
    def items(self) -> tuple[tuple[str, Value], ...]:
        return self._items

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(var for var, _ in self._items)

    def get(self, var: str, default=None):
        return self._map.get(var, default)

    def __contains__(self, var: str) -> bool:
        return var in self._map

    def __iter__(self) -> Iterator[tuple[str, Value]]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __eq__(self, other) -> bool:
        return isinstance(other, Descriptor) and self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Descriptor") -> bool:
        return descriptor_key(self) < descriptor_key(other)

    def __repr__(self) -> str:
        return "{" + ", ".join(f"{var}↦{format_value(val)}" for var, val in self._items) + "}"

    def consistent(self, other: "Descriptor") -> bool:
        small, big = (self, other) if len(self) <= len(other) else (other, self)
        bm = big._map
        for var, val in small._items:
            if var in bm and bm[var] != val:
                return False
        return True

    def combine(self, other: "Descriptor") -> "Descriptor":
        if not other._items:
            return self
        if not self._items:
            return other
        merged = dict(self._map)
        for var, val in other._items:
            if var in merged and merged[var] != val:
                raise ConflictingAssignment(var, merged[var], val)
            merged[var] = val
        return Descriptor(merged)


EMPTY = Descriptor()


def descriptor_key(d: Descriptor):
    return tuple((var, sort_key(val)) for var, val in d.items)


def consistent(d1: Descriptor, d2: Descriptor) -> bool:
    return d1.consistent(d2)


def combine(d1: Descriptor, d2: Descriptor) -> Descriptor:
    return d1.combine(d2)


def extends(f: Mapping[str, Value], d: Descriptor) -> bool:
    """True iff the total valuation ``f`` agrees with ``d`` wherever ``d`` is defined."""
    return all(var in f and f[var] == val for var, val in d.items)


# ---------------------------------------------------------------------------
# world table


@dataclass(frozen=True)
class WorldTable:
    """Variables with their ordered finite domains, optionally with probabilities."""

    domains: Mapping[str, tuple[Value, ...]] = field(default_factory=dict)
    probs: Mapping[tuple[str, Value], float] | None = None

    def __post_init__(self):
        doms = {}
        for var, values in self.domains.items():
            values = tuple(dict.fromkeys(values))
            if not values:
                raise InvalidWorldTable(f"variable {var!r} has an empty domain")
            doms[var] = values
        object.__setattr__(self, "domains", doms)
        if self.probs is not None:
            probs = dict(self.probs)
            entries = set(self.entries())
            if set(probs) != entries:
                raise InvalidWorldTable("probabilities must cover exactly the world-table entries")
            for var, values in doms.items():
                ps = [probs[(var, v)] for v in values]
                if any(not (0.0 < p <= 1.0) for p in ps):
                    raise InvalidWorldTable(f"probabilities of {var!r} must lie in (0, 1]")
                if abs(math.fsum(ps) - 1.0) > PROB_TOLERANCE:
                    raise InvalidWorldTable(f"probabilities of {var!r} sum to {math.fsum(ps)!r}, not 1")
            object.__setattr__(self, "probs", probs)

    @classmethod
    def from_entries(cls, entries: Iterable[tuple[str, Value]], probs=None) -> "WorldTable":
        doms: dict[str, list] = {}
        for var, val in entries:
            doms.setdefault(var, []).append(val)
        return cls({k: tuple(v) for k, v in doms.items()}, probs)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(sorted(self.domains))

    @property
    def probabilistic(self) -> bool:
        return self.probs is not None

    def entries(self) -> Iterator[tuple[str, Value]]:
        for var, values in self.domains.items():
            for v in values:
                yield var, v

    def __contains__(self, entry: tuple[str, Value]) -> bool:
        var, val = entry
        return var in self.domains and val in self.domains[var]

    def __len__(self) -> int:
        return len(self.domains)

    def world_count(self) -> int:
        return math.prod(len(v) for v in self.domains.values())


def world_count_log10(w: WorldTable) -> float:
    return math.fsum(math.log10(len(v)) for v in w.domains.values())


def descriptor_probability(d: Descriptor, w: WorldTable) -> float:
    if w.probs is None:
        raise NotProbabilistic("world table carries no probabilities")
    p = 1.0
    for var, val in d.items:
        p *= w.probs[(var, val)]
    return p


def covers_all_worlds(descriptors: Iterable[Descriptor], w: WorldTable) -> bool:
    """Whether every total valuation of ``w`` extends at least one descriptor."""
    ds = list(set(descriptors))
    if not ds:
        return False
    if any(len(d) == 0 for d in ds):
        return True
    var = ds[0].items[0][0]
    for val in w.domains[var]:
        restricted = []
        for d in ds:
            got = d.get(var, _MISSING)
            if got is _MISSING:
                restricted.append(d)
            elif got == val:
                restricted.append(Descriptor((k, v) for k, v in d.items if k != var))
        if not covers_all_worlds(restricted, w):
            return False
    return True


_MISSING = object()


# ---------------------------------------------------------------------------
# U-relations

Row = tuple  # (Descriptor, tids: tuple, values: tuple)


class URelation:
    """A set of ``(descriptor, tids, values)`` rows over named columns.

    Rows keep insertion order (for stable output) but equality is set
    equality.  ``tid_cols`` names the tuple-id slots; their names double as
    origin tags.
    """

    __slots__ = ("attrs", "tid_cols", "rows")

    def __init__(self, attrs: Sequence[str], tid_cols: Sequence[str], rows: Iterable[Row] = ()):
        self.attrs = tuple(attrs)
        self.tid_cols = tuple(tid_cols)
        if len(set(self.attrs)) != len(self.attrs):
            raise SchemaError(f"duplicate value attributes in {self.attrs}")
        if len(set(self.tid_cols)) != len(self.tid_cols):
            raise SchemaError(f"duplicate tuple-id columns in {self.tid_cols}")
        na, nt = len(self.attrs), len(self.tid_cols)
        out = dict.fromkeys(rows)
        for d, t, a in out:
            if len(t) != nt or len(a) != na:
                raise SchemaError(f"row {(d, t, a)!r} does not match schema {self.tid_cols}/{self.attrs}")
        self.rows: tuple[Row, ...] = tuple(out)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, URelation)
            and self.attrs == other.attrs
            and self.tid_cols == other.tid_cols
            and frozenset(self.rows) == frozenset(other.rows)
        )

    def __hash__(self):
        return hash((self.attrs, self.tid_cols, frozenset(self.rows)))

    def __repr__(self) -> str:
        return f"URelation(attrs={self.attrs}, tid_cols={self.tid_cols}, rows={len(self.rows)})"

    @property
    def tid_arity(self) -> int:
        return len(self.tid_cols)

    def with_rows(self, rows: Iterable[Row]) -> "URelation":
        return URelation(self.attrs, self.tid_cols, rows)

    def sorted_rows(self) -> list[Row]:
        return sorted(
            self.rows,
            key=lambda r: (descriptor_key(r[0]), tuple(map(sort_key, r[1])), tuple(map(sort_key, r[2]))),
        )


@dataclass(frozen=True)
class RelationDef:
    attrs: tuple[str, ...]
    partitions: tuple[URelation, ...]

    def __post_init__(self):
        object.__setattr__(self, "attrs", tuple(self.attrs))
        object.__setattr__(self, "partitions", tuple(self.partitions))


def minimal_covers(rel: RelationDef) -> list[tuple[int, ...]]:
    """Inclusion-minimal sets of partition indices whose attributes cover the relation.

    A tuple is present in a world exactly when all partitions of at least
    one such cover hold a row for it.  Pairwise disjoint partitions have a
    single cover: all of them.
    """
    hit = _COVERS.get(id(rel))
    if hit is not None and hit[0] is rel:
        return hit[1]
    parts = [frozenset(p.attrs) for p in rel.partitions]
    target = frozenset(rel.attrs)
    if sum(map(len, parts)) == len(target) and frozenset().union(*parts) == target:
        covers = [tuple(range(len(parts)))]
    else:
        covers = []
        for k in range(1, len(parts) + 1):
            for combo in combinations(range(len(parts)), k):
                if any(set(c) <= set(combo) for c in covers):
                    continue
                if frozenset().union(*(parts[i] for i in combo)) >= target:
                    covers.append(combo)
    if len(_COVERS) > 256:
        _COVERS.clear()
    _COVERS[id(rel)] = (rel, covers)
    return covers


_COVERS: dict = {}


@dataclass(frozen=True)
class UDatabase:
    world: WorldTable
    relations: Mapping[str, RelationDef] = field(default_factory=dict)
    reduced: bool = False
    normalized: bool = False

    def relation(self, name: str) -> RelationDef:
        from .errors import UnknownRelation

        try:
            return self.relations[name]
        except KeyError:
            raise UnknownRelation(f"unknown relation {name!r}") from None

    def replace(self, **changes) -> "UDatabase":
        fields = dict(world=self.world, relations=self.relations, reduced=self.reduced, normalized=self.normalized)
        fields.update(changes)
        return UDatabase(**fields)

    def total_rows(self) -> int:
        return sum(len(p) for rel in self.relations.values() for p in rel.partitions)


def make_partition(relation: str, attrs: Sequence[str], rows: Iterable[tuple]) -> URelation:
    """Build a base partition from ``(descriptor-ish, tid, values)`` triples.

    The descriptor may be a :class:`Descriptor`, a mapping or ``None``; the
    tid is a single id, wrapped into a one-slot tid vector tagged with the
    relation name.
    """
    out = []
    for d, tid, values in rows:
        if not isinstance(d, Descriptor):
            d = Descriptor(d or {})
        out.append((d, (tid,), tuple(values)))
    return URelation(attrs, (relation,), out)


def make_database(world: WorldTable, relations: Mapping[str, tuple[Sequence[str], Sequence[URelation]]], **flags) -> UDatabase:
    rels = {name: RelationDef(tuple(attrs), tuple(parts)) for name, (attrs, parts) in relations.items()}
    return UDatabase(world, rels, **flags)


# ---------------------------------------------------------------------------
# validity


@dataclass(frozen=True)
class Violation:
    relation: str
    message: str

    def __str__(self) -> str:
        return f"{self.relation}: {self.message}"


def validate(db: UDatabase) -> list[Violation]:
    """Collect every validity violation; an empty list means the database is valid."""
    problems: list[Violation] = []
    w = db.world
    for name, rel in db.relations.items():
        covered = set()
        for i, part in enumerate(rel.partitions):
            extra = set(part.attrs) - set(rel.attrs)
            if extra:
                problems.append(Violation(name, f"partition {i} covers unknown attributes {sorted(extra)}"))
            covered |= set(part.attrs)
            for d, t, a in part.rows:
                for entry in d.items:
                    if entry not in w:
                        problems.append(Violation(name, f"partition {i}: assignment {entry[0]}={entry[1]!r} not in world table"))
        if covered != set(rel.attrs):
            problems.append(Violation(name, f"partitions leave {sorted(set(rel.attrs) - covered)} uncovered"))
        problems.extend(_contradictions(name, rel))
    return problems


def _contradictions(name: str, rel: RelationDef) -> list[Violation]:
    by_tid: dict[tuple, list[tuple[int, Row]]] = {}
    for i, part in enumerate(rel.partitions):
        for row in part.rows:
            by_tid.setdefault(row[1], []).append((i, row))
    found = []
    for tid, entries in by_tid.items():
        for (i, r1), (j, r2) in combinations(entries, 2):
            p1, p2 = rel.partitions[i], rel.partitions[j]
            shared = [a for a in p1.attrs if a in p2.attrs]
            if not shared or not r1[0].consistent(r2[0]):
                continue
            for attr in shared:
                v1 = r1[2][p1.attrs.index(attr)]
                v2 = r2[2][p2.attrs.index(attr)]
                if v1 != v2:
                    found.append(Violation(name, f"tuple {format_tid(tid)} field {attr}: {v1!r} vs {v2!r} under consistent descriptors {r1[0]!r}, {r2[0]!r}"))
    return found


# ---------------------------------------------------------------------------
# text forms


def format_value(v: Value) -> str:
    if v is None:
        return ""
    if isinstance(v, tuple):
        return "(" + ",".join(format_value(x) for x in v) + ")"
    if isinstance(v, datetime.date):
        return v.isoformat()
    return str(v)


def format_tid(t: tuple) -> str:
    return "(" + ",".join(format_value(x) for x in t) + ")"


# ---------------------------------------------------------------------------
# plain relations


@dataclass(frozen=True)
class Table:
    """An ordinary set-semantics relation: attribute names plus value tuples."""

    attrs: tuple[str, ...]
    rows: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "attrs", tuple(self.attrs))
        object.__setattr__(self, "rows", frozenset(tuple(r) for r in self.rows))
        for r in self.rows:
            if len(r) != len(self.attrs):
                raise SchemaError(f"row {r!r} does not match attributes {self.attrs}")

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.sorted_rows())

    def __contains__(self, row) -> bool:
        return tuple(row) in self.rows

    def sorted_rows(self) -> list[tuple]:
        return sorted(self.rows, key=lambda r: tuple(map(sort_key, r)))
