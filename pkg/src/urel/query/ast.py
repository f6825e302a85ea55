"""Logical query trees: positive relational algebra plus ``possible``.

Columns of a relation leaf are qualified by the leaf's alias
(``alias.attr``); projections name their outputs explicitly.  A column
reference may be qualified or bare, and resolves against the columns of the
node it is evaluated on.
"""
from __future__ import annotations

import datetime
from dataclasses import dataclass
from decimal import Decimal
from typing import Iterable

from ..errors import AmbiguousAttribute, QueryError, SchemaError, UnknownAttribute


@dataclass(frozen=True)
class ColRef:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    value: object

    def __str__(self) -> str:
        return literal(self.value)


Operand = "ColRef | Const"


@dataclass(frozen=True)
class Atom:
    left: Operand
    op: str
    right: Operand

    def refs(self) -> list[str]:
        return [o.name for o in (self.left, self.right) if isinstance(o, ColRef)]

    def __str__(self) -> str:
        return f"{self.left} {self.op} {self.right}"


Condition = tuple  # tuple[Atom, ...], a conjunction; () is true


def literal(v) -> str:
    if isinstance(v, str):
        return "'" + v.replace("'", "''") + "'"
    if isinstance(v, datetime.date):
        return f"date '{v.isoformat()}'"
    if isinstance(v, Decimal):
        return str(v)
    return str(v)


def cond_str(cond: Condition) -> str:
    return " and ".join(str(a) for a in cond) if cond else "true"


# ---------------------------------------------------------------------------
# nodes


class Query:
    children: tuple = ()


@dataclass(frozen=True)
class Relation(Query):
    name: str
    alias: str | None = None

    @property
    def qualifier(self) -> str:
        return self.alias or self.name


@dataclass(frozen=True)
class Select(Query):
    child: Query
    cond: Condition

    @property
    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Project(Query):
    """``columns`` is a tuple of ``(output name, ColRef)``; ``None`` means ``*``."""

    child: Query
    columns: tuple | None

    @property
    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Join(Query):
    left: Query
    right: Query
    cond: Condition = ()

    @property
    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Union(Query):
    left: Query
    right: Query

    @property
    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Poss(Query):
    child: Query

    @property
    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class PartitionRef(Query):
    """One partition of a relation leaf, placed by ``insert_merges``.

    ``occurrence`` numbers the leaf this partition came from, so partitions
    of one leaf share tuple ids and partitions of different leaves never do.
    """

    relation: str
    index: int
    alias: str
    occurrence: int
    attrs: tuple


@dataclass(frozen=True)
class Merge(Query):
    left: Query
    right: Query

    @property
    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Cover(Query):
    """Alternative reconstructions of one relation leaf, sharing tuple ids.

    Placed by ``insert_merges`` when partitions overlap: a tuple exists as
    soon as the partitions of any one attribute cover are all present.
    """

    left: Query
    right: Query

    @property
    def children(self):
        return (self.left, self.right)


def project(child: Query, *names: str) -> Project:
    """``Project`` with output names equal to the referenced names."""
    return Project(child, tuple((n, ColRef(n)) for n in names))


# ---------------------------------------------------------------------------
# column resolution


def resolve(ref: str, cols: Iterable[str]) -> str:
    cols = tuple(cols)
    if ref in cols:
        return ref
    hits = [c for c in cols if c.endswith("." + ref)]
    if len(hits) == 1:
        return hits[0]
    if not hits:
        raise UnknownAttribute(f"unknown attribute {ref!r} (available: {', '.join(cols)})")
    raise AmbiguousAttribute(f"attribute {ref!r} is ambiguous among {', '.join(hits)}")


def resolve_cond(cond: Condition, cols: Iterable[str]) -> Condition:
    cols = tuple(cols)

    def fix(o):
        return ColRef(resolve(o.name, cols)) if isinstance(o, ColRef) else o

    return tuple(Atom(fix(a.left), a.op, fix(a.right)) for a in cond)


def star_columns(cols: tuple[str, ...]) -> tuple:
    """Output columns for ``select *``: bare names unless that would clash."""
    bare = [c.rsplit(".", 1)[-1] for c in cols]
    if len(set(bare)) == len(bare):
        return tuple((b, ColRef(c)) for b, c in zip(bare, cols))
    return tuple((c, ColRef(c)) for c in cols)


def output_columns(q: Query, attrs_of) -> tuple[str, ...]:
    """Column names produced by ``q``; ``attrs_of(name)`` gives relation attributes."""
    if isinstance(q, Relation):
        return tuple(f"{q.qualifier}.{a}" for a in attrs_of(q.name))
    if isinstance(q, PartitionRef):
        return tuple(f"{q.alias}.{a}" for a in q.attrs)
    if isinstance(q, (Select, Poss)):
        return output_columns(q.child, attrs_of)
    if isinstance(q, Project):
        if q.columns is None:
            return tuple(n for n, _ in star_columns(output_columns(q.child, attrs_of)))
        return tuple(n for n, _ in q.columns)
    if isinstance(q, Join):
        left, right = output_columns(q.left, attrs_of), output_columns(q.right, attrs_of)
        clash = set(left) & set(right)
        if clash:
            raise SchemaError(f"join produces duplicate columns {sorted(clash)}; use aliases")
        return left + right
    if isinstance(q, Merge):
        left, right = output_columns(q.left, attrs_of), output_columns(q.right, attrs_of)
        return left + tuple(c for c in right if c not in left)
    if isinstance(q, (Union, Cover)):
        left, right = output_columns(q.left, attrs_of), output_columns(q.right, attrs_of)
        if left != right:
            raise SchemaError(f"union branches differ: {left} vs {right}")
        return left
    raise TypeError(f"not a query node: {q!r}")


def check_positive(q: Query) -> None:
    """Reject ``possible`` anywhere except at the root."""

    def walk(node, root):
        if isinstance(node, Poss) and not root:
            raise QueryError("possible is only supported as the outermost operation")
        for c in node.children:
            walk(c, False)

    walk(q, True)


def strip_poss(q: Query) -> tuple[Query, bool]:
    check_positive(q)
    if isinstance(q, Poss):
        return q.child, True
    return q, False


# ---------------------------------------------------------------------------
# printing


def algebra(q: Query) -> str:
    """Compact algebraic rendering, e.g. ``π[Id](σ[Type = 'Tank'](R))``."""
    if isinstance(q, Relation):
        return q.name if q.alias in (None, q.name) else f"{q.name} {q.alias}"
    if isinstance(q, PartitionRef):
        return f"{q.relation}[{q.index}]"
    if isinstance(q, Select):
        return f"σ[{cond_str(q.cond)}]({algebra(q.child)})"
    if isinstance(q, Project):
        cols = "*" if q.columns is None else ", ".join(
            n if n == r.name else f"{r.name} as {n}" for n, r in q.columns
        )
        return f"π[{cols}]({algebra(q.child)})"
    if isinstance(q, Join):
        return f"({algebra(q.left)} ⋈[{cond_str(q.cond)}] {algebra(q.right)})"
    if isinstance(q, Union):
        return f"({algebra(q.left)} ∪ {algebra(q.right)})"
    if isinstance(q, Merge):
        return f"merge({algebra(q.left)}, {algebra(q.right)})"
    if isinstance(q, Cover):
        return f"cover({algebra(q.left)}, {algebra(q.right)})"
    if isinstance(q, Poss):
        return f"poss({algebra(q.child)})"
    raise TypeError(q)
