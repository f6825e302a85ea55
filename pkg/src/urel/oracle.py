"""Brute-force reference semantics.

Enumerates the worlds of a database, instantiates each one as a plain
relational database and evaluates logical queries on it directly.  Shares
no evaluation code with the engine: it is the yardstick the engine is
tested against.
"""
from __future__ import annotations

from itertools import product
from typing import Iterator, Mapping

from .errors import QueryError, SchemaError, WorldLimitExceeded
from .model import Table, UDatabase, URelation, WorldTable, compare, extends
from .query.ast import (
    ColRef,
    Join,
    Poss,
    Project,
    Query,
    Relation,
    Select,
    Union,
    resolve,
    star_columns,
    strip_poss,
)

DEFAULT_LIMIT = 2**20

PlainDatabase = Mapping[str, Table]


def enumerate_worlds(w: WorldTable, limit: int = DEFAULT_LIMIT) -> Iterator[dict]:
    """Every total valuation, variables in sorted order, values in domain order."""
    count = w.world_count()
    if count > limit:
        raise WorldLimitExceeded(f"{count} worlds exceed the limit of {limit}")
    variables = w.variables
    for combo in product(*(w.domains[v] for v in variables)):
        yield dict(zip(variables, combo))


def instantiate_urelation(u: URelation, f: Mapping) -> set[tuple]:
    """``(tids, values)`` pairs of the rows present in world ``f``."""
    return {(t, a) for d, t, a in u.rows if extends(f, d)}


def instantiate(db: UDatabase, f: Mapping) -> dict[str, Table]:
    """The plain database of world ``f``; partial tuples are dropped."""
    out = {}
    for name, rel in db.relations.items():
        fields: dict = {}
        for part in rel.partitions:
            for d, t, a in part.rows:
                if extends(f, d):
                    slot = fields.setdefault(t, {})
                    for attr, v in zip(part.attrs, a):
                        slot.setdefault(attr, v)
        rows = set()
        for slot in fields.values():
            if len(slot) == len(rel.attrs):
                rows.add(tuple(slot[attr] for attr in rel.attrs))
        out[name] = Table(rel.attrs, frozenset(rows))
    return out


def _holds(atom, cols, row) -> bool:
    def val(o):
        if isinstance(o, ColRef):
            return row[cols.index(resolve(o.name, cols))]
        return o.value

    return compare(val(atom.left), atom.op, val(atom.right))


def eval_plain(q: Query, db: PlainDatabase) -> Table:
    """Textbook set-semantics evaluation of selection, projection, join, union."""
    if isinstance(q, Poss):
        raise QueryError("eval_plain evaluates queries without possible")
    if isinstance(q, Relation):
        if q.name not in db:
            raise SchemaError(f"unknown relation {q.name!r}")
        t = db[q.name]
        return Table(tuple(f"{q.qualifier}.{a}" for a in t.attrs), t.rows)
    if isinstance(q, Select):
        t = eval_plain(q.child, db)
        return Table(t.attrs, frozenset(r for r in t.rows if all(_holds(a, t.attrs, r) for a in q.cond)))
    if isinstance(q, Project):
        t = eval_plain(q.child, db)
        cols = star_columns(t.attrs) if q.columns is None else q.columns
        idx = [t.attrs.index(resolve(ref.name, t.attrs)) for _, ref in cols]
        return Table(tuple(n for n, _ in cols), frozenset(tuple(r[i] for i in idx) for r in t.rows))
    if isinstance(q, Join):
        l, r = eval_plain(q.left, db), eval_plain(q.right, db)
        if set(l.attrs) & set(r.attrs):
            raise SchemaError(f"join produces duplicate columns {sorted(set(l.attrs) & set(r.attrs))}")
        attrs = l.attrs + r.attrs
        rows = frozenset(
            a + b for a in l.rows for b in r.rows if all(_holds(atom, attrs, a + b) for atom in q.cond)
        )
        return Table(attrs, rows)
    if isinstance(q, Union):
        l, r = eval_plain(q.left, db), eval_plain(q.right, db)
        if l.attrs != r.attrs:
            raise SchemaError(f"union branches differ: {l.attrs} vs {r.attrs}")
        return Table(l.attrs, l.rows | r.rows)
    raise QueryError(f"eval_plain cannot evaluate {q!r}")


def _worlds_answers(q, db: UDatabase, limit: int):
    if isinstance(q, str):
        from .query.parser import parse

        q = parse(q)
    body, _ = strip_poss(q)
    for f in enumerate_worlds(db.world, limit):
        yield eval_plain(body, instantiate(db, f))


def poss_oracle(q, db: UDatabase, limit: int = DEFAULT_LIMIT) -> Table:
    attrs, rows = None, set()
    for t in _worlds_answers(q, db, limit):
        attrs = t.attrs
        rows |= t.rows
    return Table(attrs or (), frozenset(rows))


def certain_oracle(q, db: UDatabase, limit: int = DEFAULT_LIMIT) -> Table:
    attrs, rows = None, None
    for t in _worlds_answers(q, db, limit):
        attrs = t.attrs
        rows = set(t.rows) if rows is None else rows & t.rows
    return Table(attrs or (), frozenset(rows or ()))


def world_set(db: UDatabase, limit: int = DEFAULT_LIMIT) -> set[frozenset]:
    """The represented world-set as a set of canonical plain databases."""
    out = set()
    for f in enumerate_worlds(db.world, limit):
        inst = instantiate(db, f)
        out.add(frozenset((name, t.rows) for name, t in inst.items()))
    return out


def parse_valuation(text: str, w: WorldTable) -> dict:
    """Read ``x=1;y=2`` into a total valuation of ``w``."""
    from .storage import parse_value

    f = {}
    for part in filter(None, text.split(";")):
        var, sep, val = part.partition("=")
        if not sep:
            raise QueryError(f"malformed valuation entry {part!r}")
        f[var.strip()] = parse_value(val.strip())
    missing = set(w.domains) - set(f)
    extra = set(f) - set(w.domains)
    if missing or extra:
        raise QueryError(f"valuation must assign exactly the variables {list(w.variables)}")
    for var, val in f.items():
        if (var, val) not in w:
            raise QueryError(f"{var}={val!r} is not in the world table")
    return f
