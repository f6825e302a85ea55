"""Evaluation of physical plans over U-relations.

Every operator works on :class:`~urel.model.URelation` values with set
semantics.  Descriptors of paired rows must be consistent (the psi filter)
and are combined in the output.
"""
from __future__ import annotations

from .errors import (
    MergeOriginError,
    NotNormalized,
    NotTupleLevel,
    QueryError,
    SchemaError,
)
from .model import (
    Descriptor,
    RelationDef,
    Table,
    UDatabase,
    URelation,
    WorldTable,
    compare,
    minimal_covers,
    value_tag,
)
from .query.ast import ColRef, Condition, Poss, Query, strip_poss
from .query.plan import PCover, PJoin, PMerge, PPoss, PProject, PSelect, PUnion, Plan, Scan, union_tid_cols

# ---------------------------------------------------------------------------
# conditions


def compile_condition(cond: Condition, cols: tuple[str, ...]):
    """Turn a conjunction over ``cols`` into a predicate on value tuples."""
    index = {c: i for i, c in enumerate(cols)}
    parts = []
    for atom in cond:
        def getter(o):
            if isinstance(o, ColRef):
                if o.name not in index:
                    raise SchemaError(f"column {o.name!r} not among {cols}")
                i = index[o.name]
                return lambda row: row[i]
            v = o.value
            return lambda row: v

        parts.append((getter(atom.left), atom.op, getter(atom.right)))

    def pred(row) -> bool:
        return all(compare(lf(row), op, rf(row)) for lf, op, rf in parts)

    return pred


# ---------------------------------------------------------------------------
# operators


def op_scan(db: UDatabase, relation: str, index: int, tag: str, attrs=None, cols=None) -> URelation:
    """One partition with its tid column named ``tag``; ``cols`` renames the values."""
    part = db.relation(relation).partitions[index]
    if attrs is not None and tuple(attrs) != part.attrs:
        raise SchemaError(f"scan of {relation}[{index}] expects {tuple(attrs)}, partition has {part.attrs}")
    # multi-slot tids of stored results collapse into one atom
    rows = ((d, (t[0] if len(t) == 1 else t,), a) for d, t, a in part.rows)
    return URelation(part.attrs if cols is None else cols, (tag,), rows)


def op_select(u: URelation, cond: Condition) -> URelation:
    if not cond:
        return u
    pred = compile_condition(cond, u.attrs)
    return u.with_rows(r for r in u.rows if pred(r[2]))


def op_project(u: URelation, columns) -> URelation:
    """``columns`` is a sequence of ``(out, src)`` pairs or plain names."""
    columns = [(c, c) if isinstance(c, str) else c for c in columns]
    idx = [u.attrs.index(src) for _, src in columns]
    return URelation([o for o, _ in columns], u.tid_cols, ((d, t, tuple(a[i] for i in idx)) for d, t, a in u.rows))


def _key(values):
    # cross-type values never pair in a hash join
    return tuple((value_tag(v), v) for v in values)


def op_join(u1: URelation, u2: URelation, cond: Condition = ()) -> URelation:
    """Hash join on equality atoms across the operands, residual atoms and psi after."""
    shared = set(u1.tid_cols) & set(u2.tid_cols)
    if shared:
        from .errors import AliasingError

        raise AliasingError(f"join operands share tuple-id columns {sorted(shared)}")
    cols = u1.attrs + u2.attrs
    li, ri, residual = [], [], []
    for atom in cond:
        l, r = atom.left, atom.right
        if atom.op == "=" and isinstance(l, ColRef) and isinstance(r, ColRef):
            if l.name in u1.attrs and r.name in u2.attrs:
                li.append(u1.attrs.index(l.name))
                ri.append(u2.attrs.index(r.name))
                continue
            if r.name in u1.attrs and l.name in u2.attrs:
                li.append(u1.attrs.index(r.name))
                ri.append(u2.attrs.index(l.name))
                continue
        residual.append(atom)
    pred = compile_condition(tuple(residual), cols) if residual else None
    out = URelation(cols, u1.tid_cols + u2.tid_cols)
    rows = []
    if li:
        table: dict = {}
        for row in u2.rows:
            table.setdefault(_key(row[2][i] for i in ri), []).append(row)
        pairs = ((r1, r2) for r1 in u1.rows for r2 in table.get(_key(r1[2][i] for i in li), ()))
    else:
        pairs = ((r1, r2) for r1 in u1.rows for r2 in u2.rows)
    for (d1, t1, a1), (d2, t2, a2) in pairs:
        if not d1.consistent(d2):
            continue
        a = a1 + a2
        if pred is not None and not pred(a):
            continue
        rows.append((d1.combine(d2), t1 + t2, a))
    return out.with_rows(rows)


def op_merge(u1: URelation, u2: URelation) -> URelation:
    """Pair rows of two partitions of one relation on their common tuple ids."""
    common = [c for c in u1.tid_cols if c in u2.tid_cols]
    if not common:
        raise MergeOriginError(f"merge operands share no tuple-id columns ({u1.tid_cols} vs {u2.tid_cols})")
    lk = [u1.tid_cols.index(c) for c in common]
    rk = [u2.tid_cols.index(c) for c in common]
    new_t = [i for i, c in enumerate(u2.tid_cols) if c not in u1.tid_cols]
    new_a = [i for i, c in enumerate(u2.attrs) if c not in u1.attrs]
    out = URelation(u1.attrs + tuple(u2.attrs[i] for i in new_a), u1.tid_cols + tuple(u2.tid_cols[i] for i in new_t))
    table: dict = {}
    for row in u2.rows:
        key = tuple(row[1][i] for i in rk)
        if None not in key:
            table.setdefault(key, []).append(row)
    rows = []
    for d1, t1, a1 in u1.rows:
        for d2, t2, a2 in table.get(tuple(t1[i] for i in lk), ()):
            if d1.consistent(d2):
                rows.append((d1.combine(d2), t1 + tuple(t2[i] for i in new_t), a1 + tuple(a2[i] for i in new_a)))
    return out.with_rows(rows)


def op_union(u1: URelation, u2: URelation) -> URelation:
    """Union with branch-tagged tuple ids; the other branch's slots are ``None``."""
    if u1.attrs != u2.attrs:
        raise SchemaError(f"union operands differ: {u1.attrs} vs {u2.attrs}")
    pad1, pad2 = (None,) * u2.tid_arity, (None,) * u1.tid_arity
    rows = [(d, t + pad1, a) for d, t, a in u1.rows] + [(d, pad2 + t, a) for d, t, a in u2.rows]
    return URelation(u1.attrs, union_tid_cols(u1.tid_cols, u2.tid_cols), rows)


def op_cover(u1: URelation, u2: URelation) -> URelation:
    """Plain row union of two reconstructions with identical schemas."""
    if u1.attrs != u2.attrs or u1.tid_cols != u2.tid_cols:
        raise SchemaError(f"cover operands differ: {u1.attrs}/{u1.tid_cols} vs {u2.attrs}/{u2.tid_cols}")
    return u1.with_rows(list(u1.rows) + list(u2.rows))


def op_poss(u: URelation) -> Table:
    return Table(u.attrs, frozenset(a for _, _, a in u.rows))


# ---------------------------------------------------------------------------
# plans


def evaluate(p: Plan, db: UDatabase):
    """Evaluate a plan bottom-up; a ``PPoss`` root yields a :class:`Table`."""
    if isinstance(p, Scan):
        return op_scan(db, p.relation, p.index, p.tag, p.attrs, p.value_cols)
    if isinstance(p, PSelect):
        return op_select(evaluate(p.child, db), p.cond)
    if isinstance(p, PProject):
        return op_project(evaluate(p.child, db), p.columns)
    if isinstance(p, PJoin):
        return op_join(evaluate(p.left, db), evaluate(p.right, db), p.cond)
    if isinstance(p, PMerge):
        return op_merge(evaluate(p.left, db), evaluate(p.right, db))
    if isinstance(p, PUnion):
        return op_union(evaluate(p.left, db), evaluate(p.right, db))
    if isinstance(p, PCover):
        return op_cover(evaluate(p.left, db), evaluate(p.right, db))
    if isinstance(p, PPoss):
        return op_poss(evaluate(p.child, db))
    raise QueryError(f"cannot evaluate {p!r}")


# ---------------------------------------------------------------------------
# reduction


def _completable(choices: list[list], row: Descriptor) -> bool:
    """Is there one descriptor per list, all consistent with ``row`` and each other?"""
    order = sorted(choices, key=len)

    def search(k: int, d: Descriptor) -> bool:
        if k == len(order):
            return True
        for cand in order[k]:
            if d.consistent(cand):
                if search(k + 1, d.combine(cand)):
                    return True
        return False

    return search(0, row)


def reduce_relation(rel: RelationDef) -> RelationDef:
    """Keep a row iff, in some world it allows, a whole attribute cover is present."""
    parts = rel.partitions
    if len(parts) == 1:
        return rel
    covers = minimal_covers(rel)
    by_tid: dict = {}
    for i, part in enumerate(parts):
        for d, t, _ in part.rows:
            by_tid.setdefault(t, [set() for _ in parts])[i].add(d)
    keep_cache: dict = {}

    def keep(i, d, t) -> bool:
        key = (i, d, t)
        if key not in keep_cache:
            slots = by_tid[t]
            keep_cache[key] = any(
                all(slots[j] for j in cover)
                and _completable([list(slots[j]) for j in cover if j != i], d)
                for cover in covers
            )
        return keep_cache[key]

    new_parts = tuple(p.with_rows(r for r in p.rows if keep(i, r[0], r[1])) for i, p in enumerate(parts))
    return RelationDef(rel.attrs, new_parts)


def reduce(db: UDatabase) -> UDatabase:
    """Drop every row that completes into a full tuple in no world."""
    rels = {name: reduce_relation(rel) for name, rel in db.relations.items()}
    return db.replace(relations=rels, reduced=True)


def is_reduced(db: UDatabase) -> bool:
    r = reduce(db)
    return all(
        len(p) == len(q)
        for name in db.relations
        for p, q in zip(db.relations[name].partitions, r.relations[name].partitions)
    )


# ---------------------------------------------------------------------------
# certain answers

TOP = "⊤"  # stands in for the empty descriptor: a variable with a one-value domain


def certain_answers(u: URelation, w: WorldTable) -> Table:
    """Tuples present in every world of a normalized, reduced, tuple-level result.

    A tuple is certain iff some variable guards it under each of its domain
    values; evaluated as a division over (variable, value, tuple) triples.
    """
    for d, _, _ in u.rows:
        if len(d) > 1:
            raise NotNormalized(f"descriptor {d!r} has size {len(d)}")
    world = set(w.entries()) | {(TOP, 0)}
    variables = {var for var, _ in world}
    vra = set()
    for d, _, a in u.rows:
        (var, val), = d.items if d.items else ((TOP, 0),)
        vra.add((var, val, a))
    values = {a for _, _, a in vra}
    missing = {(var, rng, a) for var, rng in world for a in values} - vra
    candidates = {(var, a) for var in variables for a in values} - {(var, a) for var, _, a in missing}
    return Table(u.attrs, frozenset(a for _, a in candidates))


def certain_relation(db: UDatabase, name: str) -> Table:
    rel = db.relation(name)
    if len(rel.partitions) != 1 or rel.partitions[0].attrs != rel.attrs:
        raise NotTupleLevel(f"relation {name!r} is stored in {len(rel.partitions)} partitions")
    part = rel.partitions[0]
    return Table(rel.attrs, certain_answers(part, db.world).rows)


# ---------------------------------------------------------------------------
# end-to-end


def _as_query(q) -> Query:
    if isinstance(q, str):
        from .query.parser import parse

        return parse(q)
    return q


def possible(q, db: UDatabase, optimize: bool = True) -> Table:
    """Possible answers of ``q`` (text or tree); ``possible`` is implied."""
    from .query.planner import plan_query

    q = _as_query(q)
    body, _ = strip_poss(q)
    return evaluate(plan_query(Poss(body), db, optimize), db)


def answer_relation(q, db: UDatabase, optimize: bool = True) -> URelation:
    """The U-relation representing the answer of ``q`` in every world."""
    from .query.planner import plan_query

    body, _ = strip_poss(_as_query(q))
    return evaluate(plan_query(body, db, optimize), db)


def restrict_world(w: WorldTable, variables) -> WorldTable:
    keep = set(variables)
    doms = {v: vals for v, vals in w.domains.items() if v in keep}
    probs = None if w.probs is None else {k: p for k, p in w.probs.items() if k[0] in keep}
    return WorldTable(doms, probs)


def certain(q, db: UDatabase, optimize: bool = True, guard: int | None = None) -> Table:
    """Certain answers: reduce, evaluate, normalize the result, then divide."""
    from .normalize import DEFAULT_GUARD, normalize

    rdb = db if db.reduced else reduce(db)
    u = answer_relation(q, rdb, optimize)
    used = {var for d, _, _ in u.rows for var in d.variables}
    single = UDatabase(restrict_world(rdb.world, used), {"answer": RelationDef(u.attrs, (u,))}, reduced=True)
    n = normalize(single, DEFAULT_GUARD if guard is None else guard)
    return certain_answers(n.relations["answer"].partitions[0], n.world)
