"""Random instance generators and plain (descriptor-free) reference operators.

Generators take a ``random.Random`` so the same code serves seeded loops
and hypothesis (via ``st.randoms()``).
"""
from __future__ import annotations

import random
from itertools import product

from urel.model import Descriptor, RelationDef, UDatabase, URelation, WorldTable, compare, extends
from urel.oracle import enumerate_worlds, instantiate_urelation
from urel.query.ast import Atom, ColRef, Const, Join, Project, Relation, Select, Union
from urel.query.plan import PJoin, PMerge, PSelect, Scan, pproject

OPS = ("=", "<>", "<", ">", "<=", ">=")

SCHEMA = {"R": ("A", "B"), "S": ("C", "D")}
LAYOUTS = {
    2: [[(0, 1)], [(0,), (1,)], [(0, 1), (1,)], [(0,), (0, 1)], [(1,), (0,)]],
}


def random_world(rnd: random.Random, max_vars: int = 6, max_dom: int = 3) -> WorldTable:
    n = rnd.randint(0, max_vars)
    return WorldTable({f"x{i}": tuple(range(1, rnd.randint(1, max_dom) + 1)) for i in range(n)})


def random_descriptor(rnd: random.Random, w: WorldTable, max_size: int = 3) -> Descriptor:
    if not w.domains:
        return Descriptor()
    vs = rnd.sample(list(w.domains), rnd.randint(0, min(max_size, len(w.domains))))
    return Descriptor({v: rnd.choice(w.domains[v]) for v in vs})


def random_db(rnd: random.Random, max_vars: int = 6, max_dom: int = 3, max_rows: int = 20,
              values: int = 3, max_tids: int = 4) -> UDatabase:
    """A valid database over R(A, B) and S(C, D).

    Each field is either certain or controlled by one variable, and its
    value is a function of the controller's value, so shared attributes of
    overlapping partitions never contradict.  Extra assignments and dropped
    rows make tuples partial or absent in some worlds.
    """
    w = random_world(rnd, max_vars, max_dom)
    var_list = list(w.domains)
    rels = {}
    budget = max_rows
    for name, attrs in SCHEMA.items():
        layout = rnd.choice(LAYOUTS[len(attrs)])
        ntids = rnd.randint(0 if name == "S" else 1, max_tids)
        control, table = {}, {}
        for t in range(1, ntids + 1):
            for j in range(len(attrs)):
                c = rnd.choice(var_list) if var_list and rnd.random() < 0.6 else None
                control[(t, j)] = c
                dom = w.domains[c] if c else (None,)
                table[(t, j)] = {val: rnd.randrange(values) for val in dom}
        parts = []
        for cols in layout:
            rows = []
            for t in range(1, ntids + 1):
                ctl = sorted({control[(t, j)] for j in cols} - {None})
                for combo in product(*(w.domains[c] for c in ctl)):
                    base = dict(zip(ctl, combo))
                    if var_list and rnd.random() < 0.2:
                        v = rnd.choice(var_list)
                        base.setdefault(v, rnd.choice(w.domains[v]))
                    if rnd.random() < 0.12:
                        continue
                    vals = tuple(table[(t, j)][base.get(control[(t, j)])] for j in cols)
                    rows.append((Descriptor(base), (t,), vals))
            parts.append((tuple(attrs[j] for j in cols), rows))
        total = sum(len(r) for _, r in parts)
        while total > budget:
            _, rows = rnd.choice([p for p in parts if p[1]])
            rows.pop(rnd.randrange(len(rows)))
            total -= 1
        budget -= total
        rels[name] = RelationDef(attrs, tuple(URelation(a, (name,), r) for a, r in parts))
    return UDatabase(w, rels)


# ---------------------------------------------------------------------------
# queries


def _cols(q, dbattrs) -> list[str]:
    from urel.query.ast import output_columns

    return list(output_columns(q, lambda n: dbattrs[n]))


def _atom(rnd, cols, values=3):
    left = ColRef(rnd.choice(cols))
    right = ColRef(rnd.choice(cols)) if rnd.random() < 0.35 else Const(rnd.randrange(values))
    return Atom(left, rnd.choice(OPS), right)


def _spj(rnd, joins: int, start: int, attrs) -> tuple:
    leaves = []
    for i in range(joins + 1):
        name = rnd.choice(list(attrs))
        rel = Relation(name, f"q{start + i}")
        if rnd.random() < 0.4:
            rel = Select(rel, tuple(_atom(rnd, _cols(rel, attrs)) for _ in range(rnd.randint(1, 2))))
        leaves.append(rel)
    q = leaves[0]
    for leaf in leaves[1:]:
        lc, rc = _cols(q, attrs), _cols(leaf, attrs)
        cond = []
        if rnd.random() < 0.8:
            cond.append(Atom(ColRef(rnd.choice(lc)), "=" if rnd.random() < 0.7 else rnd.choice(OPS), ColRef(rnd.choice(rc))))
        q = Join(q, leaf, tuple(cond))
    if rnd.random() < 0.3:
        q = Select(q, (_atom(rnd, _cols(q, attrs)),))
    return q, start + joins + 1


def random_query(rnd: random.Random, attrs=None, max_joins: int = 3):
    """A positive query (no ``possible``) with at most ``max_joins`` joins."""
    attrs = attrs or SCHEMA
    total = rnd.randint(0, max_joins)
    if rnd.random() < 0.25:
        j1 = rnd.randint(0, total)
        a, nxt = _spj(rnd, j1, 0, attrs)
        b, _ = _spj(rnd, total - j1, nxt, attrs)
        k = rnd.randint(1, min(len(_cols(a, attrs)), len(_cols(b, attrs)), 3))
        ca = rnd.sample(_cols(a, attrs), k)
        cb = rnd.sample(_cols(b, attrs), k)
        names = [f"o{i}" for i in range(k)]
        return Union(
            Project(a, tuple((n, ColRef(c)) for n, c in zip(names, ca))),
            Project(b, tuple((n, ColRef(c)) for n, c in zip(names, cb))),
        )
    q, _ = _spj(rnd, total, 0, attrs)
    cols = _cols(q, attrs)
    if rnd.random() < 0.15:
        return Project(q, None)
    keep = rnd.sample(cols, rnd.randint(1, len(cols)))
    return Project(q, tuple((c, ColRef(c)) for c in keep))


# ---------------------------------------------------------------------------
# random U-relations for operator tests


def random_urelation(rnd, w: WorldTable, attrs, tid_cols, max_rows: int = 8, tids: int = 3, values: int = 3) -> URelation:
    rows = []
    for _ in range(rnd.randint(0, max_rows)):
        t = tuple(rnd.randint(1, tids) for _ in tid_cols)
        a = tuple(rnd.randrange(values) for _ in attrs)
        rows.append((random_descriptor(rnd, w), t, a))
    return URelation(attrs, tid_cols, rows)


# ---------------------------------------------------------------------------
# plain counterparts of the physical operators, over (tids, values) sets


def plain_select(inst, attrs, cond):
    def holds(a):
        def v(o):
            return a[attrs.index(o.name)] if isinstance(o, ColRef) else o.value

        return all(compare(v(x.left), x.op, v(x.right)) for x in cond)

    return {(t, a) for t, a in inst if holds(a)}


def plain_project(inst, attrs, cols):
    idx = [attrs.index(c) for c in cols]
    return {(t, tuple(a[i] for i in idx)) for t, a in inst}


def plain_join(i1, a1, i2, a2, cond):
    attrs = tuple(a1) + tuple(a2)
    return plain_select({(t1 + t2, x1 + x2) for t1, x1 in i1 for t2, x2 in i2}, attrs, cond)


def plain_merge(i1, u1: URelation, i2, u2: URelation):
    common = [c for c in u1.tid_cols if c in u2.tid_cols]
    lk = [u1.tid_cols.index(c) for c in common]
    rk = [u2.tid_cols.index(c) for c in common]
    new_t = [i for i, c in enumerate(u2.tid_cols) if c not in u1.tid_cols]
    new_a = [i for i, c in enumerate(u2.attrs) if c not in u1.attrs]
    out = set()
    for t1, x1 in i1:
        for t2, x2 in i2:
            if [t1[i] for i in lk] == [t2[i] for i in rk] and None not in [t1[i] for i in lk]:
                out.add((t1 + tuple(t2[i] for i in new_t), x1 + tuple(x2[i] for i in new_a)))
    return out


def plain_union(i1, n1: int, i2, n2: int):
    return {(t + (None,) * n2, a) for t, a in i1} | {((None,) * n1 + t, a) for t, a in i2}


# ---------------------------------------------------------------------------
# world-level comparison


def per_world_values(u: URelation, w: WorldTable, cols=None):
    """For each world, the value tuples present, with columns in sorted order."""
    cols = sorted(u.attrs) if cols is None else cols
    idx = [u.attrs.index(c) for c in cols]
    out = []
    for f in enumerate_worlds(w):
        out.append(frozenset(tuple(a[i] for i in idx) for _, a in instantiate_urelation(u, f)))
    return out


def satisfiable_rows(u: URelation, w: WorldTable) -> bool:
    return all(any(extends(f, d) for f in enumerate_worlds(w)) for d, _, _ in u.rows)


# ---------------------------------------------------------------------------
# random physical plans for rewrite-rule tests

PLAN_SCHEMA = {"R": ("A", "B", "C"), "S": ("D", "E")}


def random_plan_db(rnd, max_vars: int = 4, max_dom: int = 3, max_rows: int = 6, tids: int = 3) -> UDatabase:
    """One single-attribute partition per attribute; descriptors are arbitrary."""
    w = random_world(rnd, max_vars, max_dom)
    rels = {
        name: RelationDef(attrs, tuple(tid_functional(random_urelation(rnd, w, (a,), (name,), max_rows, tids)) for a in attrs))
        for name, attrs in PLAN_SCHEMA.items()
    }
    return UDatabase(w, rels)


def tid_functional(u: URelation) -> URelation:
    """Drop rows that would give a tuple id two values in one world."""
    kept = []
    for d, t, a in u.rows:
        if all(t2 != t or a2 == a or not d.consistent(d2) for d2, t2, a2 in kept):
            kept.append((d, t, a))
    return u.with_rows(kept)


def plan_pool(rnd, db, rules):
    """A random plan followed by its one-step rewrites under ``rules``."""
    p = random_plan(rnd, db)
    pool = [p]
    for rule in rules:
        for d in ("forward", "backward"):
            pool.extend(rule_instances(p, rule, d))
    return pool


def _plan_atom(rnd, cols, values=3):
    left = ColRef(rnd.choice(cols))
    right = ColRef(rnd.choice(cols)) if rnd.random() < 0.3 else Const(rnd.randrange(values))
    return Atom(left, rnd.choice(OPS), right)


def _decorate(rnd, p, split):
    cols = p.value_cols
    r = rnd.random()
    if r < 0.2:
        return PSelect(p, (_plan_atom(rnd, cols),))
    if r < 0.3 and len(cols) > 1:
        return pproject(p, rnd.sample(cols, rnd.randint(1, len(cols) - 1)))
    if r < 0.4 and len(cols) > 1:
        return split(p)
    return p


def _leaf_tree(rnd, db, name, alias, split):
    rel = db.relation(name)
    items = [_decorate(rnd, Scan(name, i, alias, alias, part.attrs), split) for i, part in enumerate(rel.partitions)]
    rnd.shuffle(items)
    while len(items) > 1:
        i = rnd.randrange(len(items) - 1)
        m = PMerge(items[i], items[i + 1])
        items[i : i + 2] = [m if rnd.random() < 0.6 else _decorate(rnd, m, split)]
    return items[0]


def random_plan(rnd, db):
    """A plan over merged partitions, optionally joined with a second leaf."""
    from urel.query.optimizer import RULES_BY_NAME

    split = RULES_BY_NAME["merge-elim"].backward
    p = _leaf_tree(rnd, db, "R", "R", split)
    if rnd.random() < 0.6:
        other = rnd.choice(["S", "S", "R"])
        q = _leaf_tree(rnd, db, other, "X", split)
        cond = (Atom(ColRef(rnd.choice(p.value_cols)), "=", ColRef(rnd.choice(q.value_cols))),) if rnd.random() < 0.8 else ()
        p = PJoin(p, q, cond) if rnd.random() < 0.5 else PJoin(q, p, cond)
    if rnd.random() < 0.4:
        p = PSelect(p, (_plan_atom(rnd, p.value_cols),))
    return p


def rule_instances(p, rule, direction):
    """Every rewrite of ``p`` by one application of ``rule`` at one node."""
    from urel.errors import UrelError
    from urel.query.plan import replace_children

    try:
        out = getattr(rule, direction)(p)
    except UrelError:
        out = None
    if out is not None and out != p:
        yield out
    for i, c in enumerate(p.children):
        for new in rule_instances(c, rule, direction):
            kids = list(p.children)
            kids[i] = new
            try:
                yield replace_children(p, kids)
            except UrelError:
                continue
