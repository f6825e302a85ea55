"""From logical queries to physical plans.

``insert_merges`` replaces every relation leaf by a merge tree over the
partitions it needs; ``translate`` maps the result node by node onto
physical operators.
"""
from __future__ import annotations

from itertools import combinations

from ..errors import QueryError, UnknownAttribute
from ..model import RelationDef, UDatabase, covers_all_worlds, minimal_covers
from .ast import (
    ColRef,
    Cover,
    Join,
    Merge,
    PartitionRef,
    Poss,
    Project,
    Query,
    Relation,
    Select,
    Union,
    output_columns,
    resolve,
    resolve_cond,
    star_columns,
    strip_poss,
)
from .plan import PCover, PJoin, PMerge, PPoss, PProject, PSelect, PUnion, Plan, Scan


def _attrs_of(db: UDatabase):
    return lambda name: db.relation(name).attrs


# ---------------------------------------------------------------------------
# which partitions can be left out


_TOTAL_CACHE: dict[int, tuple[RelationDef, frozenset]] = {}


def total_partitions(db: UDatabase, name: str) -> frozenset[int]:
    """Indices of partitions that give every tuple of ``name`` values in every world.

    Such a partition never makes a tuple partial, so a merge may skip it
    when none of its attributes are needed.
    """
    rel = db.relation(name)
    hit = _TOTAL_CACHE.get(id(rel))
    if hit is not None and hit[0] is rel:
        return hit[1]
    tids = set()
    for part in rel.partitions:
        tids.update(t for _, t, _ in part.rows)
    total = set()
    for i, part in enumerate(rel.partitions):
        by_tid: dict = {}
        for d, t, _ in part.rows:
            by_tid.setdefault(t, []).append(d)
        if all(t in by_tid and covers_all_worlds(by_tid[t], db.world) for t in tids):
            total.add(i)
    result = frozenset(total)
    if len(_TOTAL_CACHE) > 64:
        _TOTAL_CACHE.clear()
    _TOTAL_CACHE[id(rel)] = (rel, result)
    return result


def choose_cover(rel: RelationDef, needed: set[str], among=None) -> list[int] | None:
    """Fewest partitions covering ``needed``, then fewest rows, then declaration order."""
    parts = rel.partitions
    pool = sorted(range(len(parts)) if among is None else among)
    for k in range(1, len(pool) + 1):
        best = None
        for combo in combinations(pool, k):
            covered = set().union(*(parts[i].attrs for i in combo))
            if needed <= covered:
                key = (sum(len(parts[i]) for i in combo), combo)
                if best is None or key < best:
                    best = key
        if best is not None:
            return list(best[1])
    return None


def leaf_partitions(db: UDatabase, name: str, needed: set[str], shortcut: bool) -> list[list[int]]:
    """Partition index lists, one per reconstruction branch of a relation leaf.

    Each minimal attribute cover yields one branch: its partitions that may
    be missing for some tuple, plus total partitions for needed attributes
    the branch would otherwise lack.  Disjoint partitions give one branch.
    """
    rel = db.relation(name)
    missing = needed - set(rel.attrs)
    if missing:
        raise UnknownAttribute(f"relation {name!r} has no attributes {sorted(missing)}")
    covers = minimal_covers(rel)
    if not covers:
        raise QueryError(f"partitions of {name!r} do not cover its attributes")
    parts = rel.partitions
    if shortcut:
        always = set.intersection(*(set(c) for c in covers))
        singles = [i for i in always if needed <= set(parts[i].attrs)]
        if singles:
            return [[min(singles, key=lambda i: (len(parts[i]), i))]]
    total = total_partitions(db, name)
    branches: list[list[int]] = []
    for cover in covers:
        keep = {i for i in cover if i not in total}
        lacking = needed - set().union(*(parts[i].attrs for i in keep))
        if lacking or not keep:
            keep.update(choose_cover(rel, lacking, among=total) or [])
            if not keep:
                keep.add(min(total, key=lambda i: (len(parts[i]), i)))
        branch = sorted(keep)
        if branch not in branches:
            branches.append(branch)
    # a branch of total partitions is always present and makes the others redundant
    always = [b for b in branches if set(b) <= total]
    if always:
        return [min(always, key=lambda b: (len(b), sum(len(parts[i]) for i in b), b))]
    # a branch that contains another is present only when the smaller one is
    return [b for b in branches if not any(o != b and set(o) <= set(b) for o in branches)]


# ---------------------------------------------------------------------------
# merge insertion


def insert_merges(q: Query, db: UDatabase) -> Query:
    """Replace relation leaves by merges of the partitions the query needs.

    A partition is left out when its attributes are not needed and it
    supplies every tuple in every world.  Overlapping partitions give one
    branch per minimal attribute cover, joined by ``Cover``.  Under ``possible``, on a reduced
    database, a join-free branch may read a single covering partition even
    if other partitions could drop tuples, since each of its rows is
    completable in some world.
    """
    body, poss = strip_poss(q)
    attrs_of = _attrs_of(db)
    needs: dict[int, set[str]] = {}
    leaves: list[Relation] = []
    joined: dict[int, bool] = {}

    def number(node, under_join):
        if isinstance(node, Relation):
            db.relation(node.name)
            leaves.append(node)
            occ = len(leaves) - 1
            joined[occ] = under_join
            return ("leaf", occ)
        if isinstance(node, (Merge, PartitionRef)):
            raise QueryError("insert_merges expects a query over logical relations")
        kids = tuple(number(c, under_join or isinstance(node, Join)) for c in node.children)
        return (node, kids)

    shape = number(body, False)

    def require(sh, needed: set[str]):
        node, kids = sh
        if node == "leaf":
            leaf = leaves[kids]
            prefix = leaf.qualifier + "."
            needs.setdefault(kids, set()).update(c[len(prefix):] for c in needed)
            return
        if isinstance(node, Select):
            cols = output_columns(node.child, attrs_of)
            refs = {resolve(r, cols) for a in node.cond for r in a.refs()}
            require(kids[0], needed | refs)
        elif isinstance(node, Project):
            cols = output_columns(node.child, attrs_of)
            if node.columns is None:
                require(kids[0], set(cols))
            else:
                require(kids[0], {resolve(r.name, cols) for _, r in node.columns})
        elif isinstance(node, Join):
            lcols = output_columns(node.left, attrs_of)
            rcols = output_columns(node.right, attrs_of)
            output_columns(node, attrs_of)
            refs = {resolve(r, lcols + rcols) for a in node.cond for r in a.refs()}
            allneed = needed | refs
            require(kids[0], {c for c in allneed if c in lcols})
            require(kids[1], {c for c in allneed if c in rcols})
        elif isinstance(node, Union):
            output_columns(node, attrs_of)
            require(kids[0], needed)
            require(kids[1], needed)
        else:
            raise QueryError(f"unsupported node {node!r}")

    require(shape, set(output_columns(body, attrs_of)))

    def rebuild(sh):
        node, kids = sh
        if node == "leaf":
            leaf = leaves[kids]
            rel = db.relation(leaf.name)
            shortcut = poss and db.reduced and not joined[kids]
            needed = needs.get(kids, set())
            branches = leaf_partitions(db, leaf.name, needed, shortcut)
            trees = []
            for idx in branches:
                refs = [PartitionRef(leaf.name, i, leaf.qualifier, kids, rel.partitions[i].attrs) for i in idx]
                tree = refs[0]
                for r in refs[1:]:
                    tree = Merge(tree, r)
                have = output_columns(tree, attrs_of)
                keep = set(have) if len(branches) == 1 else {f"{leaf.qualifier}.{a}" for a in needed}
                order = tuple(f"{leaf.qualifier}.{a}" for a in rel.attrs if f"{leaf.qualifier}.{a}" in keep)
                if order != have:
                    tree = Project(tree, tuple((c, ColRef(c)) for c in order))
                trees.append(tree)
            out = trees[0]
            for t in trees[1:]:
                out = Cover(out, t)
            return out
        children = [rebuild(k) for k in kids]
        if isinstance(node, Select):
            return Select(children[0], node.cond)
        if isinstance(node, Project):
            return Project(children[0], node.columns)
        if isinstance(node, Join):
            return Join(children[0], children[1], node.cond)
        if isinstance(node, Union):
            return Union(children[0], children[1])
        raise QueryError(f"unsupported node {node!r}")

    out = rebuild(shape)
    return Poss(out) if poss else out


# ---------------------------------------------------------------------------
# translation


def translate(q: Query) -> Plan:
    """Map a merge-annotated logical query onto physical operators."""
    tags: dict[int, str] = {}
    used: set[str] = set()

    def assign(node):
        if isinstance(node, PartitionRef):
            if node.occurrence not in tags:
                tag, n = node.alias, 1
                while tag in used:
                    n += 1
                    tag = f"{node.alias}#{n}"
                used.add(tag)
                tags[node.occurrence] = tag
        if isinstance(node, Relation):
            raise QueryError(f"relation {node.name!r} has no partitions assigned; run insert_merges first")
        for c in node.children:
            assign(c)

    assign(q)

    def tr(node) -> Plan:
        if isinstance(node, PartitionRef):
            return Scan(node.relation, node.index, tags[node.occurrence], node.alias, tuple(node.attrs))
        if isinstance(node, Select):
            child = tr(node.child)
            return PSelect(child, resolve_cond(node.cond, child.value_cols))
        if isinstance(node, Project):
            child = tr(node.child)
            cols = star_columns(child.value_cols) if node.columns is None else node.columns
            return PProject(child, tuple((out, resolve(ref.name, child.value_cols)) for out, ref in cols))
        if isinstance(node, Join):
            left, right = tr(node.left), tr(node.right)
            return PJoin(left, right, resolve_cond(node.cond, left.value_cols + right.value_cols))
        if isinstance(node, Merge):
            return PMerge(tr(node.left), tr(node.right))
        if isinstance(node, Union):
            return PUnion(tr(node.left), tr(node.right))
        if isinstance(node, Cover):
            return PCover(tr(node.left), tr(node.right))
        if isinstance(node, Poss):
            return PPoss(tr(node.child))
        raise QueryError(f"cannot translate {node!r}")

    return tr(q)


def plan_query(q: Query, db: UDatabase, optimize: bool = True) -> Plan:
    """Merge insertion, translation and (optionally) optimization in one call."""
    plan = translate(insert_merges(q, db))
    if optimize:
        from .optimizer import optimize as _optimize

        plan = _optimize(plan, db)
    return plan


__all__ = ["insert_merges", "translate", "plan_query", "choose_cover", "total_partitions", "ColRef"]
