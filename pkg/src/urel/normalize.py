"""Normalization of ws-descriptors.

Variables that occur together in some descriptor are fused into one
product variable per connected component, so that afterwards every
descriptor has size one.  A fused value is the tuple of member values in
the component's sorted variable order.
"""
from __future__ import annotations

import math
import re
from itertools import product

from .errors import NotReduced, OutputGuardExceeded
from .model import Descriptor, RelationDef, UDatabase, WorldTable

DEFAULT_GUARD = 10**6


class UnionFind:
    def __init__(self, items=()):
        self.parent: dict = {}
        for x in items:
            self.add(x)

    def add(self, x) -> None:
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # the smaller id becomes the root, which keeps roots deterministic
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


class ComponentGraph:
    """Connected components of the variable co-occurrence relation.

    ``components`` maps a component id to its sorted member list; the
    components are ordered by their smallest member.
    """

    def __init__(self, variables, descriptors, naming: str = "compact"):
        uf = UnionFind(sorted(variables))
        for d in descriptors:
            vs = d.variables
            for v in vs:
                uf.add(v)
            for v in vs[1:]:
                uf.union(vs[0], v)
        groups: dict = {}
        for v in sorted(uf.parent):
            groups.setdefault(uf.find(v), []).append(v)
        members = sorted(groups.values(), key=lambda g: g[0])
        taken = set(uf.parent)
        self.components: dict[str, tuple[str, ...]] = {}
        self.of: dict[str, str] = {}
        for group in members:
            cid = component_name(group, taken, naming)
            taken.add(cid)
            self.components[cid] = tuple(group)
            for v in group:
                self.of[v] = cid

    def __len__(self) -> int:
        return len(self.components)


_SPLIT = re.compile(r"(.*?)(\d+)\Z")


def component_name(group, taken=(), naming: str = "compact") -> str:
    """Identifier for a fused component.

    A singleton keeps its variable.  ``compact`` joins the numeric suffixes
    of members sharing one stem (``c1``, ``c2`` give ``c12``) when the result
    is unused; otherwise, and always under ``prefix``, the name is ``comp:``
    plus the smallest member.
    """
    if len(group) == 1:
        return group[0]
    if naming == "compact":
        parts = [_SPLIT.match(v) for v in group]
        if all(parts) and len({m.group(1) for m in parts}) == 1 and parts[0].group(1):
            name = parts[0].group(1) + "".join(m.group(2) for m in parts)
            if name not in taken:
                return name
    elif naming != "prefix":
        raise ValueError(f"unknown naming scheme {naming!r}")
    return "comp:" + group[0]


def normalize(db: UDatabase, guard: int = DEFAULT_GUARD, naming: str = "compact") -> UDatabase:
    """Rewrite a reduced database so that every descriptor has size one.

    Each row expands into one row per combination of the component
    variables its descriptor leaves open.  The new world table holds the
    full product of member domains for each component.  ``guard`` bounds
    both the output rows and the new world-table entries.
    """
    if not db.reduced:
        raise NotReduced("normalize requires a reduced database; run reduce first")
    w = db.world
    descriptors = [d for rel in db.relations.values() for p in rel.partitions for d, _, _ in p.rows]
    graph = ComponentGraph(w.domains, descriptors, naming)

    new_domains: dict = {}
    new_probs: dict | None = {} if w.probabilistic else None
    entries = 0
    for cid, members in graph.components.items():
        size = math.prod(len(w.domains[v]) for v in members)
        entries += size
        if entries > guard:
            raise OutputGuardExceeded(f"component {cid} of {len(members)} variables needs {size} domain values (guard {guard})")
        if len(members) == 1:
            new_domains[cid] = w.domains[members[0]]
            if new_probs is not None:
                for val in w.domains[members[0]]:
                    new_probs[(cid, val)] = w.probs[(members[0], val)]
            continue
        vals = list(product(*(w.domains[v] for v in members)))
        new_domains[cid] = tuple(vals)
        if new_probs is not None:
            for combo in vals:
                new_probs[(cid, combo)] = math.prod(w.probs[(v, x)] for v, x in zip(members, combo))

    def expand(d: Descriptor):
        if not d:
            return [d]
        cid = graph.of[d.variables[0]]
        members = graph.components[cid]
        if len(members) == 1:
            return [d]
        choices = [(d.get(v),) if v in d else w.domains[v] for v in members]
        return [Descriptor({cid: combo}) for combo in product(*choices)]

    relations = {}
    produced = 0
    for name, rel in db.relations.items():
        parts = []
        for part in rel.partitions:
            rows = []
            for d, t, a in part.rows:
                new = expand(d)
                produced += len(new)
                if produced > guard:
                    where = f" at component {graph.of[d.variables[0]]}" if d else ""
                    raise OutputGuardExceeded(f"normalization exceeds {guard} rows{where}")
                rows.extend((nd, t, a) for nd in new)
            parts.append(part.with_rows(rows))
        relations[name] = RelationDef(rel.attrs, tuple(parts))
    return UDatabase(WorldTable(new_domains, new_probs), relations, reduced=True, normalized=True)


def is_normalized(db: UDatabase) -> bool:
    return all(len(d) <= 1 for rel in db.relations.values() for p in rel.partitions for d, _, _ in p.rows)
