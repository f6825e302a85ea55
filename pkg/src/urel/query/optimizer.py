"""Rewrite rules over physical plans and a small cost-driven optimizer.

Each rule is an equivalence between plan shapes and can be applied at a
node in either direction; ``None`` means it does not match there.  A
rewrite that would reorder value columns wraps its result in a projection
restoring the original order, so every rule preserves the node's schema.

The optimizer does hill climbing: per pass it tries every forward and
backward application at every node and keeps the cheapest strictly
improving plan, for at most ``MAX_PASSES`` passes.
"""
from __future__ import annotations

from ..errors import UrelError
from ..model import UDatabase
from .ast import Atom, ColRef
from .plan import PCover, PJoin, PMerge, PPoss, PProject, PSelect, PUnion, Plan, Scan, pproject, render, replace_children

MAX_PASSES = 10
SELECTIVITY = 0.1


def _refs(atom: Atom) -> set[str]:
    return set(atom.refs())


def _reorder(p: Plan, cols: tuple) -> Plan:
    """``p`` with value columns in the order ``cols`` (a permutation)."""
    if p.value_cols == tuple(cols):
        return p
    return pproject(p, cols)


def _pure(p: Plan) -> bool:
    return isinstance(p, PProject) and not p.renames


def _select(child: Plan, cond) -> Plan:
    return PSelect(child, tuple(cond)) if cond else child


# ---------------------------------------------------------------------------
# rules


class Rule:
    name = ""

    def forward(self, p: Plan) -> Plan | None:
        return None

    def backward(self, p: Plan) -> Plan | None:
        return None


class MergeElimination(Rule):
    """merge(π_X(R), π_{A-X}(R)) = R for the full column list A of R."""

    name = "merge-elim"

    def forward(self, p):
        if not (isinstance(p, PMerge) and _pure(p.left) and _pure(p.right)):
            return None
        core = p.left.child
        if p.right.child != core:
            return None
        if set(p.left.value_cols) | set(p.right.value_cols) != set(core.value_cols):
            return None
        return _reorder(core, p.value_cols)

    def backward(self, p):
        cols = p.value_cols
        if isinstance(p, PPoss) or len(cols) < 2 or not p.tid_cols:
            return None
        k = len(cols) // 2
        return PMerge(pproject(p, cols[:k]), pproject(p, cols[k:]))


class MergeCommutativity(Rule):
    """merge(R, S) = merge(S, R)."""

    name = "merge-comm"

    def forward(self, p):
        if not isinstance(p, PMerge):
            return None
        flipped = PMerge(p.right, p.left)
        if set(flipped.value_cols) != set(p.value_cols):
            return None
        return _reorder(flipped, p.value_cols)

    backward = forward


class MergeAssociativity(Rule):
    """merge(merge(R, S), T) = merge(R, merge(S, T))."""

    name = "merge-assoc"

    def forward(self, p):
        if not (isinstance(p, PMerge) and isinstance(p.left, PMerge)):
            return None
        r, s, t = p.left.left, p.left.right, p.right
        try:
            out = PMerge(r, PMerge(s, t))
        except UrelError:
            return None
        if not _same_merge_keys(p, out, r, s, t):
            return None
        return _reorder(out, p.value_cols)

    def backward(self, p):
        if not (isinstance(p, PMerge) and isinstance(p.right, PMerge)):
            return None
        r, s, t = p.left, p.right.left, p.right.right
        try:
            out = PMerge(PMerge(r, s), t)
        except UrelError:
            return None
        if not _same_merge_keys(p, out, r, s, t):
            return None
        return _reorder(out, p.value_cols)


def _same_merge_keys(a: Plan, b: Plan, *parts: Plan) -> bool:
    """Both groupings pair every two operands on the same tid columns, and
    they resolve shared value columns to the same source."""
    if set(a.value_cols) != set(b.value_cols):
        return False
    tids = [set(x.tid_cols) for x in parts]
    cols = [set(x.value_cols) for x in parts]
    # a value column supplied by two operands must come with a shared tid column,
    # otherwise the copy kept depends on the grouping
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            if cols[i] & cols[j] and not tids[i] & tids[j]:
                return False
    return True


class SelectPushdown(Rule):
    """σ_φ(merge(R, S)) = merge(σ_φ(R), S) when φ only reads R.

    Forward also moves selections through joins, projections and unions.
    """

    name = "select-push"

    def forward(self, p):
        if not isinstance(p, PSelect):
            return None
        c = p.child
        if isinstance(c, PSelect):
            return PSelect(c.child, c.cond + p.cond)
        if isinstance(c, PMerge):
            lc, rc = set(c.left.value_cols), set(c.right.value_cols)
            left, right, rest = [], [], []
            for a in p.cond:
                (left if _refs(a) <= lc else right if _refs(a) <= rc else rest).append(a)
            if not left and not right:
                return None
            return _select(PMerge(_select(c.left, left), _select(c.right, right)), rest)
        if isinstance(c, PJoin):
            lc, rc = set(c.left.value_cols), set(c.right.value_cols)
            left, right, both = [], [], []
            for a in p.cond:
                (left if _refs(a) <= lc else right if _refs(a) <= rc else both).append(a)
            return PJoin(_select(c.left, left), _select(c.right, right), c.cond + tuple(both))
        if isinstance(c, PProject):
            src = dict(c.columns)

            def back(o):
                return ColRef(src[o.name]) if isinstance(o, ColRef) else o

            cond = tuple(Atom(back(a.left), a.op, back(a.right)) for a in p.cond)
            return PProject(PSelect(c.child, cond), c.columns)
        if isinstance(c, (PUnion, PCover)):
            return type(c)(PSelect(c.left, p.cond), PSelect(c.right, p.cond))
        return None

    def backward(self, p):
        if not isinstance(p, PMerge):
            return None
        for side in ("left", "right"):
            s = getattr(p, side)
            if isinstance(s, PSelect):
                inner = PMerge(s.child, p.right) if side == "left" else PMerge(p.left, s.child)
                if set(inner.value_cols) != set(p.value_cols):
                    continue
                return _reorder(PSelect(inner, s.cond), p.value_cols)
        return None


class JoinMergeReorder(Rule):
    """merge(R, S) ⋈_φ T = merge(R ⋈_φ T, S) when φ reads only R and T."""

    name = "join-merge"

    def forward(self, p):
        if not isinstance(p, PJoin):
            return None
        for merged, other, merged_left in ((p.left, p.right, True), (p.right, p.left, False)):
            if not isinstance(merged, PMerge):
                continue
            for r, s in ((merged.left, merged.right), (merged.right, merged.left)):
                cols = set(r.value_cols) | set(other.value_cols)
                if not all(_refs(a) <= cols for a in p.cond):
                    continue
                if set(s.tid_cols) & set(other.tid_cols):
                    continue
                try:
                    inner = PJoin(r, other, p.cond) if merged_left else PJoin(other, r, p.cond)
                    out = PMerge(inner, s)
                except UrelError:
                    continue
                if set(out.value_cols) != set(p.value_cols):
                    continue
                return _reorder(out, p.value_cols)
        return None

    def backward(self, p):
        if not (isinstance(p, PMerge) and isinstance(p.left, PJoin)):
            return None
        j, s = p.left, p.right
        for r, t, r_left in ((j.left, j.right, True), (j.right, j.left, False)):
            if set(s.tid_cols) & set(t.tid_cols) or set(s.value_cols) & set(t.value_cols):
                continue
            if not set(s.tid_cols) & set(r.tid_cols):
                continue
            try:
                m = PMerge(r, s)
                out = PJoin(m, t, j.cond) if r_left else PJoin(t, m, j.cond)
            except UrelError:
                continue
            if set(out.value_cols) != set(p.value_cols):
                continue
            return _reorder(out, p.value_cols)
        return None


class ProjectSplit(Rule):
    """π_X(merge(R, S)) = merge(π_{X∩A}(R), π_{X∩B}(S))."""

    name = "project-split"

    def forward(self, p):
        if not (_pure(p) and isinstance(p.child, PMerge)):
            return None
        m = p.child
        x = set(p.value_cols)
        if x == set(m.value_cols):
            return None
        left = pproject(m.left, [c for c in m.left.value_cols if c in x])
        right = pproject(m.right, [c for c in m.right.value_cols if c in x])
        out = PMerge(_simplify(left), _simplify(right))
        if set(out.value_cols) != x:
            return None
        return _reorder(out, p.value_cols)

    def backward(self, p):
        if not (isinstance(p, PMerge) and (_pure(p.left) or _pure(p.right))):
            return None
        lc = p.left.child if _pure(p.left) else p.left
        rc = p.right.child if _pure(p.right) else p.right
        inner = PMerge(lc, rc)
        if not set(p.value_cols) <= set(inner.value_cols):
            return None
        # shared columns must still come from the same side
        taken = set(p.left.value_cols)
        for c in p.right.value_cols:
            if c not in taken and c in lc.value_cols:
                return None
        return pproject(inner, p.value_cols)


RULES: tuple[Rule, ...] = (
    MergeElimination(),
    MergeCommutativity(),
    MergeAssociativity(),
    SelectPushdown(),
    JoinMergeReorder(),
    ProjectSplit(),
)
RULES_BY_NAME = {r.name: r for r in RULES}


# ---------------------------------------------------------------------------
# cleanup


def _simplify(p: Plan) -> Plan:
    if isinstance(p, PProject):
        if not p.renames and p.columns and p.value_cols == p.child.value_cols:
            return p.child
        if isinstance(p.child, PProject):
            src = dict(p.child.columns)
            return _simplify(PProject(p.child.child, tuple((o, src[s]) for o, s in p.columns)))
    if isinstance(p, PSelect) and not p.cond:
        return p.child
    return p


def simplify(p: Plan) -> Plan:
    """Drop identity projections and empty selections; fuse stacked projections."""
    p = replace_children(p, [simplify(c) for c in p.children]) if p.children else p
    return _simplify(p)


# ---------------------------------------------------------------------------
# cost


class Estimator:
    """Cardinality estimates from partition sizes and fixed selectivities."""

    def __init__(self, db: UDatabase):
        self.db = db
        self.memo: dict = {}
        self.tids: dict = {}

    def distinct_tids(self, relation: str) -> int:
        if relation not in self.tids:
            ids = set()
            for part in self.db.relation(relation).partitions:
                ids.update(t for _, t, _ in part.rows)
            self.tids[relation] = max(1, len(ids))
        return self.tids[relation]

    def __call__(self, p: Plan) -> float:
        key = id(p)
        hit = self.memo.get(key)
        if hit is not None and hit[0] is p:
            return hit[1]
        est = self._estimate(p)
        self.memo[key] = (p, est)
        return est

    def _estimate(self, p: Plan) -> float:
        if isinstance(p, Scan):
            return float(len(self.db.relation(p.relation).partitions[p.index]))
        if isinstance(p, PSelect):
            return self(p.child) * SELECTIVITY ** len(p.cond)
        if isinstance(p, (PProject, PPoss)):
            return self(p.child)
        if isinstance(p, PJoin):
            return self(p.left) * self(p.right) * SELECTIVITY ** len(p.cond)
        if isinstance(p, PMerge):
            common = set(p.left.tid_cols) & set(p.right.tid_cols)
            rels = {s.tag: s.relation for s in _scans(p)}
            n = max((self.distinct_tids(rels[c]) for c in common if c in rels), default=1)
            return self(p.left) * self(p.right) / n
        if isinstance(p, (PUnion, PCover)):
            return self(p.left) + self(p.right)
        raise TypeError(p)

    def cost(self, p: Plan) -> float:
        """Sum of intermediate result sizes; projections are free."""
        own = 0.0 if isinstance(p, (PProject, PPoss)) else self(p)
        return own + sum(self.cost(c) for c in p.children)


def _scans(p: Plan):
    if isinstance(p, Scan):
        yield p
    for c in p.children:
        yield from _scans(c)


def estimate(p: Plan, db: UDatabase) -> float:
    return Estimator(db)(p)


# ---------------------------------------------------------------------------
# search


def rewrites_at(p: Plan, rules=RULES, directions=("forward", "backward")):
    """Every plan reachable from ``p`` by one rule application at one node."""
    for rule in rules:
        for direction in directions:
            if rule.name == "merge-elim" and direction == "backward":
                continue  # splitting never helps and would loop
            try:
                out = getattr(rule, direction)(p)
            except UrelError:
                out = None
            if out is not None and out != p:
                yield rule.name, direction, out
    for i, c in enumerate(p.children):
        for name, direction, new in rewrites_at(c, rules, directions):
            kids = list(p.children)
            kids[i] = new
            try:
                yield name, direction, replace_children(p, kids)
            except UrelError:
                continue


def optimize(p: Plan, db: UDatabase, max_passes: int = MAX_PASSES, trace: list | None = None) -> Plan:
    """Hill-climb over rule applications, keeping the output schema fixed."""
    est = Estimator(db)
    cols = p.value_cols
    best = simplify(p)
    best_cost = est.cost(best)
    for _ in range(max_passes):
        chosen = None
        for name, direction, cand in rewrites_at(best):
            cand = simplify(cand)
            c = est.cost(cand)
            if c < best_cost - 1e-9 and (chosen is None or c < chosen[0]):
                chosen = (c, cand, name, direction)
        if chosen is None:
            break
        best_cost, best = chosen[0], chosen[1]
        if trace is not None:
            trace.append((chosen[2], chosen[3], best_cost))
    if isinstance(best, PPoss):
        return PPoss(_reorder(best.child, cols))
    return _reorder(best, cols)


def explain(p: Plan, db: UDatabase) -> str:
    """Indented operator tree annotated with estimated cardinalities."""
    return render(p, Estimator(db))
