"""Physical operator trees over U-relations.

Every node knows its output schema: value columns and tuple-id columns (the
descriptor column is implicit).  Conditions inside plans always reference
exact column names.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from ..errors import AliasingError, MergeOriginError, SchemaError
from .ast import ColRef, Condition, cond_str


class Plan:
    children: tuple = ()

    @property
    def value_cols(self) -> tuple[str, ...]:
        raise NotImplementedError

    @property
    def tid_cols(self) -> tuple[str, ...]:
        raise NotImplementedError


def _check_refs(cond: Condition, cols: tuple[str, ...], where: str) -> None:
    for atom in cond:
        for o in (atom.left, atom.right):
            if isinstance(o, ColRef) and o.name not in cols:
                raise SchemaError(f"{where}: column {o.name!r} not among {cols}")


@dataclass(frozen=True)
class Scan(Plan):
    relation: str
    index: int
    tag: str
    alias: str
    attrs: tuple

    @cached_property
    def value_cols(self):
        return tuple(f"{self.alias}.{a}" for a in self.attrs)

    @property
    def tid_cols(self):
        return (self.tag,)


@dataclass(frozen=True)
class PSelect(Plan):
    child: Plan
    cond: Condition

    def __post_init__(self):
        _check_refs(self.cond, self.child.value_cols, "selection")

    @property
    def children(self):
        return (self.child,)

    @property
    def value_cols(self):
        return self.child.value_cols

    @property
    def tid_cols(self):
        return self.child.tid_cols


@dataclass(frozen=True)
class PProject(Plan):
    """Keeps descriptors and tuple ids; ``columns`` is ``((out, src), ...)``."""

    child: Plan
    columns: tuple

    def __post_init__(self):
        cols = self.child.value_cols
        for out, src in self.columns:
            if src not in cols:
                raise SchemaError(f"projection: column {src!r} not among {cols}")
        outs = [o for o, _ in self.columns]
        if len(set(outs)) != len(outs):
            raise SchemaError(f"projection repeats output names {outs}")

    @property
    def children(self):
        return (self.child,)

    @cached_property
    def value_cols(self):
        return tuple(o for o, _ in self.columns)

    @property
    def tid_cols(self):
        return self.child.tid_cols

    @property
    def renames(self) -> bool:
        return any(o != s for o, s in self.columns)


def pproject(child: Plan, cols) -> PProject:
    return PProject(child, tuple((c, c) for c in cols))


@dataclass(frozen=True)
class PJoin(Plan):
    left: Plan
    right: Plan
    cond: Condition = ()

    def __post_init__(self):
        shared = set(self.left.tid_cols) & set(self.right.tid_cols)
        if shared:
            raise AliasingError(f"join operands share tuple-id columns {sorted(shared)}; alias self-joins")
        clash = set(self.left.value_cols) & set(self.right.value_cols)
        if clash:
            raise SchemaError(f"join operands share value columns {sorted(clash)}")
        _check_refs(self.cond, self.value_cols, "join")

    @property
    def children(self):
        return (self.left, self.right)

    @cached_property
    def value_cols(self):
        return self.left.value_cols + self.right.value_cols

    @cached_property
    def tid_cols(self):
        return self.left.tid_cols + self.right.tid_cols


@dataclass(frozen=True)
class PMerge(Plan):
    left: Plan
    right: Plan

    def __post_init__(self):
        if not set(self.left.tid_cols) & set(self.right.tid_cols):
            raise MergeOriginError(
                f"merge operands share no tuple-id columns ({self.left.tid_cols} vs {self.right.tid_cols})"
            )

    @property
    def children(self):
        return (self.left, self.right)

    @cached_property
    def value_cols(self):
        left = self.left.value_cols
        return left + tuple(c for c in self.right.value_cols if c not in left)

    @cached_property
    def tid_cols(self):
        left = self.left.tid_cols
        return left + tuple(c for c in self.right.tid_cols if c not in left)


def union_tid_cols(left: tuple, right: tuple) -> tuple:
    return tuple("L." + c for c in left) + tuple("R." + c for c in right)


@dataclass(frozen=True)
class PUnion(Plan):
    left: Plan
    right: Plan

    def __post_init__(self):
        if self.left.value_cols != self.right.value_cols:
            raise SchemaError(f"union operands differ: {self.left.value_cols} vs {self.right.value_cols}")

    @property
    def children(self):
        return (self.left, self.right)

    @property
    def value_cols(self):
        return self.left.value_cols

    @cached_property
    def tid_cols(self):
        return union_tid_cols(self.left.tid_cols, self.right.tid_cols)


@dataclass(frozen=True)
class PCover(Plan):
    """Union of two reconstructions of the same tuples; tuple ids are kept."""

    left: Plan
    right: Plan

    def __post_init__(self):
        if self.left.value_cols != self.right.value_cols or self.left.tid_cols != self.right.tid_cols:
            raise SchemaError(
                f"cover operands differ: {self.left.value_cols}/{self.left.tid_cols} "
                f"vs {self.right.value_cols}/{self.right.tid_cols}"
            )

    @property
    def children(self):
        return (self.left, self.right)

    @property
    def value_cols(self):
        return self.left.value_cols

    @property
    def tid_cols(self):
        return self.left.tid_cols


@dataclass(frozen=True)
class PPoss(Plan):
    child: Plan

    @property
    def children(self):
        return (self.child,)

    @property
    def value_cols(self):
        return self.child.value_cols

    @property
    def tid_cols(self):
        return ()


def replace_children(p: Plan, children) -> Plan:
    children = tuple(children)
    if isinstance(p, Scan):
        return p
    if isinstance(p, (PSelect,)):
        return PSelect(children[0], p.cond)
    if isinstance(p, PProject):
        return PProject(children[0], p.columns)
    if isinstance(p, PJoin):
        return PJoin(children[0], children[1], p.cond)
    if isinstance(p, PMerge):
        return PMerge(children[0], children[1])
    if isinstance(p, PUnion):
        return PUnion(children[0], children[1])
    if isinstance(p, PCover):
        return PCover(children[0], children[1])
    if isinstance(p, PPoss):
        return PPoss(children[0])
    raise TypeError(p)


def label(p: Plan) -> str:
    if isinstance(p, Scan):
        return f"Scan {p.relation}[{p.index}] as {p.alias} tid={p.tag} ({', '.join(p.attrs)})"
    if isinstance(p, PSelect):
        return f"Select {cond_str(p.cond)}"
    if isinstance(p, PProject):
        cols = ", ".join(o if o == s else f"{s} as {o}" for o, s in p.columns)
        return f"Project [{cols}]"
    if isinstance(p, PJoin):
        return f"Join {cond_str(p.cond)} and psi"
    if isinstance(p, PMerge):
        common = [c for c in p.left.tid_cols if c in p.right.tid_cols]
        return f"Merge on {', '.join(common)} and psi"
    if isinstance(p, PUnion):
        return "Union"
    if isinstance(p, PCover):
        return "Cover"
    if isinstance(p, PPoss):
        return "Poss"
    raise TypeError(p)


def render(p: Plan, estimate=None, indent: int = 0) -> str:
    """Indented operator tree; ``estimate(node)`` adds cardinality estimates."""
    line = "  " * indent + label(p)
    if estimate is not None:
        line += f"  [est={estimate(p):.3g}]"
    return "\n".join([line] + [render(c, estimate, indent + 1) for c in p.children])


def walk(p: Plan):
    yield p
    for c in p.children:
        yield from walk(c)
