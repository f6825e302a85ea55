import pytest

from urel import fixtures as fx
from urel.errors import QueryError, UnknownAttribute, UnknownRelation
from urel.model import WorldTable, make_database, make_partition
from urel.query.ast import Cover, Merge, PartitionRef, Poss, Project
from urel.query.parser import parse
from urel.query.plan import PCover, PJoin, PMerge, Scan, walk
from urel.query.planner import choose_cover, insert_merges, plan_query, total_partitions, translate


def _refs(q):
    out = []

    def go(n):
        if isinstance(n, PartitionRef):
            out.append(n.index)
        for c in n.children:
            go(c)

    go(q)
    return out


def test_battlefield_merges_all_three_partitions():
    q = insert_merges(parse(fx.VEHICLE_QUERY), fx.vehicles())
    assert isinstance(q, Poss)
    assert sorted(_refs(q)) == [0, 1, 2]
    assert any(isinstance(n, Merge) for n in [q.child.child.child])


def _partial_b():
    """B is known only in world x=1, so reading A alone is sound only under possible."""
    w = WorldTable({"x": (1, 2)})
    a = make_partition("R", ["A"], [(None, 1, ("a",))])
    b = make_partition("R", ["B"], [({"x": 1}, 1, ("b",))])
    return make_database(w, {"R": (["A", "B"], [a, b])}, reduced=True)


def test_single_partition_under_possible():
    db = _partial_b()
    assert total_partitions(db, "R") == {0}
    assert _refs(insert_merges(parse("possible (select A from R)"), db)) == [0]
    assert sorted(_refs(insert_merges(parse("select A from R"), db))) == [0, 1]


def test_overlapping_total_partition_is_used_alone():
    w = WorldTable()
    parts = [
        make_partition("R", ["A"], [(None, 1, (1,))]),
        make_partition("R", ["B"], [(None, 1, (2,))]),
        make_partition("R", ["A", "B"], [(None, 1, (1, 2))]),
    ]
    db = make_database(w, {"R": (["A", "B"], parts)})
    assert _refs(insert_merges(parse("select A, B from R"), db)) == [2]
    assert choose_cover(db.relation("R"), {"A", "B"}) == [2]


def test_overlapping_partial_partitions_give_alternative_branches():
    w = WorldTable({"x": (1, 2)})
    parts = [
        make_partition("R", ["A", "B"], [({"x": 1}, 1, (1, 2))]),
        make_partition("R", ["B"], [({"x": 2}, 1, (2,))]),
        make_partition("R", ["A"], [({"x": 2}, 1, (1,))]),
    ]
    db = make_database(w, {"R": (["A", "B"], parts)})
    q = insert_merges(parse("select A, B from R"), db)
    assert isinstance(q, Project) and isinstance(q.child, Cover)
    plan = translate(q)
    assert any(isinstance(n, PCover) for n in walk(plan))
    for n in walk(plan):
        if isinstance(n, PCover):
            assert n.left.tid_cols == n.right.tid_cols == ("R",)


def test_self_join_gets_distinct_tags():
    plan = plan_query(parse(fx.vehicle_pairs_query()), fx.vehicles(), optimize=False)
    tags = {n.tag for n in walk(plan) if isinstance(n, Scan)}
    assert tags == {"S1", "S2"}
    join = next(n for n in walk(plan) if isinstance(n, PJoin))
    assert not set(join.left.tid_cols) & set(join.right.tid_cols)


def test_repeated_relation_without_alias_is_tagged_apart():
    db = fx.vehicles()
    plan = plan_query(parse("select * from R a, R b where a.Id = b.Id"), db, optimize=False)
    assert {n.tag for n in walk(plan) if isinstance(n, Scan)} == {"a", "b"}


def test_schema_matches_logical_columns():
    db = fx.vehicles()
    plan = plan_query(parse("select Type, Id from R"), db)
    assert plan.value_cols == ("Type", "Id")
    assert plan.tid_cols == ("R",)
    all_cols = plan_query(parse("select * from R"), db)
    assert all_cols.value_cols == ("Id", "Type", "Faction")


def test_merges_only_join_partitions_of_one_leaf():
    plan = plan_query(parse(fx.vehicle_pairs_query()), fx.vehicles(), optimize=False)
    for n in walk(plan):
        if isinstance(n, PMerge):
            assert len({s.tag for s in walk(n) if isinstance(s, Scan)}) == 1


def test_resolution_errors():
    db = fx.vehicles()
    with pytest.raises(UnknownRelation):
        insert_merges(parse("select A from Nope"), db)
    with pytest.raises(UnknownAttribute):
        insert_merges(parse("select Colour from R"), db)
    with pytest.raises(QueryError):
        translate(parse("select Id from R"))
