import random

import pytest
from hypothesis import given, settings, strategies as st

from urel.errors import ConflictingAssignment, InvalidWorldTable, NotProbabilistic, SchemaError
from urel.model import (
    Descriptor,
    RelationDef,
    Table,
    UDatabase,
    WorldTable,
    covers_all_worlds,
    descriptor_probability,
    extends,
    make_database,
    make_partition,
    minimal_covers,
    validate,
    world_count_log10,
)
from urel.oracle import enumerate_worlds

from helpers import random_db, random_descriptor, random_world

assignments = st.dictionaries(st.sampled_from("xyz"), st.integers(1, 3), max_size=3)


@given(assignments, assignments)
def test_consistency_matches_pointwise_definition(a, b):
    d1, d2 = Descriptor(a), Descriptor(b)
    expected = all(a[k] == b[k] for k in a.keys() & b.keys())
    assert d1.consistent(d2) == expected == d2.consistent(d1)
    if expected:
        assert dict(d1.combine(d2).items) == {**a, **b}
    else:
        with pytest.raises(ConflictingAssignment):
            d1.combine(d2)


@given(assignments)
def test_descriptor_is_canonical(a):
    d = Descriptor(a)
    assert d == Descriptor(reversed(list(a.items())))
    assert hash(d) == hash(Descriptor(dict(a)))
    assert list(d.variables) == sorted(a)


def test_descriptor_rejects_two_values_for_a_variable():
    with pytest.raises(ConflictingAssignment):
        Descriptor([("x", 1), ("x", 2)])


def test_world_table_checks():
    with pytest.raises(InvalidWorldTable):
        WorldTable({"x": ()})
    with pytest.raises(InvalidWorldTable):
        WorldTable({"x": (1, 2)}, {("x", 1): 0.5, ("x", 2): 0.6})
    w = WorldTable({"x": (1, 2)}, {("x", 1): 0.25, ("x", 2): 0.75})
    assert descriptor_probability(Descriptor({"x": 2}), w) == 0.75
    with pytest.raises(NotProbabilistic):
        descriptor_probability(Descriptor(), WorldTable({"x": (1,)}))
    assert WorldTable({"x": (1, 2, 3), "y": (1, 2)}).world_count() == 6
    assert world_count_log10(WorldTable()) == 0


@settings(max_examples=150)
@given(st.randoms(use_true_random=False))
def test_covers_all_worlds_matches_enumeration(rnd):
    w = random_world(rnd, max_vars=4)
    ds = [random_descriptor(rnd, w) for _ in range(rnd.randint(0, 5))]
    brute = all(any(extends(f, d) for d in ds) for f in enumerate_worlds(w))
    assert covers_all_worlds(ds, w) == brute


def test_minimal_covers():
    a = make_partition("R", ["A"], [])
    b = make_partition("R", ["B"], [])
    ab = make_partition("R", ["A", "B"], [])
    assert minimal_covers(RelationDef(("A", "B"), (a, b))) == [(0, 1)]
    assert minimal_covers(RelationDef(("A", "B"), (ab, b))) == [(0,)]
    assert minimal_covers(RelationDef(("A", "B"), (a, ab, b))) == [(1,), (0, 2)]


def test_validate_reports_contradictions_and_unknown_entries():
    w = WorldTable({"x": (1, 2)})
    p1 = make_partition("R", ["A", "B"], [({"x": 1}, 1, (1, 2))])
    p2 = make_partition("R", ["B"], [(None, 1, (3,))])
    bad = make_database(w, {"R": (["A", "B"], [p1, p2])})
    problems = validate(bad)
    assert len(problems) == 1 and problems[0].relation == "R"
    p3 = make_partition("R", ["A"], [({"x": 3}, 1, (1,))])
    assert any("x=3" in str(v) for v in validate(make_database(w, {"R": (["A"], [p3])})))
    uncovered = make_database(w, {"R": (["A", "B"], [make_partition("R", ["A"], [])])})
    assert validate(uncovered)


def test_random_databases_are_valid():
    for seed in range(100):
        assert validate(random_db(random.Random(seed))) == []


def test_table():
    t = Table(("a", "b"), {(2, "x"), (1, "y")})
    assert t.sorted_rows() == [(1, "y"), (2, "x")]
    assert (1, "y") in t and len(t) == 2
    with pytest.raises(SchemaError):
        Table(("a",), {(1, 2)})


def test_database_lookup():
    from urel.errors import UnknownRelation

    db = UDatabase(WorldTable(), {})
    with pytest.raises(UnknownRelation):
        db.relation("R")
