import random

import pytest

from urel import fixtures as fx
from urel.engine import reduce
from urel.errors import NotReduced, OutputGuardExceeded
from urel.model import WorldTable, make_database, make_partition
from urel.normalize import ComponentGraph, UnionFind, component_name, is_normalized, normalize
from urel.oracle import world_set

from helpers import random_db


def test_union_find():
    uf = UnionFind("abcd")
    uf.union("b", "a")
    uf.union("c", "d")
    assert uf.find("a") == uf.find("b") != uf.find("c")
    uf.union("a", "d")
    assert {uf.find(v) for v in "abcd"} == {"a"}


def test_components_of_the_fusion_example():
    db = fx.fusion()
    ds = [d for _, p in db.relations.items() for part in p.partitions for d, _, _ in part.rows]
    g = ComponentGraph(db.world.variables, ds)
    assert list(g.components.values()) == [("c1", "c2"), ("c3",)]


def test_component_names():
    assert component_name(["c3"]) == "c3"
    assert component_name(["c1", "c2"]) == "c12"
    assert component_name(["c1", "c2"], taken={"c12"}) == "comp:c1"
    assert component_name(["x", "y"]) == "comp:x"
    assert component_name(["c1", "c2"], naming="prefix") == "comp:c1"


def test_already_normalized_input_is_unchanged():
    w = WorldTable({"x": (1, 2), "y": (1, 2)})
    p = make_partition("R", ["A"], [({"x": 1}, 1, ("a",)), ({"y": 2}, 2, ("b",))])
    db = make_database(w, {"R": (["A"], [p])}, reduced=True)
    out = normalize(db)
    assert out.world == w
    assert set(out.relation("R").partitions[0].rows) == set(p.rows)
    assert is_normalized(out)


def test_requires_reduced_input():
    with pytest.raises(NotReduced):
        normalize(fx.dangling())


def test_guard():
    db = fx.chain(10)
    import urel

    u = urel.answer_relation(fx.CHAIN_QUERY, db)
    with pytest.raises(OutputGuardExceeded):
        normalize(fx.single_partition(u, db.world, reduced=True), guard=100)


def test_probabilities_multiply():
    w = WorldTable({"x": (1, 2), "y": (1, 2)}, {("x", 1): 0.25, ("x", 2): 0.75, ("y", 1): 0.5, ("y", 2): 0.5})
    p = make_partition("R", ["A"], [({"x": 1, "y": 2}, 1, ("a",))])
    out = normalize(make_database(w, {"R": (["A"], [p])}, reduced=True))
    (name,) = out.world.domains
    assert out.world.probs == {(name, (1, 1)): 0.125, (name, (1, 2)): 0.125, (name, (2, 1)): 0.375, (name, (2, 2)): 0.375}


def test_random_inputs_become_normalized_and_keep_their_worlds():
    for seed in range(80):
        db = reduce(random_db(random.Random(seed), max_vars=5))
        out = normalize(db)
        assert is_normalized(out)
        assert all(len(d) <= 1 for rel in out.relations.values() for p in rel.partitions for d, _, _ in p.rows)
        assert world_set(out) == world_set(db)
