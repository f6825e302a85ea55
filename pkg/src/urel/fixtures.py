"""Small hand-built databases used by tests, demos and the CLI.

``vehicles`` is the moving-vehicles map; ``dangling`` has two rows that
never complete; ``fusion`` exercises normalization; ``chain`` links n
pairs of rows so that their variables end up in one component.
"""
from __future__ import annotations

from .model import RelationDef, UDatabase, URelation, WorldTable, make_database, make_partition

VEHICLE_QUERY = "possible (select Id from R where Type='Tank' and Faction='Enemy')"


def vehicles() -> UDatabase:
    """Vehicle ids known up to a swap (x), type of d unknown (y), faction of d unknown (z)."""
    w = WorldTable({"x": (1, 2), "y": (1, 2), "z": (1, 2)})
    ids = make_partition("R", ["Id"], [
        (None, "a", (1,)),
        ({"x": 1}, "b", (2,)),
        ({"x": 2}, "b", (3,)),
        ({"x": 1}, "c", (3,)),
        ({"x": 2}, "c", (2,)),
        (None, "d", (4,)),
    ])
    types = make_partition("R", ["Type"], [
        (None, "a", ("Tank",)),
        (None, "b", ("Transport",)),
        (None, "c", ("Tank",)),
        ({"y": 1}, "d", ("Tank",)),
        ({"y": 2}, "d", ("Transport",)),
    ])
    factions = make_partition("R", ["Faction"], [
        (None, "a", ("Friend",)),
        (None, "b", ("Friend",)),
        (None, "c", ("Enemy",)),
        ({"z": 1}, "d", ("Friend",)),
        ({"z": 2}, "d", ("Enemy",)),
    ])
    return make_database(w, {"R": (["Id", "Type", "Faction"], [ids, types, factions])}, reduced=True)


def vehicle_pairs_query() -> str:
    """Pairs of distinct enemy tanks, written as a self-join with aliases."""
    return (
        "possible (select S1.Id, S2.Id from R S1, R S2 where "
        "S1.Type = 'Tank' and S1.Faction = 'Enemy' and "
        "S2.Type = 'Tank' and S2.Faction = 'Enemy' and S1.Id <> S2.Id)"
    )


def dangling() -> UDatabase:
    """Two partitions where the second row of each finds no completing partner."""
    w = WorldTable({"c1": (1, 2), "c2": (1, 2)})
    a = make_partition("R", ["A"], [({"c1": 1}, "t1", ("a1",)), ({"c2": 1}, "t2", ("a2",))])
    b = make_partition("R", ["B"], [({"c1": 1}, "t1", ("b1",)), ({"c1": 2}, "t1", ("b2",))])
    return make_database(w, {"R": (["A", "B"], [a, b])})


def fusion() -> UDatabase:
    """One relation whose descriptors tie c1 to c2 while c3 stays apart."""
    w = WorldTable({"c1": (1, 2), "c2": (1, 2), "c3": (1, 2)})
    u = make_partition("U", ["A"], [
        ({"c1": 1}, "t1", ("a1",)),
        ({"c1": 1, "c2": 2}, "t2", ("a2",)),
        ({"c1": 2}, "t2", ("a3",)),
        ({"c3": 1}, "t3", ("a4",)),
        ({"c3": 2}, "t3", ("a5",)),
    ])
    return make_database(w, {"U": (["A"], [u])}, reduced=True)


def chain(n: int) -> UDatabase:
    """n binary variables; c_i sets tuple i's A and tuple i+1's B to the same bit.

    Joining on A = B ties every c_i to its neighbours, so the join result
    has 2n rows while its only component spans all n variables.
    """
    w = WorldTable({f"c{i}": ("w1", "w2") for i in range(n)})
    arows, brows = [], []
    for i in range(n):
        for val, bit in (("w1", 1), ("w2", 0)):
            arows.append(({f"c{i}": val}, f"t{i}", (bit,)))
            brows.append(({f"c{i}": val}, f"t{(i + 1) % n}", (bit,)))
    u1 = make_partition("R", ["A"], arows)
    u2 = make_partition("R", ["B"], brows)
    return make_database(w, {"R": (["A", "B"], [u1, u2])}, reduced=True)


CHAIN_QUERY = "select * from R where A = B"


def single_partition(u: URelation, w: WorldTable, name: str = "Q", **flags) -> UDatabase:
    """Wrap one U-relation as a database with a single relation."""
    return UDatabase(w, {name: RelationDef(u.attrs, (u,))}, **flags)


__all__ = [
    "vehicles",
    "vehicle_pairs_query",
    "dangling",
    "fusion",
    "chain",
    "single_partition",
    "VEHICLE_QUERY",
    "CHAIN_QUERY",
]
