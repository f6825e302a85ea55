import datetime
import json
import random
from decimal import Decimal

import pytest
from hypothesis import given, strategies as st

from urel import fixtures as fx
from urel.errors import StorageError
from urel.model import format_value
from urel.storage import load_database, parse_value, save_database

from helpers import random_db

values = st.one_of(
    st.integers(-10**6, 10**6),
    st.decimals(min_value=-1000, max_value=1000, places=2, allow_nan=False, allow_infinity=False),
    st.dates(min_value=datetime.date(1900, 1, 1), max_value=datetime.date(2100, 1, 1)),
    st.text(alphabet="abcXYZ_#", min_size=1, max_size=6).filter(lambda s: not s.isdigit()),
)


@given(values)
def test_value_round_trip(v):
    back = parse_value(format_value(v))
    assert back == v and type(back) is type(v)


def test_typed_values():
    assert parse_value("12") == 12
    assert parse_value("1.50") == Decimal("1.50")
    assert parse_value("1995-03-15") == datetime.date(1995, 3, 15)
    assert parse_value("Tank") == "Tank"


def _same(a, b):
    assert a.world == b.world
    assert (a.reduced, a.normalized) == (b.reduced, b.normalized)
    assert a.relations.keys() == b.relations.keys()
    for name in a.relations:
        ra, rb = a.relation(name), b.relation(name)
        assert ra.attrs == rb.attrs
        for pa, pb in zip(ra.partitions, rb.partitions):
            assert pa.attrs == pb.attrs and set(pa.rows) == set(pb.rows)


@pytest.mark.parametrize("make", [fx.vehicles, fx.dangling, fx.fusion, lambda: fx.chain(4)])
def test_fixture_round_trip(tmp_path, make):
    db = make()
    _same(db, load_database(save_database(db, tmp_path / "db")))


def test_random_round_trip_is_byte_stable(tmp_path):
    for seed in range(30):
        db = random_db(random.Random(seed))
        first = save_database(db, tmp_path / f"a{seed}")
        again = save_database(load_database(first), tmp_path / f"b{seed}")
        for f in sorted(first.iterdir()):
            assert f.read_bytes() == (again / f.name).read_bytes()


def test_manifest_layout(tmp_path):
    root = save_database(fx.vehicles(), tmp_path / "v")
    manifest = json.loads((root / "manifest.json").read_text())
    rel = manifest["relations"][0]
    assert rel["name"] == "R" and [p["covered_attrs"] for p in rel["partitions"]] == [["Id"], ["Type"], ["Faction"]]
    assert (root / "R_0.tsv").read_text().splitlines()[0] == "d\tt1\tId"


def test_missing_manifest(tmp_path):
    with pytest.raises(StorageError):
        load_database(tmp_path)
