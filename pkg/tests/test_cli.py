import io

import pytest

from urel import fixtures as fx
from urel.cli import main
from urel.storage import load_database, save_database


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def vehicles_dir(tmp_path):
    return str(save_database(fx.vehicles(), tmp_path / "vehicles"))


def test_validate(vehicles_dir):
    assert run("validate", vehicles_dir) == (0, "valid\n")


def test_query_with_oracle(vehicles_dir):
    code, out = run("query", "--db", vehicles_dir, "--text", fx.VEHICLE_QUERY, "--oracle")
    assert code == 0
    assert out == "Id\n2\n3\n4\noracle: MATCH\n"


def test_query_explain(vehicles_dir):
    code, out = run("query", "--db", vehicles_dir, "--text", "select Id from R", "--explain")
    assert code == 0 and "est=" in out


def test_query_from_file(vehicles_dir, tmp_path):
    f = tmp_path / "q.sql"
    f.write_text(fx.vehicle_pairs_query())
    code, out = run("query", "--db", vehicles_dir, "--file", str(f))
    assert code == 0 and out.splitlines()[1:] == ["2\t4", "3\t4", "4\t2", "4\t3"]


def test_certain(vehicles_dir):
    code, out = run("certain", "--db", vehicles_dir, "--text", "select Id from R where Faction = 'Friend'", "--oracle")
    assert (code, out) == (0, "Id\n1\noracle: MATCH\n")


def test_reduce_and_normalize(tmp_path):
    src = save_database(fx.dangling(), tmp_path / "d")
    code, out = run("reduce", "--db", str(src), "--out", str(tmp_path / "r"))
    assert code == 0 and out == "reduced: 4 -> 2 rows\n"
    assert load_database(tmp_path / "r").reduced
    assert run("normalize", "--db", str(src), "--out", str(tmp_path / "n"))[0] == 2
    assert run("normalize", "--db", str(src), "--out", str(tmp_path / "n"), "--reduce")[0] == 0
    assert load_database(tmp_path / "n").normalized


def test_generate_and_stats(tmp_path):
    out_dir = tmp_path / "g"
    code, out = run("generate", "--scale", "0.001", "--uncertainty", "0.05", "--seed", "1", "--out", str(out_dir))
    assert code == 0 and out.startswith("worlds_log10\t")
    assert (out_dir / "queries" / "q1.sql").exists()
    assert run("stats", str(out_dir)) == (0, out)
    assert run("validate", str(out_dir))[0] == 0


def test_worlds(vehicles_dir):
    code, out = run("worlds", "--db", vehicles_dir)
    assert code == 0 and out.splitlines()[0] == "x=1;y=1;z=1" and len(out.splitlines()) == 8
    code, out = run("worlds", "--db", vehicles_dir, "--world", "x=1;y=1;z=2")
    assert code == 0 and "3\tTank\tEnemy" in out


def test_exit_codes(vehicles_dir, tmp_path):
    assert run("query", "--db", vehicles_dir)[0] == 1
    assert run("bogus")[0] == 1
    assert run("validate", str(tmp_path / "missing"))[0] == 2
    assert run("query", "--db", vehicles_dir, "--text", "select from R")[0] == 2
    assert run("worlds", "--db", vehicles_dir, "--limit", "4")[0] == 3
