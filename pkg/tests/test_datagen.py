import pytest

from urel.datagen import (
    SCHEMA,
    GenParams,
    dfc_weights,
    domain_size,
    generate,
    row_counts,
    sample_queries,
    sample_query,
    stats,
    zipf_bucket_counts,
)
from urel.engine import is_reduced
from urel.errors import ParameterError
from urel.model import validate
from urel.query.parser import parse
from urel.query.planner import plan_query


def test_zipf_counts():
    assert zipf_bucket_counts(100, 0.5, 3) == [54, 27, 14, 7]
    assert zipf_bucket_counts(10, 1.0, 1) == [5, 5]


def test_domain_size():
    assert domain_size([8, 8], 0.25) == 16
    assert domain_size([3], 0.25) == 3
    assert domain_size([2, 2, 2], 0.1) == 2


def test_dfc_weights_sum_to_one():
    w = dfc_weights(0.5, 4)
    assert abs(w.sum() - 1) < 1e-12 and list(w) == sorted(w, reverse=True)


def test_row_counts():
    assert row_counts(0.001) == {"nation": 25, "supplier": 1, "customer": 1, "orders": 2, "lineitem": 6}
    assert row_counts(1.0)["lineitem"] == 6000


@pytest.mark.parametrize("kwargs", [dict(s=0), dict(x=1.5), dict(z=0), dict(m=1), dict(p=0), dict(k=0), dict(seed=-1)])
def test_parameter_checks(kwargs):
    with pytest.raises(ParameterError):
        GenParams(**kwargs)


def test_generated_database():
    db = generate(GenParams(s=0.002, x=0.2, seed=7))
    assert validate(db) == []
    assert db.reduced and is_reduced(db)
    assert set(db.relations) == set(SCHEMA)
    for name, rel in db.relations.items():
        assert [p.attrs for p in rel.partitions] == [(a,) for a in SCHEMA[name]]
        assert all(len(d) <= 1 for p in rel.partitions for d, _, _ in p.rows)
    st = stats(db)
    assert st.worlds_log10 > 0 and st.max_rng >= 2
    assert sum(st.variables_by_dfc.values()) == len(db.world)
    assert all(1 <= k <= 4 for k in st.variables_by_dfc)


def test_determinism():
    a = generate(GenParams(s=0.002, x=0.1, seed=3))
    b = generate(GenParams(s=0.002, x=0.1, seed=3))
    c = generate(GenParams(s=0.002, x=0.1, seed=4))
    assert a == b
    assert a != c


def test_no_uncertainty():
    st = stats(generate(GenParams(s=0.001, x=0.0)))
    assert st.worlds_log10 == 0 and st.max_rng == 0


def test_sample_queries_plan_on_generated_data():
    db = generate(GenParams())
    assert sorted(sample_queries()) == ["q1.sql", "q2.sql", "q3.sql"]
    for name in ("q1", "q2", "q3"):
        plan_query(parse(sample_query(name)), db)
