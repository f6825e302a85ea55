"""
Pushing selections below merges
===============================

A naive plan rebuilds a relation from its partitions first and filters
afterwards.  The optimizer applies rewrite rules, scoring plans by
estimated intermediate sizes, and moves the filter onto the one partition
it reads.
"""

from urel import parse
from urel.model import WorldTable, make_database, make_partition
from urel.query import explain, optimize, plan_query

w = WorldTable({"x": (1, 2)})
odate = make_partition("Ord", ["date"], [(None, i, (2000 + i,)) for i in range(1, 7)])
ocust = make_partition("Ord", ["custkey"], [(None, i, (i % 3,)) for i in range(1, 7)])
cname = make_partition("Cust", ["name"], [(None, 0, ("Al",)), ({"x": 1}, 1, ("Bo",)), ({"x": 2}, 1, ("Al",))])
ckey = make_partition("Cust", ["custkey"], [(None, i, (i,)) for i in range(2)])
db = make_database(w, {"Ord": (["date", "custkey"], [odate, ocust]),
                       "Cust": (["name", "custkey"], [cname, ckey])}, reduced=True)

q = parse("select o.date from Cust c, Ord o where c.name = 'Al' and c.custkey = o.custkey and o.date > 2003")

naive = plan_query(q, db, optimize=False)
print(explain(naive, db))
print()

trace = []
better = optimize(naive, db, trace=trace)
print(explain(better, db))
print(trace)
