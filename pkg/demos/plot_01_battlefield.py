"""
Possible answers on the vehicle map
===================================

Four vehicles are on a map.  We are unsure which of b and c sits at which
position, what kind of vehicle d is and whose side d is on.  Three
variables x, y, z encode that doubt, giving eight worlds.
"""

import urel
from urel import fixtures
from urel.query import explain, plan_query

db = fixtures.vehicles()
print(db.world.domains)

# Each attribute lives in its own partition; a row is guarded by a
# descriptor and exists only in the worlds that extend it.
for part in db.relation("R").partitions:
    print(part.attrs, part.sorted_rows())

# Which positions may hold an enemy tank?
q = urel.parse(fixtures.VEHICLE_QUERY)
print(urel.possible(q, db).sorted_rows())

# The answer U-relation keeps the descriptors, so each answer row says in
# which worlds it holds.
for row in urel.answer_relation(q, db).sorted_rows():
    print(row)

# A self-join asks for pairs of enemy tanks.  The psi filter drops pairs
# whose descriptors disagree, e.g. c at two places at once.
pairs = urel.parse(fixtures.vehicle_pairs_query())
print(urel.possible(pairs, db).sorted_rows())

# The same answers by brute force over all eight worlds.
print(urel.poss_oracle(pairs, db).sorted_rows())

print(explain(plan_query(pairs, db), db))
