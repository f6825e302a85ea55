"""
Reduction and normalization
===========================

Reduction throws away rows that never complete into a full tuple.
Normalization merges variables that occur together in a descriptor into
one component variable, so that every descriptor has size one.
"""

from urel import fixtures
from urel.engine import reduce
from urel.normalize import ComponentGraph, normalize
from urel.oracle import world_set
from urel.storage import urelation_tsv, world_tsv

# a2 needs c2=1 but tuple t2 has no B value at all; b2 needs c1=2 but the
# only A value of t1 needs c1=1.  Both rows dangle.
db = fixtures.dangling()
red = reduce(db)
print(db.total_rows(), "->", red.total_rows())
print(world_set(db) == world_set(red))

# c1 and c2 appear together in one descriptor, c3 stays apart.
db = fixtures.fusion()
rows = [d for part in db.relation("U").partitions for d, _, _ in part.rows]
print(ComponentGraph(db.world.variables, rows).components)

out = normalize(db)
print(urelation_tsv(out.relation("U").partitions[0]))
print(world_tsv(out.world))
print(world_set(out) == world_set(db))
