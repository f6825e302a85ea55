"""
Linear answers, exponential normal form
=======================================

In the chain database, variable c_i sets both the A value of tuple i and
the B value of tuple i+1.  The self-matching join A = B has only 2n rows,
but its descriptors link all n variables, so the normalized form needs a
single component with 2**n values.
"""

import time

import urel
from urel import fixtures
from urel.normalize import normalize

for n in (4, 6, 8, 10):
    db = fixtures.chain(n)
    t = time.perf_counter()
    u = urel.answer_relation(fixtures.CHAIN_QUERY, db)
    norm = normalize(fixtures.single_partition(u, db.world, reduced=True))
    (dom,) = norm.world.domains.values()
    print(f"n={n:2d}  join rows={len(u.rows):3d}  fused values={len(dom):5d}  "
          f"normalized rows={norm.total_rows():5d}  {time.perf_counter() - t:.3f} s")
