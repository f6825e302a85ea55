"""
Generating uncertain order data
===============================

The generator draws a small certain order database, then makes a fraction
x of all fields uncertain.  Fields are grouped onto variables whose field
counts follow Zipf weights, so fields sharing a variable are correlated.
"""

import time

import urel
from urel.datagen import GenParams, domain_size, generate, sample_query, stats, zipf_bucket_counts

print(zipf_bucket_counts(100, 0.5, 3))
print(domain_size([8, 8], 0.25))

db = generate(GenParams(s=0.002, x=0.05, seed=1))
st = stats(db)
print(f"worlds = 10^{st.worlds_log10:.2f}, largest domain {st.max_rng}, rows {st.total_rows}")
print("variables by field count:", st.variables_by_dfc)

q = sample_query("q1")
print(q)
for s in (0.001, 0.002, 0.004):
    db = generate(GenParams(s=s, x=0.01))
    t = time.perf_counter()
    answer = urel.possible(q, db)
    print(f"s={s}: {len(answer)} answers in {1000 * (time.perf_counter() - t):.1f} ms")
