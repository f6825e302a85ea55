"""
Certain answers
===============

A tuple is certain when it appears in every world.  The engine reduces
the answer, fuses correlated variables until each descriptor holds one
assignment, then checks whether some variable guards the tuple under all
of its values.
"""

import urel
from urel import fixtures

db = fixtures.vehicles()

for text in (
    "select Faction from R",
    "select Id from R where Faction = 'Friend'",
    "select Id from R where Type = 'Tank' and Faction = 'Enemy'",
):
    got = urel.certain(text, db)
    print(text)
    print("  certain:", got.sorted_rows())
    print("  oracle: ", urel.certain_oracle(text, db).sorted_rows())

# Vehicle c is an enemy tank in every world, but its position depends on x,
# so no single position is certain.
print(urel.possible("select Id from R where Type = 'Tank' and Faction = 'Enemy'", db).sorted_rows())
