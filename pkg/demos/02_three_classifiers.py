#!/usr/bin/env python3
"""The three periodicity deciders, side by side.

A rational direction is periodic (every orbit closes) or drift-periodic
(orbits repeat under a nonzero even translation).  Three independent
methods must always agree:

  oracle  exact tracing in the 3D embedding,
  x       zero displacement cocycle on the 12-square quotient,
  y       single cylinder + zero marked-curve intersection on the 4-square
          quotient.
"""

from math import gcd

from mucube import classify_all, classify_oracle, classify_x, classify_y

samples = [(1, 0), (0, 1), (4, 1), (1, 4), (1, 2), (5, 2), (3, 1), (18, 13), (12, 5)]

print(f"{'direction':>12} {'oracle':>9} {'x':>9} {'y':>9}")
for d in samples:
    rows = [classify_oracle(d).verdict, classify_x(d).verdict, classify_y(d).verdict]
    print(f"{str(d):>12} {rows[0]:>9} {rows[1]:>9} {rows[2]:>9}")

print()
print("sweep: all primitive directions up to 12, checking unanimity ...")
count = {"periodic": 0, "drift": 0}
for p in range(1, 13):
    for q in range(0, 13):
        if gcd(p, q) != 1:
            continue
        c = classify_all((p, q))  # raises MethodDisagreement on any mismatch
        count[c.verdict] += 1
print("verdicts:", count)

print()
print("a drift certificate and its vector:")
c = classify_all((5, 2))
print("(5,2) ->", c.verdict, " drift vector:", c.certificate["drift_vector"])
print()
print("a periodic certificate:")
c = classify_all((4, 1))
print("(4,1) ->", c.verdict)
print("  core multiplier:", c.certificate["core_multiplier"])
print("  order-4 motion:", c.certificate["order4_motion"])
