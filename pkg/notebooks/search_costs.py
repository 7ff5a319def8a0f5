"""
How the searches scale
======================

Times the exhaustive and pruned searches for growing n and prints a
small table of nodes visited. The slow engines stop where their guard
refuses to run.
"""

from __future__ import annotations

from jacobsthal.bounds import compute_psi_min
from jacobsthal.cli import bench_rows

# psi_min(m, k): the least any k primes can leave uncovered in m slots
table = compute_psi_min(30, 4)
for k in range(2, 5):
    print(f"k={k}", [table(m, k) for m in range(1, 16)])

rows = bench_rows(list(range(2, 12)), ["bsa", "rpa", "dsa", "gpa"], budget=20.0)
print(f"{'n':>3} {'algo':>6} {'visited':>10} {'seconds':>9}")
for r in rows:
    if r["seconds"] == "":
        continue
    print(f"{r['n']:>3} {r['algo']:>6} {r['visited']:>10} {float(r['seconds']):9.3f}")
