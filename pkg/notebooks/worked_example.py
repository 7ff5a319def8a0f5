"""
A maximal covering for n = 6
============================

Walks through one covering of 1..omega(6) by the odd primes up to 13,
its textual forms and the offset it reconstructs.
"""

from __future__ import annotations

from jacobsthal.enumeration import SequenceRecord, records_from_outcome, reverse_record
from jacobsthal.primes import h_from_omega, primes_up_to_index
from jacobsthal.search_greedy import gpa

primes = primes_up_to_index(6)
print("primes:", primes.primes)

# the greedy search returns omega and every maximal remainder tuple
out = gpa(primes)
print("omega(6) =", out.omega, " h(6) =", h_from_omega(out.omega, 6).h, " sequences:", out.n_seq)

for rec in records_from_outcome(out):
    print("remainders  ", rec.line("remainders"))
    print("moduli      ", rec.line("moduli"))
    print("permutation ", rec.line("permutations"))

# one record in detail: which prime covers each position of 1..10
rec = SequenceRecord.from_remainders((1, 3, 2, 5, 6), primes)
for pos, p in enumerate(rec.moduli, start=1):
    print(f"  {pos:2d} covered by {p}")

# a + j is divisible by the prime covering position j
a = rec.offset()
print("offset a =", a)
for j, p in enumerate(rec.moduli, start=1):
    assert (a + j) % p == 0
    print(f"  {a + j} = {p} * {(a + j) // p}")

# reversing the window gives the other maximal covering
print("reversed:", reverse_record(rec).remainders)
