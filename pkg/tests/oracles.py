"""Naive reference implementations used as independent oracles.

Nothing here imports from the package: every value is recomputed from the
definitions with plain loops, so agreement is a genuine cross-check.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import List, Sequence, Set, Tuple


def trial_primes(count: int) -> List[int]:
    out = []
    k = 2
    while len(out) < count:
        if all(k % d for d in range(2, math.isqrt(k) + 1)):
            out.append(k)
        k += 1
    return out


def cover_run(remainders: Sequence[int], odd: Sequence[int]) -> int:
    """Largest m with every q in 1..m in some class q = a (mod p)."""
    q = 1
    while any(q % p == a for a, p in zip(remainders, odd)):
        q += 1
    return q - 1


@lru_cache(maxsize=None)
def brute_omega(n: int) -> Tuple[int, frozenset]:
    """(omega, set of maximal remainder tuples) by trying every tuple."""
    odd = trial_primes(n)[1:]
    best, seqs = 0, set()
    for rem in itertools.product(*(range(1, p) for p in odd)):
        m = cover_run(rem, odd)
        if m > best:
            best, seqs = m, {rem}
        elif m == best:
            seqs.add(rem)
    return best, frozenset(seqs)


def longest_noncoprime_run(n: int) -> int:
    """Longest run of consecutive integers sharing a factor with p_n# (one period scan)."""
    ps = trial_primes(n)
    period = math.prod(ps)
    best = run = 0
    for x in range(1, 2 * period + 1):
        if any(x % p == 0 for p in ps):
            run += 1
            best = max(best, run)
        else:
            run = 0
    return best


def naive_psi_min(m: int, k: int) -> int:
    """Fewest multiples of p_2..p_k among m consecutive integers."""
    odd = trial_primes(k)[1:k]
    if not odd:
        return 0
    period = math.prod(odd)
    return min(
        sum(1 for x in range(a + 1, a + m + 1) if any(x % p == 0 for p in odd))
        for a in range(period)
    )


def reversal(rem: Sequence[int], m: int, odd: Sequence[int]) -> Tuple[int, ...]:
    return tuple((m + 1 - a) % p for a, p in zip(rem, odd))


def class_positions(p: int, r: int, length: int) -> Set[int]:
    return {q for q in range(1, length + 1) if q % p == r % p}
