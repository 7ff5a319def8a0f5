"""Reference searches for omega(n).

* :func:`bsa` enumerates every combination of non-zero remainders.
* :func:`bpa` places the primes, in every order, on the first free position.
* :func:`rpa` is :func:`bpa` restricted to one canonical order per cover: a
  prime is skipped when it would also cover an earlier anchor whose prime is
  larger, since the order with the smaller prime there describes the same
  remainders.

All of them return the complete set of maximal remainder tuples
``(a_2, ..., a_n)`` and serve as oracles for the pruned searches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .coverage import CapacityExhausted, class_mask, first_free, window_mask
from .literature import known_omega
from .primes import PrimeSet

Remainders = Tuple[int, ...]
Pair = Tuple[int, int]  # (prime, anchor position)

BSA_MAX_N = 9
BPA_MAX_N = 10
RPA_MAX_N = 12


class GuardError(ValueError):
    """Requested size is outside an algorithm's feasibility guard."""


@dataclass
class SearchOutcome:
    n: int
    omega: Optional[int]
    sequences: Set[Remainders] = field(default_factory=set)
    visited: int = 0
    algorithm: str = ""

    @property
    def n_seq(self) -> int:
        return len(self.sequences)

    def sorted_sequences(self) -> List[Remainders]:
        return sorted(self.sequences)

    def same_result(self, other: "SearchOutcome") -> bool:
        return self.omega == other.omega and self.sequences == other.sequences


def merge_outcomes(outcomes: Iterable[SearchOutcome], n: int, algorithm: str = "") -> SearchOutcome:
    """Order-independent merge: global maximum and the union of its witnesses."""
    omega: Optional[int] = None
    seqs: Set[Remainders] = set()
    visited = 0
    for o in outcomes:
        visited += o.visited
        if o.omega is None or not o.sequences:
            continue
        if omega is None or o.omega > omega:
            omega, seqs = o.omega, set(o.sequences)
        elif o.omega == omega:
            seqs |= o.sequences
    return SearchOutcome(n, omega, seqs, visited, algorithm)


@dataclass
class PermutationState:
    """Primes placed so far with their anchors, and the primes still unused."""

    pi: List[int]
    q: List[int]
    remaining: List[int]

    def check(self, odd: Sequence[int]) -> None:
        if any(a >= b for a, b in zip(self.q, self.q[1:])):
            raise ValueError("anchors must be strictly increasing")
        if self.q and self.q[0] != 1:
            raise ValueError("the first anchor must be 1")
        if any(q % p == 0 for p, q in zip(self.pi, self.q)):
            raise ValueError("a prime may not be anchored on one of its multiples")
        if sorted(self.pi + self.remaining) != sorted(odd) or len(set(self.pi)) != len(self.pi):
            raise ValueError("pi and remaining must partition the odd primes")


def default_capacity(primes: PrimeSet) -> int:
    n = primes.n
    guess = known_omega(n)
    if guess is None:
        guess = int(4 * n * math.log(max(n, 2)))
    return guess + 16 + primes.largest


def default_m0(n: int) -> int:
    """Seed for the tentative length: omega(n-1) + 1 when published, else 1."""
    prev = known_omega(n - 1)
    return prev + 1 if prev is not None else 1


def replay_remainders(remainders: Sequence[int], odd: Sequence[int], length: int) -> int:
    bits = 0
    for a, p in zip(remainders, odd):
        bits |= class_mask(p, a, length)
    return bits


def cover_length(remainders: Sequence[int], odd: Sequence[int], length: Optional[int] = None) -> int:
    """Length m of the cover 1..m produced by a full remainder tuple."""
    length = length or (sum(odd) * 2 + 8)
    while True:
        f = first_free(replay_remainders(remainders, odd, length))
        if f <= length:
            return f - 1
        length *= 2


class _SearchBase:
    """Shared state: masks, the adaptive target length and the witness set."""

    name = "base"

    def __init__(self, primes: PrimeSet, *, m0: int = 1, capacity: Optional[int] = None):
        if primes.n < 2:
            raise ValueError("omega(n) needs n >= 2")
        self.primes = primes
        self.odd: Tuple[int, ...] = primes.odd
        self.nodd = len(self.odd)
        self.m = max(1, m0)
        self.m0 = self.m
        # windows reach up to m, so the arrays must hold more than the seed
        self.capacity = max(capacity or default_capacity(primes), self.m + 1)
        self.best: Set[Remainders] = set()
        self.visited = 0
        self._split: int = -1
        self._sink: list = []
        L = self.capacity
        self.masks: List[List[int]] = [[class_mask(p, r, L) for r in range(p)] for p in self.odd]
        self.mask_of: Dict[int, List[int]] = dict(zip(self.odd, self.masks))

    def reset(self, m0: int) -> None:
        """Forget results so the engine can run another subtree."""
        self.m = self.m0 = max(1, m0)
        self.best = set()
        self.visited = 0

    def _offer(self, length: int, rem: Remainders) -> None:
        if length > self.m:
            self.m = length
            self.best = {rem}
        elif length == self.m:
            self.best.add(rem)

    def _free(self, bits: int) -> int:
        f = first_free(bits)
        if f > self.capacity:
            raise CapacityExhausted(f"capacity {self.capacity} exhausted")
        return f

    def outcome(self) -> SearchOutcome:
        omega = self.m if self.best else None
        return SearchOutcome(self.primes.n, omega, set(self.best), self.visited, self.name)

    def psi_at(self, bits: int, m: int) -> int:
        return (bits & window_mask(min(m, self.capacity))).bit_count()

    # subclasses implement run(), prefixes(depth) and run_prefix(prefix)


class _Sequential(_SearchBase):
    """Remainder enumeration prime by prime (the skeleton of BSA and DSA)."""

    name = "bsa"

    def _discard(self, bits: int, next_level: int) -> bool:
        return False

    def _checks_at(self, level: int) -> bool:
        return False

    def run(self) -> SearchOutcome:
        self._descend(0, 0, ())
        return self.outcome()

    def prefixes(self, depth: int) -> List[Tuple[Remainders, int]]:
        """Surviving nodes after the first ``depth`` primes are assigned."""
        if not 1 <= depth < self.nodd:
            raise ValueError(f"split depth must be in 1..{self.nodd - 1}")
        self._split, self._sink = depth, []
        try:
            self._descend(0, 0, ())
        finally:
            self._split = -1
        return self._sink

    def run_prefix(self, prefix: Remainders) -> SearchOutcome:
        bits = replay_remainders(prefix, self.odd, self.capacity)
        self._descend(bits, len(prefix), tuple(prefix))
        return self.outcome()

    def _descend(self, bits: int, level: int, prefix: Remainders) -> None:
        if level == self._split:
            self._sink.append((prefix, bits))
            return
        if level == self.nodd - 1:
            self._leaf(bits, prefix)
            return
        masks = self.masks[level]
        check = self._checks_at(level)
        discard = self._discard
        for r in range(1, self.odd[level]):
            b = bits | masks[r]
            if check and discard(b, level + 1):
                continue
            self._descend(b, level + 1, prefix + (r,))

    def _leaf(self, bits: int, prefix: Remainders) -> None:
        # Every residue of the last prime is a leaf; only the class of the
        # first free position can push the cover further.
        p = self.odd[-1]
        f1 = self._free(bits)
        self.visited += p - 1
        r0 = f1 % p
        if r0:
            g = self._free(bits | self.masks[-1][r0])
            if g - 1 >= self.m:
                self._offer(g - 1, prefix + (r0,))
        if f1 - 1 >= self.m:
            for r in range(1, p):
                if r != r0:
                    self._offer(f1 - 1, prefix + (r,))


class _Permutation(_SearchBase):
    """Left-to-right placement of primes on the first free position."""

    name = "bpa"
    reduced = False

    def _discard_perm(self, bits: int, pending: Sequence[int]) -> bool:
        return False

    def run(self) -> SearchOutcome:
        self._perm(0, list(self.odd), 0, 1, (), ())
        return self.outcome()

    def prefixes(self, depth: int) -> List[Tuple[Tuple[Pair, ...], int]]:
        if not 1 <= depth < self.nodd:
            raise ValueError(f"split depth must be in 1..{self.nodd - 1}")
        self._split, self._sink = depth, []
        try:
            self._perm(0, list(self.odd), 0, 1, (), ())
        finally:
            self._split = -1
        return self._sink

    def run_prefix(self, prefix: Sequence[Pair]) -> SearchOutcome:
        bits = 0
        placed = []
        for p, q in prefix:
            bits |= self.mask_of[p][q % p]
            placed.append(p)
        plist = placed + [p for p in self.odd if p not in placed]
        q = self._free(bits)
        self._perm(bits, plist, len(prefix), q, tuple(map(tuple, prefix)), ())
        return self.outcome()

    def _remainders(self, pairs: Sequence[Pair], seq: Remainders) -> Remainders:
        by_prime = {p: q % p for p, q in pairs}
        return seq + tuple(by_prime[p] for p in self.odd[len(seq):])

    def _perm(
        self,
        bits: int,
        plist: List[int],
        k: int,
        q: int,
        pairs: Tuple[Pair, ...],
        seq: Remainders,
    ) -> None:
        if k == self._split:
            self._sink.append((pairs, bits))
            return
        last = k == len(plist) - 1
        reduced = self.reduced
        for i in range(k, len(plist)):
            p = plist[i]
            r = q % p
            if r == 0:
                continue
            if reduced and any(pj > p and (qj - q) % p == 0 for pj, qj in pairs):
                continue
            b = bits | self.mask_of[p][r]
            if last:
                self.visited += 1
                f = self._free(b)
                if f - 1 >= self.m:
                    self._offer(f - 1, self._remainders(pairs + ((p, q),), seq))
                continue
            pl = plist.copy()
            pl[k], pl[i] = pl[i], pl[k]
            if self._discard_perm(b, pl[k + 1 :]):
                continue
            self._perm(b, pl, k + 1, self._free(b), pairs + ((p, q),), seq)


class _Reduced(_Permutation):
    name = "rpa"
    reduced = True


def run_with_capacity(factory: Callable[[int], _SearchBase], capacity: int, action):
    """Run ``action(search)`` and regrow the arrays when positions run out."""
    while True:
        search = factory(capacity)
        try:
            return action(search)
        except CapacityExhausted:
            capacity *= 2


def _guard(primes: PrimeSet, limit: int, name: str, cost: str, enforce: bool) -> None:
    if primes.n < 2:
        raise GuardError("omega(n) is only defined for n >= 2 (h(1) = 2)")
    if enforce and primes.n > limit:
        raise GuardError(f"{name} is limited to n <= {limit}: {cost}")


def n_bsa(primes: PrimeSet) -> int:
    return math.prod(p - 1 for p in primes.odd)


def bsa(primes: PrimeSet, *, guard: bool = True) -> SearchOutcome:
    """Basic sequential search over all remainder combinations."""
    _guard(primes, BSA_MAX_N, "bsa", f"N_BSA = prod(p_i - 1) = {n_bsa(primes)} leaves", guard)
    return run_with_capacity(
        lambda L: _Sequential(primes, capacity=L), default_capacity(primes), lambda s: s.run()
    )


def bpa(primes: PrimeSet, *, guard: bool = True) -> SearchOutcome:
    """Basic permutation search; duplicates are merged by remainder tuple."""
    _guard(primes, BPA_MAX_N, "bpa", f"N_BPA <= (n-1)! = {math.factorial(primes.n - 1)}", guard)
    return run_with_capacity(
        lambda L: _Permutation(primes, capacity=L), default_capacity(primes), lambda s: s.run()
    )


def rpa(primes: PrimeSet, *, guard: bool = True) -> SearchOutcome:
    """Permutation search restricted to one canonical order per cover."""
    _guard(primes, RPA_MAX_N, "rpa", "the reduced permutation tree still grows factorially", guard)
    return run_with_capacity(
        lambda L: _Reduced(primes, capacity=L), default_capacity(primes), lambda s: s.run()
    )
