"""Positional coverage of 1..L by non-zero residue classes.

Positions are stored in a Python ``int`` used as a bitset: bit ``q - 1`` is
set when position ``q`` is covered. The search modules work on the raw
integers; :class:`CoverageArray` is the value-type wrapper used by the public
API.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Tuple

from .primes import PrimeSet


class CapacityExhausted(RuntimeError):
    """All positions 1..L are covered; the caller must grow L and retry."""


@lru_cache(maxsize=4096)
def class_mask(p: int, r: int, length: int) -> int:
    """Bits of positions q in 1..length with q = r (mod p)."""
    r %= p
    start = r if r else p
    if start > length:
        return 0
    block = 1 << (start - 1)
    period = 1
    # double the progression until it spans the range, then truncate
    bits = block
    count = 1 + (length - start) // p
    while period < count:
        bits |= bits << (p * period)
        period *= 2
    return bits & ((1 << length) - 1)


def first_free(bits: int) -> int:
    """Smallest position whose bit is clear."""
    return (~bits & (bits + 1)).bit_length()


def window_mask(m: int) -> int:
    return (1 << m) - 1


def reduced_window_bits(bits: int, m: int) -> Tuple[int, int]:
    """(m*, psi*) of the positions 1..m; (0, 0) if nothing is uncovered."""
    u = ~bits & ((1 << m) - 1)
    if not u:
        return 0, 0
    first = (u & -u).bit_length()
    mstar = u.bit_length() - first + 1
    return mstar, mstar - u.bit_count()


@dataclass(frozen=True)
class CoverageArray:
    """Covered/uncovered marks for positions 1..length."""

    length: int
    marks: int = 0

    @classmethod
    def empty(cls, length: int) -> "CoverageArray":
        if length < 1:
            raise ValueError("length must be positive")
        return cls(length, 0)

    @classmethod
    def from_positions(cls, length: int, positions) -> "CoverageArray":
        bits = 0
        for q in positions:
            if not 1 <= q <= length:
                raise ValueError(f"position {q} outside 1..{length}")
            bits |= 1 << (q - 1)
        return cls(length, bits)

    def is_covered(self, q: int) -> bool:
        return bool(self.marks >> (q - 1) & 1)

    def covered_positions(self) -> List[int]:
        return [q for q in range(1, self.length + 1) if self.marks >> (q - 1) & 1]

    def uncovered_positions(self, m: Optional[int] = None) -> List[int]:
        m = self.length if m is None else m
        return [q for q in range(1, m + 1) if not self.marks >> (q - 1) & 1]

    def grown(self, length: int) -> "CoverageArray":
        if length < self.length:
            raise ValueError("capacity can only grow")
        return CoverageArray(length, self.marks)

    def __iter__(self) -> Iterator[bool]:
        for q in range(1, self.length + 1):
            yield bool(self.marks >> (q - 1) & 1)


def fill_array(arr: CoverageArray, r: int, p: int) -> CoverageArray:
    """Copy of ``arr`` with every q = r (mod p) in 1..L marked."""
    if r % p == 0:
        raise ValueError(f"residue {r} is zero modulo {p}; zero classes are never admissible")
    return CoverageArray(arr.length, arr.marks | class_mask(p, r, arr.length))


def next_free_position(arr: CoverageArray) -> int:
    q = first_free(arr.marks)
    if q > arr.length:
        raise CapacityExhausted(f"positions 1..{arr.length} are all covered")
    return q


def psi(arr: CoverageArray, m: int) -> int:
    """Number of covered positions in 1..m."""
    if m > arr.length:
        raise ValueError(f"m={m} exceeds array length {arr.length}")
    return (arr.marks & window_mask(m)).bit_count()


def nu_increments(arr: CoverageArray, fills, m: int) -> List[int]:
    """Per-fill newly covered counts in 1..m for a sequence of (r, p) fills."""
    out = []
    cur = arr
    for r, p in fills:
        nxt = fill_array(cur, r, p)
        out.append(psi(nxt, m) - psi(cur, m))
        cur = nxt
    return out


def reduced_window(arr: CoverageArray, m: int) -> Tuple[int, int]:
    """Span from the first to the last uncovered position in 1..m.

    Returns ``(m_star, psi_star)``: the span length and the covered count
    inside it, or ``(0, 0)`` when 1..m is fully covered.
    """
    if m > arr.length:
        raise ValueError(f"m={m} exceeds array length {arr.length}")
    return reduced_window_bits(arr.marks, m)


@dataclass
class ResidueAssignment:
    """Non-zero remainders a_i, keyed by prime index i in 2..n."""

    n: int
    remainders: Dict[int, int] = field(default_factory=dict)
    offset: Optional[int] = None

    def __post_init__(self) -> None:
        for i, a in self.remainders.items():
            if not 2 <= i <= self.n:
                raise ValueError(f"prime index {i} outside 2..{self.n}")
            if a < 1:
                raise ValueError(f"remainder for index {i} must be >= 1")

    @classmethod
    def from_tuple(cls, remainders, n: Optional[int] = None) -> "ResidueAssignment":
        rem = tuple(remainders)
        n = len(rem) + 1 if n is None else n
        return cls(n, {i + 2: a for i, a in enumerate(rem)})

    def as_tuple(self) -> Tuple[int, ...]:
        return tuple(self.remainders[i] for i in range(2, self.n + 1))

    def validate(self, primes: PrimeSet) -> None:
        for i, a in self.remainders.items():
            p = primes.prime_at(i)
            if not 1 <= a <= p - 1:
                raise ValueError(f"remainder {a} for p={p} outside 1..{p - 1}")
        if self.offset is not None:
            for i, a in self.remainders.items():
                p = primes.prime_at(i)
                if (self.offset + a) % p:
                    raise ValueError(f"offset {self.offset} inconsistent with a_{i}={a}")

    def coverage(self, primes: PrimeSet, length: int) -> CoverageArray:
        arr = CoverageArray.empty(length)
        for i, a in sorted(self.remainders.items()):
            arr = fill_array(arr, a, primes.prime_at(i))
        return arr


def crt(residues, moduli) -> Tuple[int, int]:
    """Smallest non-negative x with x = residues[i] (mod moduli[i]), pairwise coprime moduli."""
    x, mod = 0, 1
    for r, p in zip(residues, moduli):
        # x + mod*t = r (mod p)
        t = ((r - x) * pow(mod, -1, p)) % p
        x += mod * t
        mod *= p
    return x % mod, mod


def reconstruct_offset(ra: ResidueAssignment, primes: PrimeSet) -> int:
    """Smallest a >= 0 with a = -a_i (mod p_i) for every i in 2..n."""
    missing = [i for i in range(2, ra.n + 1) if i not in ra.remainders]
    if missing:
        raise ValueError(f"remainders missing for prime indices {missing}")
    ra.validate(primes)
    idx = range(2, ra.n + 1)
    a, _ = crt(
        [-ra.remainders[i] for i in idx], [primes.prime_at(i) for i in idx]
    )
    return a
