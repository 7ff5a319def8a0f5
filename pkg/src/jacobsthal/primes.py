"""Prime bookkeeping and the identities linking j, j*, h, h* and omega."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

MAX_INDEX = 54  # p_54 = 251


@dataclass(frozen=True)
class PrimeSet:
    """The first ``n`` primes, ``primes[0] == 2``.

    Indices follow the usual convention p_1 = 2, p_2 = 3, ... so
    ``prime_at(i)`` is 1-based. Searches only use :attr:`odd`.
    """

    n: int
    primes: Tuple[int, ...]
    _index: Dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.primes) != self.n:
            raise ValueError("length of primes must equal n")
        object.__setattr__(
            self, "_index", {p: i + 1 for i, p in enumerate(self.primes)}
        )

    @property
    def odd(self) -> Tuple[int, ...]:
        """p_2, ..., p_n."""
        return self.primes[1:]

    @property
    def largest(self) -> int:
        return self.primes[-1]

    def prime_at(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise IndexError(f"prime index {i} outside 1..{self.n}")
        return self.primes[i - 1]

    def index_of(self, p: int) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise ValueError(f"{p} is not among the first {self.n} primes") from None

    def __len__(self) -> int:
        return self.n


def _sieve(limit: int) -> list[int]:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    return np.flatnonzero(flags).tolist()


def primes_up_to_index(n: int, *, allow_large: bool = False) -> PrimeSet:
    """First ``n`` primes. ``n > 54`` needs ``allow_large=True``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_INDEX and not allow_large:
        raise ValueError(
            f"n={n} exceeds the supported range n <= {MAX_INDEX} (p_54 = 251); "
            "pass allow_large=True to override"
        )
    # p_n < n (ln n + ln ln n) for n >= 6
    limit = 15 if n < 6 else int(n * (math.log(n) + math.log(math.log(n)))) + 1
    return PrimeSet(n, tuple(_sieve(limit)[:n]))


@dataclass(frozen=True)
class JacobsthalValues:
    n: int
    omega: Optional[int]
    h: int
    h_star: int


def h_from_omega(omega: int, n: int) -> JacobsthalValues:
    """h(n) = 2*omega(n) + 2 for n > 1."""
    if n <= 1:
        raise ValueError("omega is undefined for n <= 1; use h(1) = 2")
    if omega < 1:
        raise ValueError("omega must be >= 1")
    h = 2 * omega + 2
    return JacobsthalValues(n=n, omega=omega, h=h, h_star=h - 1)


def h_one() -> JacobsthalValues:
    """The special case n = 1: h(1) = j(2) = 2."""
    return JacobsthalValues(n=1, omega=None, h=2, h_star=1)


def j_even_doubling(j_odd: int) -> int:
    """j(2m) from j(m) for odd m."""
    return 2 * j_odd


def primorial(n: int) -> int:
    return math.prod(primes_up_to_index(n, allow_large=True).primes)


def jacobsthal_j(m: int) -> int:
    """Direct evaluation of j(m): largest gap between integers coprime to m.

    Scans one full period; intended for small ``m`` only (cross-checks).
    """
    if m < 1:
        raise ValueError("m must be positive")
    if m == 1:
        return 1
    k = np.arange(1, 2 * m + 1, dtype=np.int64)
    coprime = np.flatnonzero(np.gcd(k, m) == 1) + 1
    return int(np.diff(coprime).max())


def h_bruteforce(n: int) -> int:
    """h(n) = j(p_n#) straight from the definition; feasible for n <= 8."""
    return jacobsthal_j(primorial(n))
