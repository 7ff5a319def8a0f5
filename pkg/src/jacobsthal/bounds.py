"""psi_min tables and the bound-based rejection criterion of the discarding search.

``psi_min(m, k)`` is the least number of integers among m consecutive ones
divisible by one of p_2..p_k. With ``r(m, p) = 1 + (m - 1) // p`` it bounds the
positions a pending prime can still newly cover:

    nu(m, k) <= r(m, p_k) - psi_min(r(m, p_k), t)   for any t < k.

A branch whose pending primes cannot cover the remaining gaps under this
bound is discarded.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .primes import PrimeSet, primes_up_to_index

MAX_M_DEFAULT = 500
MAX_K_DEFAULT = 8
ENV_PATH = "JACOBSTHAL_PSIMIN_PATH"
_HEADER = "psi_min v1"


def r_multiples(m: int, p: int) -> int:
    """Upper bound on the multiples of ``p`` among ``m`` consecutive integers."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return 1 + (m - 1) // p


@dataclass(frozen=True)
class PsiMinTable:
    """``values[m, k]`` for 0 <= m <= max_m and 0 <= k <= max_k.

    Row ``m = 0`` and column ``k = 0`` are padding (all zero).
    """

    max_m: int
    max_k: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != (self.max_m + 1, self.max_k + 1):
            raise ValueError("values shape does not match extents")

    def __call__(self, m: int, k: int) -> int:
        """psi_min(m, k), clamped to the table extents.

        Clamping is conservative: ``k`` beyond the table uses the deepest
        column (psi_min grows with k) and ``m`` beyond the table uses the last
        row (psi_min grows with m).
        """
        if m <= 0 or k <= 1:
            return 0
        return int(self.values[min(m, self.max_m), min(k, self.max_k)])

    def column(self, k: int) -> np.ndarray:
        return self.values[:, min(k, self.max_k)]

    def digest(self) -> str:
        import hashlib

        return hashlib.sha256(self.values.astype(np.int32).tobytes()).hexdigest()[:16]

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(dumps_table(self))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "PsiMinTable":
        return loads_table(Path(path).read_text())


def dumps_table(table: PsiMinTable) -> str:
    lines = [f"{_HEADER} max_m={table.max_m} max_k={table.max_k}"]
    for m in range(1, table.max_m + 1):
        lines.append(" ".join(str(int(v)) for v in table.values[m, 1:]))
    return "\n".join(lines) + "\n"


def loads_table(text: str) -> PsiMinTable:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith(_HEADER):
        raise ValueError("not a psi_min v1 table")
    fields = dict(tok.split("=") for tok in lines[0].split()[2:])
    max_m, max_k = int(fields["max_m"]), int(fields["max_k"])
    if len(lines) - 1 != max_m:
        raise ValueError(f"expected {max_m} rows, found {len(lines) - 1}")
    values = np.zeros((max_m + 1, max_k + 1), dtype=np.int32)
    for m, line in enumerate(lines[1:], start=1):
        row = [int(x) for x in line.split()]
        if len(row) != max_k:
            raise ValueError(f"row m={m} has {len(row)} entries, expected {max_k}")
        values[m, 1:] = row
    return PsiMinTable(max_m, max_k, values)


def compute_psi_min(max_m: int, max_k: int, *, allow_large: bool = False) -> PsiMinTable:
    """Exact psi_min(m, k) for m <= max_m, k <= max_k.

    Sweeps every offset a modulo 3*5*...*p_k; for each window length the
    minimum of the covered count over all offsets is taken.
    """
    if max_m < 1 or max_k < 1:
        raise ValueError("extents must be positive")
    if not allow_large and (max_k > MAX_K_DEFAULT or max_m > MAX_M_DEFAULT):
        raise ValueError(
            f"max_k <= {MAX_K_DEFAULT} and max_m <= {MAX_M_DEFAULT} by default "
            "(cost grows with the primorial); pass allow_large=True to override"
        )
    values = np.zeros((max_m + 1, max_k + 1), dtype=np.int32)
    primes = primes_up_to_index(max(max_k, 1), allow_large=True).primes
    covered = None
    for k in range(2, max_k + 1):
        period = math.prod(primes[1:k])
        size = period + max_m + 1
        covered = np.zeros(size, dtype=bool)
        for p in primes[1:k]:
            covered[::p] = True
        cum = np.concatenate(([0], np.cumsum(covered, dtype=np.int32)))
        # psi(a, m) = #covered in a+1..a+m = cum[a+m+1] - cum[a+1]
        base = cum[1 : period + 1]
        for m in range(1, max_m + 1):
            values[m, k] = int((cum[m + 1 : m + 1 + period] - base).min())
    return PsiMinTable(max_m, max_k, values)


@lru_cache(maxsize=None)
def _packaged_table() -> PsiMinTable:
    text = resources.files("jacobsthal").joinpath("data/psi_min.txt").read_text()
    return loads_table(text)


def default_table() -> PsiMinTable:
    """Table from ``$JACOBSTHAL_PSIMIN_PATH`` if set, else the shipped one."""
    path = os.environ.get(ENV_PATH)
    if path:
        return _load_cached(path)
    return _packaged_table()


@lru_cache(maxsize=8)
def _load_cached(path: str) -> PsiMinTable:
    return PsiMinTable.load(path)


def nu_max_bound(
    m: int, k: int, table: PsiMinTable, primes: Optional[PrimeSet] = None
) -> int:
    """Upper bound on positions newly covered by p_k in a window of length m."""
    if k < 2:
        raise ValueError("k must be >= 2")
    primes = primes if primes is not None else primes_up_to_index(k)
    r = r_multiples(m, primes.prime_at(k))
    return r - table(r, min(k - 1, table.max_k))


@dataclass(frozen=True)
class CriterionContext:
    """State of a search node for the bound-based check.

    ``t`` is the psi_min depth (primes p_2..p_t are already placed),
    ``window`` the length of the window to cover (m or m*), ``psi_known`` the
    covered count inside it and ``pending`` the primes still to be placed.
    """

    t: int
    window: int
    psi_known: int
    pending: Sequence[int]


def pending_bound(window: int, pending: Iterable[int], t: int, table: PsiMinTable) -> int:
    total = 0
    for p in pending:
        r = 1 + (window - 1) // p
        total += r - table(r, t)
    return total


def criterion_discard(ctx: CriterionContext, table: PsiMinTable) -> bool:
    """True when the pending primes provably cannot cover the window's gaps."""
    uncovered = ctx.window - ctx.psi_known
    if uncovered <= 0:
        return False
    t = min(ctx.t, table.max_k)
    return pending_bound(ctx.window, ctx.pending, t, table) < uncovered


def bound_profile(p: int, t: int, table: PsiMinTable, max_window: int) -> np.ndarray:
    """``r(w, p) - psi_min(r(w, p), t)`` for every window w in 0..max_window."""
    out = np.zeros(max_window + 1, dtype=np.int64)
    for w in range(1, max_window + 1):
        r = 1 + (w - 1) // p
        out[w] = r - table(r, t)
    return out
