"""Remainder enumeration with bound-based discarding, plain and combined.

:func:`dsa` enumerates remainders prime by prime like :func:`~.search_basic.bsa`
but drops a branch as soon as the pending primes provably cannot cover the
gaps left in the tentative window. The tentative length only grows during a
run, so a branch rejected against an earlier, shorter window would also be
rejected against the final one; no branch ever needs revisiting.

:func:`crpdsa` runs the same enumeration for the primes below
``switch_ratio * p_n`` and places the remaining primes on the first free
position in canonical order, applying the same check before every descent.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

import numpy as np

from .bounds import PsiMinTable, bound_profile, default_table
from .coverage import CapacityExhausted
from .primes import PrimeSet
from .search_basic import (
    SearchOutcome,
    _Reduced,
    _Sequential,
    default_capacity,
    default_m0,
    run_with_capacity,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DsaConfig:
    """Tuning of the discarding searches.

    k_star
        Prime index from which the check is applied (after p_{k_star} is
        assigned). ``None`` picks a default per algorithm.
    t
        Deepest psi_min column to use; ``None`` means the whole table.
    m0
        Starting tentative length; ``None`` means omega(n-1) + 1 when that
        value is published, else 1.
    switch_ratio
        Primes below ``switch_ratio * p_n`` are enumerated sequentially in
        :func:`crpdsa`.
    criterion
        ``False`` disables every check (used to verify soundness).
    reduced_window
        Check the span between the first and last gap instead of 1..m.
    """

    k_star: Optional[int] = None
    t: Optional[int] = None
    m0: Optional[int] = None
    switch_ratio: float = 1 / 3
    criterion: bool = True
    reduced_window: bool = True

    def resolved(self, primes: PrimeSet, table: PsiMinTable, algo: str = "dsa") -> "DsaConfig":
        n = primes.n
        k_star = self.k_star
        if k_star is None:
            k_star = default_k_star(primes, algo, self.switch_ratio)
        t = table.max_k if self.t is None else self.t
        m0 = default_m0(n) if self.m0 is None else self.m0
        if k_star < 2:
            raise ValueError("k_star must be >= 2")
        if not 1 <= t <= table.max_k:
            raise ValueError(f"t must be in 1..{table.max_k} (table depth)")
        if m0 < 1:
            raise ValueError("m0 must be >= 1")
        if not 0 < self.switch_ratio <= 1:
            raise ValueError("switch_ratio must be in (0, 1]")
        if algo == "crpdsa":
            s = sequential_count(primes, self.switch_ratio)
            if s and k_star <= n and primes.prime_at(k_star) >= primes.largest * self.switch_ratio:
                raise ValueError(
                    f"crpdsa needs p_k* < {self.switch_ratio:.3g} * p_n; "
                    f"p_{k_star} = {primes.prime_at(k_star)}, p_n = {primes.largest}"
                )
        return replace(self, k_star=k_star, t=t, m0=m0)


def sequential_count(primes: PrimeSet, ratio: float) -> int:
    """Number of odd primes below ``ratio * p_n``."""
    limit = primes.largest * ratio
    return sum(1 for p in primes.odd if p < limit)


def default_k_star(primes: PrimeSet, algo: str, ratio: float = 1 / 3) -> int:
    if algo == "crpdsa":
        return 2
    return min(5, primes.n)


class _Discarding(_Sequential):
    name = "dsa"

    def __init__(
        self,
        primes: PrimeSet,
        cfg: DsaConfig,
        table: PsiMinTable,
        *,
        capacity: Optional[int] = None,
    ):
        super().__init__(primes, m0=cfg.m0, capacity=capacity)
        self.cfg = cfg
        self.table = table
        L = self.capacity
        self._profiles = {}
        # bounds[next_level][w]: summed bound of the pending primes odd[next_level:]
        self.bounds: List[List[int]] = [[] for _ in range(self.nodd)]
        for nxt in range(1, self.nodd):
            t = min(nxt + 1, cfg.t)  # p_2..p_{nxt+1} are placed
            total = sum(self._profile(p, t) for p in self.odd[nxt:])
            self.bounds[nxt] = total.tolist()

    def _profile(self, p: int, t: int):
        key = (p, t)
        if key not in self._profiles:
            self._profiles[key] = bound_profile(p, t, self.table, self.capacity)
        return self._profiles[key]

    def _checks_at(self, level: int) -> bool:
        return self.cfg.criterion and level + 2 >= self.cfg.k_star

    def _gap(self, bits: int):
        u = ~bits & ((1 << self.m) - 1)
        if not u:
            return 0, 0
        if self.cfg.reduced_window:
            w = u.bit_length() - (u & -u).bit_length() + 1
        else:
            w = self.m
        return w, u.bit_count()

    def _discard(self, bits: int, next_level: int) -> bool:
        w, unc = self._gap(bits)
        return unc > 0 and self.bounds[next_level][w] < unc


class _Combined(_Discarding, _Reduced):
    name = "crpdsa"

    def __init__(self, primes, cfg, table, *, capacity=None):
        super().__init__(primes, cfg, table, capacity=capacity)
        self.s = sequential_count(primes, cfg.switch_ratio)
        t = min(self.s + 1, cfg.t)
        self._perm_profiles = {p: self._profile(p, t).tolist() for p in self.odd[self.s :]}

    def prefixes(self, depth: int):
        if depth > self.s:
            raise ValueError(f"crpdsa can only be split inside its sequential part (depth <= {self.s})")
        return super().prefixes(depth)

    def _descend(self, bits, level, prefix):
        if level == self.s and level != self._split:
            self._perm(bits, list(self.odd[self.s :]), 0, self._free(bits), (), prefix)
            return
        super()._descend(bits, level, prefix)

    def _discard_perm(self, bits: int, pending: Sequence[int]) -> bool:
        if not self.cfg.criterion:
            return False
        w, unc = self._gap(bits)
        if not unc:
            return False
        prof = self._perm_profiles
        return sum(prof[p][w] for p in pending) < unc


def _compiled_run(search: _Discarding) -> SearchOutcome:
    from . import _kernels as K

    cfg = search.cfg
    L = search.capacity
    lo, hi = K.pack_masks(search.masks, L)
    odd = np.array(search.odd, dtype=np.int64)
    bounds = np.zeros((search.nodd, L + 1), dtype=np.int64)
    for lvl in range(1, search.nodd):
        bounds[lvl] = search.bounds[lvl]
    check_from = cfg.k_star - 2 if cfg.criterion else search.nodd + 1
    size = 1024
    while True:
        buf = np.zeros((size, search.nodd), dtype=np.int64)
        status, m, count, visited = K.dsa_kernel(
            lo, hi, odd, bounds, check_from, cfg.reduced_window, search.m0, L, buf
        )
        if status == K.CAPACITY:
            raise CapacityExhausted(f"capacity {L} exhausted")
        if status == K.OK:
            break
        size *= 8
    seqs = {tuple(int(a) for a in row) for row in buf[:count]}
    return SearchOutcome(search.primes.n, m if count else None, seqs, int(visited), search.name)


def _run(
    cls, primes: PrimeSet, cfg: DsaConfig, table: Optional[PsiMinTable], algo: str, backend: str = "python"
) -> SearchOutcome:
    table = table or default_table()
    cfg = cfg.resolved(primes, table, algo)
    if primes.n < 2:
        raise ValueError("omega(n) needs n >= 2")
    if backend not in ("python", "compiled"):
        raise ValueError("backend must be 'python' or 'compiled'")
    action = _compiled_run if backend == "compiled" else (lambda s: s.run())
    out = run_with_capacity(lambda L: cls(primes, cfg, table, capacity=L), default_capacity(primes), action)
    if out.omega is None and cfg.m0 > 1:
        log.warning("%s: no cover of length >= m0=%d; retrying with m0=1", algo, cfg.m0)
        return _run(cls, primes, replace(cfg, m0=1), table, algo, backend)
    return out


def dsa(
    primes: PrimeSet,
    cfg: DsaConfig = DsaConfig(),
    table: Optional[PsiMinTable] = None,
    *,
    backend: str = "python",
) -> SearchOutcome:
    """Sequential remainder search with bound-based discarding.

    ``backend="compiled"`` runs the same traversal as a numba kernel; results
    and visited counts are identical.
    """
    return _run(_Discarding, primes, cfg, table, "dsa", backend)


def crpdsa(primes: PrimeSet, cfg: DsaConfig = DsaConfig(), table: Optional[PsiMinTable] = None) -> SearchOutcome:
    """Sequential search for small primes, canonical placement for the rest."""
    return _run(_Combined, primes, cfg, table, "crpdsa")
