"""Greedy permutation search driven by exact residue-class frequencies.

For every pending prime and every non-zero residue class, the search keeps
the number of still uncovered window positions the class would hit. A node
is abandoned when the per-prime maxima cannot add up to the number of gaps.
Otherwise the (prime, residue) pair with the largest count is tried first;
after its subtree is done the pair is blocked for the rest of the node and
for every subtree entered afterwards, and the next best pair is tried, until
no unblocked pair hits a gap.

The window is 1..m for the current tentative length m. Once a node covers
it completely while primes remain, the first free position becomes the
window to cover next.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from .bounds import PsiMinTable, default_table
from .coverage import CapacityExhausted, CoverageArray
from .primes import PrimeSet
from .search_basic import (
    SearchOutcome,
    _Sequential,
    default_capacity,
    replay_remainders,
    run_with_capacity,
)
from .search_discarding import DsaConfig

log = logging.getLogger(__name__)


@dataclass
class FrequencyTable:
    """Per pending prime, counts of uncovered positions by residue class.

    ``counts[p][r]`` is the number of uncovered q in 1..m with q = r (mod p);
    index 0 holds the multiples of p, which no admissible class can reach.
    """

    counts: Dict[int, List[int]]
    uncovered: int
    blocked: Set[Tuple[int, int]] = field(default_factory=set)

    def rho(self, p: int, r: int) -> int:
        if r % p == 0 or (p, r) in self.blocked:
            return 0
        return self.counts[p][r]

    def rho_max(self, p: int) -> int:
        return max((self.rho(p, r) for r in range(1, p)), default=0)

    def block(self, p: int, r: int) -> None:
        self.blocked.add((p, r))

    def best_pair(self) -> Optional[Tuple[int, int, int]]:
        """(prime, residue, count) with the largest count; smallest prime, then residue, on ties."""
        best = None
        for p in sorted(self.counts):
            for r in range(1, p):
                c = self.rho(p, r)
                if c and (best is None or c > best[2]):
                    best = (p, r, c)
        return best


def build_frequency_table(arr: CoverageArray, m: int, pending: Sequence[int]) -> FrequencyTable:
    if m > arr.length:
        raise ValueError(f"m={m} exceeds array length {arr.length}")
    gaps = arr.uncovered_positions(m)
    counts = {}
    for p in pending:
        c = [0] * p
        for q in gaps:
            c[q % p] += 1
        counts[p] = c
    return FrequencyTable(counts, len(gaps))


def criterion5_discard(ftab: FrequencyTable, uncovered: Optional[int] = None) -> bool:
    """True when the best classes of all pending primes cannot close every gap."""
    uncovered = ftab.uncovered if uncovered is None else uncovered
    return sum(ftab.rho_max(p) for p in ftab.counts) < uncovered


def _positions(x: int) -> List[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length())
        x ^= low
    return out


class _Greedy(_Sequential):
    name = "gpa"

    def __init__(
        self,
        primes: PrimeSet,
        cfg: DsaConfig,
        *,
        capacity: Optional[int] = None,
        check_tables: bool = False,
        record_steps: bool = False,
    ):
        super().__init__(primes, m0=cfg.m0, capacity=capacity)
        self.cfg = cfg
        self.s = cfg.k_star - 2  # odd primes handled sequentially
        gp = self.odd[self.s :]
        self.gp = gp
        self.off = np.cumsum([0] + list(gp[:-1])).astype(np.intp)
        T = int(sum(gp))
        L = self.capacity
        slot_prime = np.repeat(np.arange(len(gp)), gp)
        slot_res = np.concatenate([np.arange(p) for p in gp])
        self.slot_prime = slot_prime.tolist()
        self.slot_res = slot_res.tolist()
        self.spans = [(int(o), int(o) + p) for o, p in zip(self.off, gp)]
        q = np.arange(L + 2)
        rows = np.zeros((L + 2, T), dtype=np.int32)
        for j, p in enumerate(gp):
            rows[q, self.off[j] + q % p] = 1
        rows[0] = 0
        self.rows = rows
        self.base_avail = slot_res != 0
        self.check_tables = check_tables
        self.record_steps = record_steps
        self.steps: List[Tuple[int, ...]] = []

    def reset(self, m0: int) -> None:
        super().reset(m0)
        self.steps = []

    def _descend(self, bits, level, prefix):
        if level == self.s and level != self._split:
            self._greedy(bits, self.base_avail.copy(), None, 0, 0, (), (), prefix)
            return
        super()._descend(bits, level, prefix)

    def prefixes(self, depth: int):
        if depth > self.s:
            raise ValueError(f"gpa can only be split inside its sequential part (depth <= {self.s})")
        return super().prefixes(depth)

    def _counts(self, gaps: int) -> np.ndarray:
        return self.rows[_positions(gaps)].sum(axis=0, dtype=np.int32)

    def _greedy(self, bits, avail, C, W, nplaced, pairs, steps, seq):
        if nplaced == len(self.gp):
            self.visited += 1
            f = self._free(bits)
            if f - 1 >= self.m:
                by_prime = dict(pairs)
                self._offer(f - 1, seq + tuple(by_prime[p] for p in self.gp))
                if self.record_steps and f - 1 == self.m:
                    self.steps.append(steps)
            return
        m = self.m
        u = ~bits & ((1 << m) - 1)
        if u:
            weff = m
        else:
            weff = self._free(bits)
            u = 1 << (weff - 1)
        if C is None or W != weff:
            C = self._counts(u)
        elif self.check_tables:
            assert np.array_equal(C, self._counts(u)), "incremental frequency table drifted"
        n_gaps = u.bit_count()
        ce = C * avail
        criterion = self.cfg.criterion
        if criterion:
            rho = np.maximum.reduceat(ce, self.off)
            total = int(rho.sum())
            if total < n_gaps:
                return
        wmask = (1 << weff) - 1
        while True:
            idx = int(ce.argmax())
            c = int(ce[idx])
            if c == 0:
                return
            j = self.slot_prime[idx]
            p = self.gp[j]
            r = self.slot_res[idx]
            b = bits | self.mask_of[p][r]
            child_avail = avail.copy()
            lo, hi = self.spans[j]
            child_avail[lo:hi] = False
            newly = _positions((b & ~bits) & wmask)
            child_C = C - self.rows[newly].sum(axis=0, dtype=np.int32)
            self._greedy(b, child_avail, child_C, weff, nplaced + 1, pairs + ((p, r),), steps + (c,), seq)
            avail[idx] = False
            ce[idx] = 0
            if criterion:
                new = int(ce[lo:hi].max())
                total += new - int(rho[j])
                rho[j] = new
                if total < n_gaps:
                    return


def _compiled_run(g: _Greedy) -> SearchOutcome:
    """Same traversal as :meth:`_Greedy.run`, greedy part in the numba kernel."""
    from . import _kernels as K

    L = g.capacity
    lo, hi = K.pack_masks(g.masks, L)
    J = len(g.gp)
    gp = np.array(g.gp, dtype=np.int64)
    off = g.off.astype(np.int64)
    q = np.arange(L + 2)
    rowidx = np.stack([off[j] + q % p for j, p in enumerate(g.gp)], axis=1).astype(np.int64)
    base = g.base_avail.astype(np.uint8)
    word = (1 << 64) - 1
    seq_ranges = [range(1, p) for p in g.odd[: g.s]]
    size = 1024
    for prefix in itertools.product(*seq_ranges):
        bits = replay_remainders(prefix, g.odd, L)
        while True:
            buf = np.zeros((size, g.nodd), dtype=np.int64)
            status, m, count, visited = K.gpa_kernel(
                lo[g.s :], hi[g.s :], gp, off, rowidx, base,
                np.array(prefix, dtype=np.int64), np.uint64(bits & word), np.uint64(bits >> 64),
                g.cfg.criterion, g.m, L, buf,
            )
            if status == K.CAPACITY:
                raise CapacityExhausted(f"capacity {L} exhausted")
            if status == K.OK:
                break
            size *= 8
        g.visited += int(visited)
        for row in buf[:count]:
            g._offer(int(m), tuple(int(a) for a in row))
    return g.outcome()


def default_gpa_k_star(primes: PrimeSet) -> int:
    return min(4, primes.n)


def gpa(
    primes: PrimeSet,
    cfg: DsaConfig = DsaConfig(),
    table: Optional[PsiMinTable] = None,
    *,
    backend: str = "python",
    **engine_opts,
) -> SearchOutcome:
    """Greedy permutation search with exact frequency-based discarding.

    ``backend="compiled"`` runs the greedy part as a numba kernel with the
    same traversal, results and visited counts.
    """
    if backend not in ("python", "compiled"):
        raise ValueError("backend must be 'python' or 'compiled'")
    if primes.n < 2:
        raise ValueError("omega(n) needs n >= 2")
    if cfg.k_star is None:
        cfg = replace(cfg, k_star=default_gpa_k_star(primes))
    cfg = cfg.resolved(primes, table or default_table(), "gpa")
    if cfg.k_star > primes.n:
        raise ValueError(f"k_star must be <= n={primes.n} for gpa")
    out = run_with_capacity(
        lambda L: _Greedy(primes, cfg, capacity=L, **engine_opts),
        default_capacity(primes),
        _compiled_run if backend == "compiled" else (lambda s: s.run()),
    )
    if out.omega is None and cfg.m0 > 1:
        log.warning("gpa: no cover of length >= m0=%d; retrying with m0=1", cfg.m0)
        return gpa(primes, replace(cfg, m0=1), table, backend=backend, **engine_opts)
    return out
