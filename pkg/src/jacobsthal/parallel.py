"""Splitting a search into independent subtrees and running them on a pool.

A search is executed down to a fixed depth only; every surviving node there
becomes a :class:`WorkUnit` holding the prefix that regenerates it. Units are
written to a parameter file, run in any order on any number of processes and
merged into the same outcome as the undivided run.

Each unit starts from the same seed length. Rejections made against a shorter
tentative length stay valid for longer ones, so units never need to exchange
their running maximum; an optional shared cell lets later units start from
the best length seen so far.
"""

from __future__ import annotations

import hashlib
import json
import logging
import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

from .bounds import PsiMinTable, default_table
from .primes import PrimeSet, primes_up_to_index
from .search_basic import (
    BPA_MAX_N,
    BSA_MAX_N,
    RPA_MAX_N,
    GuardError,
    SearchOutcome,
    _Permutation,
    _Reduced,
    _Sequential,
    default_capacity,
    default_m0,
    merge_outcomes,
    run_with_capacity,
)
from .search_discarding import DsaConfig, _Combined, _Discarding, sequential_count
from .search_greedy import _Greedy, default_gpa_k_star

log = logging.getLogger(__name__)

ALGORITHMS = ("bsa", "bpa", "rpa", "dsa", "crpdsa", "gpa")
PERMUTATION_ALGOS = ("bpa", "rpa")
_GUARDS = {"bsa": BSA_MAX_N, "bpa": BPA_MAX_N, "rpa": RPA_MAX_N}
_MAGIC = "# jacobsthal-units"

Prefix = Tuple


@dataclass(frozen=True)
class WorkUnit:
    unit_id: int
    algo: str
    k_star: int
    prefix: Prefix
    psi_at_split: int

    def line(self) -> str:
        if self.algo in PERMUTATION_ALGOS:
            items = [f"{p}:{q}" for p, q in self.prefix]
        else:
            items = [str(a) for a in self.prefix]
        return " ".join([str(self.unit_id), self.algo, str(self.k_star), *items])


@dataclass(frozen=True)
class UnitPlan:
    n: int
    algo: str
    k_star: int
    cfg: DsaConfig
    units: Tuple[WorkUnit, ...]


def resolve_config(primes: PrimeSet, algo: str, cfg: Optional[DsaConfig], table: PsiMinTable) -> DsaConfig:
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")
    cfg = cfg or DsaConfig()
    if algo in ("dsa", "crpdsa"):
        return cfg.resolved(primes, table, algo)
    if algo == "gpa":
        if cfg.k_star is None:
            cfg = replace(cfg, k_star=default_gpa_k_star(primes))
        return cfg.resolved(primes, table, "gpa")
    return replace(cfg, m0=default_m0(primes.n) if cfg.m0 is None else cfg.m0)


def make_engine(primes: PrimeSet, algo: str, cfg: DsaConfig, table: PsiMinTable, capacity: int):
    if algo == "bsa":
        return _Sequential(primes, m0=cfg.m0, capacity=capacity)
    if algo == "bpa":
        return _Permutation(primes, m0=cfg.m0, capacity=capacity)
    if algo == "rpa":
        return _Reduced(primes, m0=cfg.m0, capacity=capacity)
    if algo == "dsa":
        return _Discarding(primes, cfg, table, capacity=capacity)
    if algo == "crpdsa":
        return _Combined(primes, cfg, table, capacity=capacity)
    if algo == "gpa":
        return _Greedy(primes, cfg, capacity=capacity)
    raise ValueError(f"unknown algorithm {algo!r}")


def _check_guard(primes: PrimeSet, algo: str, guard: bool) -> None:
    limit = _GUARDS.get(algo)
    if guard and limit is not None and primes.n > limit:
        raise GuardError(f"{algo} is limited to n <= {limit}")


def check_prefix(primes: PrimeSet, algo: str, prefix: Prefix) -> None:
    """Raise ValueError unless ``prefix`` names a node of ``algo``'s tree."""
    odd = primes.odd
    if algo in PERMUTATION_ALGOS:
        seen = set()
        for item in prefix:
            p, q = item
            if p not in odd or p in seen or q < 1 or q % p == 0:
                raise ValueError(f"bad placement {p}:{q} in unit prefix")
            seen.add(p)
        return
    if len(prefix) >= len(odd):
        raise ValueError("unit prefix is as long as the whole search")
    for a, p in zip(prefix, odd):
        if not 1 <= a <= p - 1:
            raise ValueError(f"remainder {a} outside 1..{p - 1} in unit prefix")


def generate_units(
    primes: PrimeSet,
    algo: str,
    k_star: int,
    cfg: Optional[DsaConfig] = None,
    table: Optional[PsiMinTable] = None,
    *,
    guard: bool = True,
) -> UnitPlan:
    """Run the search down to p_{k_star}; one unit per surviving node.

    Units come sorted by descending covered count in the seed window, ties by
    prefix, and are numbered in that order.
    """
    if not 2 <= k_star < primes.n:
        raise ValueError(f"k_star must satisfy 2 <= k_star < n = {primes.n}")
    _check_guard(primes, algo, guard)
    table = table or default_table()
    cfg = resolve_config(primes, algo, cfg, table)
    depth = k_star - 1
    engine_m0 = cfg.m0

    def collect(capacity: int):
        engine = make_engine(primes, algo, cfg, table, capacity)
        nodes = engine.prefixes(depth)
        return [(prefix, engine.psi_at(bits, engine_m0)) for prefix, bits in nodes]

    nodes = run_with_capacity(lambda L: L, default_capacity(primes), collect)
    nodes.sort(key=lambda t: (-t[1], t[0]))
    units = tuple(WorkUnit(i, algo, k_star, tuple(prefix), psi) for i, (prefix, psi) in enumerate(nodes))
    return UnitPlan(primes.n, algo, k_star, cfg, units)


# -- parameter files ------------------------------------------------------


def _config_json(plan_n: int, algo: str, k_star: int, cfg: DsaConfig, table: PsiMinTable) -> str:
    data = {"n": plan_n, "algo": algo, "k_star": k_star, "cfg": asdict(cfg), "psi_min": table.digest()}
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def _digest(config: str, lines: Sequence[str]) -> str:
    h = hashlib.sha256(config.encode())
    for line in lines:
        h.update(b"\n" + line.encode())
    return h.hexdigest()[:16]


def dumps_plan(plan: UnitPlan, table: Optional[PsiMinTable] = None) -> str:
    table = table or default_table()
    config = _config_json(plan.n, plan.algo, plan.k_star, plan.cfg, table)
    lines = [u.line() for u in plan.units]
    header = f"{_MAGIC} n={plan.n} algo={plan.algo} hash={_digest(config, lines)} config={config}"
    return "\n".join([header, *lines]) + "\n"


def loads_plan(text: str, table: Optional[PsiMinTable] = None) -> UnitPlan:
    """Parse a parameter file; refuses files whose hash or psi_min table do not match."""
    table = table or default_table()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith(_MAGIC):
        raise ValueError("not a jacobsthal unit file")
    head, _, config = lines[0].partition(" config=")
    fields = dict(tok.split("=", 1) for tok in head[len(_MAGIC):].split())
    body = lines[1:]
    if _digest(config, body) != fields["hash"]:
        raise ValueError("unit file is stale or edited: hash mismatch")
    data = json.loads(config)
    if data["psi_min"] != table.digest():
        raise ValueError("unit file was generated with a different psi_min table")
    cfg = DsaConfig(**data["cfg"])
    algo, k_star = data["algo"], data["k_star"]
    units = []
    for line in body:
        parts = line.split()
        uid, ualgo, uk = int(parts[0]), parts[1], int(parts[2])
        if ualgo != algo or uk != k_star:
            raise ValueError(f"unit {uid} does not match the file header")
        if algo in PERMUTATION_ALGOS:
            prefix = tuple(tuple(int(x) for x in item.split(":")) for item in parts[3:])
        else:
            prefix = tuple(int(x) for x in parts[3:])
        check_prefix(primes_up_to_index(data["n"]), algo, prefix)
        units.append(WorkUnit(uid, algo, k_star, prefix, -1))
    return UnitPlan(data["n"], algo, k_star, cfg, tuple(units))


def save_plan(plan: UnitPlan, path: Union[str, Path], table: Optional[PsiMinTable] = None) -> None:
    Path(path).write_text(dumps_plan(plan, table))


def load_plan(path: Union[str, Path], table: Optional[PsiMinTable] = None) -> UnitPlan:
    return loads_plan(Path(path).read_text(), table)


# -- execution -------------------------------------------------------------

_shared_best = None
_engines: dict = {}


def _init_worker(shared) -> None:
    global _shared_best
    _shared_best = shared


def _run_unit(n: int, algo: str, cfg: DsaConfig, table: PsiMinTable, prefix: Prefix) -> SearchOutcome:
    primes = primes_up_to_index(n)
    if _shared_best is not None:
        cfg = replace(cfg, m0=max(cfg.m0, _shared_best.value))
    key = (n, algo, replace(cfg, m0=None), table.digest())
    capacity = _engines[key].capacity if key in _engines else default_capacity(primes)

    def factory(L: int):
        engine = _engines.get(key)
        if engine is None or engine.capacity != L:
            engine = _engines[key] = make_engine(primes, algo, cfg, table, L)
        engine.reset(cfg.m0)
        return engine

    out = run_with_capacity(factory, capacity, lambda e: e.run_prefix(prefix))
    if _shared_best is not None and out.omega is not None:
        with _shared_best.get_lock():
            if out.omega > _shared_best.value:
                _shared_best.value = out.omega
    return out


def _run_serial(plan: UnitPlan, cfg: DsaConfig, table: PsiMinTable, units: Sequence[WorkUnit]) -> List[SearchOutcome]:
    outs = []
    for u in units:
        try:
            outs.append(_run_unit(plan.n, plan.algo, cfg, table, u.prefix))
        except Exception as exc:  # noqa: BLE001 - retried once, then fatal
            log.warning("unit %d failed (%s); retrying", u.unit_id, exc)
            try:
                outs.append(_run_unit(plan.n, plan.algo, cfg, table, u.prefix))
            except Exception as exc2:
                raise RuntimeError(f"unit {u.unit_id} failed twice; run aborted") from exc2
    return outs


def _run_pool(
    plan: UnitPlan, cfg: DsaConfig, table: PsiMinTable, units: Sequence[WorkUnit], workers: int, share: bool
) -> List[SearchOutcome]:
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else mp.get_context()
    shared = ctx.Value("i", 0) if share else None
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx, initializer=_init_worker, initargs=(shared,)) as pool:
        futures = {u.unit_id: pool.submit(_run_unit, plan.n, plan.algo, cfg, table, u.prefix) for u in units}
        outs = []
        for u in units:
            try:
                outs.append(futures[u.unit_id].result())
            except Exception as exc:  # noqa: BLE001
                log.warning("unit %d failed (%s); retrying", u.unit_id, exc)
                try:
                    outs.append(pool.submit(_run_unit, plan.n, plan.algo, cfg, table, u.prefix).result())
                except Exception as exc2:
                    for f in futures.values():
                        f.cancel()
                    raise RuntimeError(f"unit {u.unit_id} failed twice; run aborted") from exc2
    return outs


def run_units(
    plan: UnitPlan,
    worker_count: int = 1,
    *,
    table: Optional[PsiMinTable] = None,
    share_best: bool = False,
    units: Optional[Sequence[WorkUnit]] = None,
) -> SearchOutcome:
    """Run every unit of ``plan`` and merge; identical for any worker count or order."""
    if worker_count < 1:
        raise ValueError("worker_count must be >= 1")
    table = table or default_table()
    units = plan.units if units is None else units
    primes = primes_up_to_index(plan.n)
    for u in units:
        check_prefix(primes, plan.algo, u.prefix)
    cfg = plan.cfg
    while True:
        if worker_count == 1 and not share_best:
            outs = _run_serial(plan, cfg, table, units)
        else:
            outs = _run_pool(plan, cfg, table, units, worker_count, share_best)
        merged = merge_outcomes(outs, plan.n, plan.algo)
        if merged.omega is not None or cfg.m0 <= 1:
            return merged
        log.warning("%s: no cover of length >= m0=%d in any unit; retrying with m0=1", plan.algo, cfg.m0)
        # the split itself was pruned against the seed, so it is regenerated
        cfg = replace(cfg, m0=1)
        plan = generate_units(primes_up_to_index(plan.n), plan.algo, plan.k_star, cfg, table, guard=False)
        units = plan.units


def run_parallel(
    primes: PrimeSet,
    algo: str,
    k_star: int,
    workers: int,
    cfg: Optional[DsaConfig] = None,
    table: Optional[PsiMinTable] = None,
    **kwargs,
) -> SearchOutcome:
    table = table or default_table()
    plan = generate_units(primes, algo, k_star, cfg, table, guard=kwargs.pop("guard", True))
    return run_units(plan, workers, table=table, **kwargs)


def max_split(primes: PrimeSet, algo: str, cfg: Optional[DsaConfig] = None) -> int:
    """Deepest k_star at which ``algo`` can be split."""
    n = primes.n
    if algo == "gpa":
        resolved = resolve_config(primes, algo, cfg, default_table())
        return min(resolved.k_star - 1, n - 1)
    if algo == "crpdsa":
        s = sequential_count(primes, (cfg or DsaConfig()).switch_ratio)
        return min(s + 1, n - 1)
    return n - 1


def default_split(primes: PrimeSet, algo: str, cfg: Optional[DsaConfig] = None, workers: int = 1) -> int:
    """Shallowest k_star giving at least four candidate units per worker."""
    deepest = max_split(primes, algo, cfg)
    k, units = 2, 2
    while k < deepest and units < 4 * workers:
        k += 1
        units *= primes.prime_at(k) - 1
    return max(2, min(k, deepest))
