"""Binary integer program for omega(n) with a bracketing window [m1, m2].

Variables ``x_i_j`` select remainder j for prime p_i, ``y_k`` flags that
position k is covered. Positions below m1 must be covered; the objective
``sum 2^(m2-k) y_k`` makes the optimum the lexicographically largest y, so
the first uncovered position of the best cover shows up as the first zero.

No solver is bundled. Models are written in the plain-text LP format and a
solution is read back as ``name value`` lines.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

from .primes import PrimeSet, primes_up_to_index

MAX_WINDOW = 64
VALIDATE_MAX_N = 6

_HEADER = re.compile(r"^\\ jacobsthal-ilp n=(\d+) m1=(\d+) m2=(\d+)")


@dataclass(frozen=True)
class IlpModel:
    n: int
    m1: int
    m2: int
    primes: PrimeSet

    @property
    def x_vars(self) -> List[Tuple[int, int]]:
        return [(i, j) for i in range(2, self.n + 1) for j in range(1, self.primes.prime_at(i))]

    @property
    def y_vars(self) -> List[int]:
        return list(range(self.m1, self.m2 + 1))

    def weight(self, k: int) -> int:
        return 1 << (self.m2 - k)

    def terms(self, q: int) -> List[Tuple[int, int]]:
        """x variables whose class contains position q (primes dividing q excluded)."""
        out = []
        for i in range(2, self.n + 1):
            p = self.primes.prime_at(i)
            if q % p:
                out.append((i, q % p))
        return out

    def rows(self) -> List[Tuple[str, List[Tuple[int, str]], str, int]]:
        """(name, [(coef, var)], sense, rhs) for every constraint."""
        rows = []
        for i in range(2, self.n + 1):
            p = self.primes.prime_at(i)
            rows.append((f"choice_{i}", [(1, f"x_{i}_{j}") for j in range(1, p)], "=", 1))
        for q in range(1, self.m1):
            rows.append((f"cover_{q}", [(1, f"x_{i}_{j}") for i, j in self.terms(q)], ">=", 1))
        for k in self.y_vars:
            lhs = [(1, f"x_{i}_{j}") for i, j in self.terms(k)] + [(-1, f"y_{k}")]
            rows.append((f"link_{k}", lhs, ">=", 0))
        return rows


def build_model(n: int, m1: int, m2: int, primes: Optional[PrimeSet] = None) -> IlpModel:
    if n < 2:
        raise ValueError("n must be >= 2")
    if not 1 <= m1 <= m2:
        raise ValueError("need 1 <= m1 <= m2")
    if m2 - m1 > MAX_WINDOW:
        raise ValueError(
            f"m2 - m1 = {m2 - m1} exceeds {MAX_WINDOW}; the 2^(m2-k) weights would not stay exact. "
            "Bracket the window in several runs."
        )
    primes = primes or primes_up_to_index(n)
    if primes.n != n:
        raise ValueError("prime set does not match n")
    return IlpModel(n, m1, m2, primes)


def _expr(terms: List[Tuple[int, str]]) -> str:
    if not terms:
        return "0 y_dummy"
    parts = []
    for c, v in terms:
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = v if mag == 1 else f"{mag} {v}"
        parts.append(f"{sign} {body}")
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else s


def write_lp(model: IlpModel) -> str:
    lines = [f"\\ jacobsthal-ilp n={model.n} m1={model.m1} m2={model.m2}", "Maximize"]
    lines.append(" obj: " + _expr([(model.weight(k), f"y_{k}") for k in model.y_vars]))
    lines.append("Subject To")
    names = [f"x_{i}_{j}" for i, j in model.x_vars] + [f"y_{k}" for k in model.y_vars]
    needs_dummy = False
    for name, lhs, sense, rhs in model.rows():
        if not lhs:
            needs_dummy = True
        lines.append(f" {name}: {_expr(lhs)} {sense} {rhs}")
    if needs_dummy:
        lines.append(" fix_dummy: y_dummy = 0")
        names.append("y_dummy")
    lines.append("Binary")
    lines.extend(f" {v}" for v in names)
    lines.append("End")
    return "\n".join(lines) + "\n"


def read_lp_header(text: str) -> IlpModel:
    """Rebuild the model from the header comment of an exported file."""
    first = text.splitlines()[0] if text else ""
    match = _HEADER.match(first)
    if not match:
        raise ValueError("not a jacobsthal-ilp model file")
    n, m1, m2 = map(int, match.groups())
    return build_model(n, m1, m2)


def parse_solution(text: str) -> Optional[Dict[str, int]]:
    """``name value`` per line; returns None if the file reports infeasibility."""
    values: Dict[str, int] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "infeasible" in line.lower():
            return None
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"cannot parse solution line: {raw!r}")
        name, val = parts
        v = float(val)
        if abs(v - round(v)) > 1e-6 or round(v) not in (0, 1):
            raise ValueError(f"{name} = {val} is not binary")
        values[name] = int(round(v))
    return values


@dataclass(frozen=True)
class IlpOutcome:
    kind: str  # too_large_m1 | too_small_m2 | omega_found
    omega: Optional[int] = None

    def __str__(self) -> str:
        return f"omega_found({self.omega})" if self.kind == "omega_found" else self.kind


def check_assignment(model: IlpModel, values: Mapping[str, int]) -> None:
    """Raise ValueError unless the assignment satisfies every row."""
    for name, lhs, sense, rhs in model.rows():
        total = sum(c * values.get(v, 0) for c, v in lhs)
        ok = total == rhs if sense == "=" else total >= rhs
        if not ok:
            raise ValueError(f"row {name} violated ({total} {sense} {rhs} fails)")


def classify_solution(model: IlpModel, values: Optional[Mapping[str, int]]) -> IlpOutcome:
    """Map an optimal solution to one of the three cases.

    ``None`` stands for an infeasible model, which means some position below
    m1 cannot be covered; that is reported like an all-zero y.
    """
    if values is None:
        return IlpOutcome("too_large_m1")
    check_assignment(model, values)
    y = [values.get(f"y_{k}", 0) for k in model.y_vars]
    if y[0] == 0:
        return IlpOutcome("too_large_m1")
    if all(y):
        return IlpOutcome("too_small_m2")
    first_zero = model.m1 + y.index(0)
    return IlpOutcome("omega_found", first_zero - 1)


def assignment_from_remainders(model: IlpModel, remainders: Tuple[int, ...]) -> Dict[str, int]:
    """x from the remainders and the best y they allow."""
    values = {f"x_{i}_{j}": int(remainders[i - 2] == j) for i, j in model.x_vars}
    for k in model.y_vars:
        values[f"y_{k}"] = int(any(values[f"x_{i}_{j}"] for i, j in model.terms(k)))
    return values


def solve_bruteforce(model: IlpModel) -> Optional[Dict[str, int]]:
    """Optimal solution by trying every remainder tuple; None if infeasible.

    Ties on the objective are broken towards the smallest remainder tuple.
    """
    if model.n > VALIDATE_MAX_N:
        raise ValueError(f"brute force is limited to n <= {VALIDATE_MAX_N}")
    odd = model.primes.odd
    best, best_obj = None, -1
    for rem in itertools.product(*(range(1, p) for p in odd)):
        if not all(any(q % p == a for a, p in zip(rem, odd)) for q in range(1, model.m1)):
            continue
        vals = assignment_from_remainders(model, rem)
        obj = sum(model.weight(k) * vals[f"y_{k}"] for k in model.y_vars)
        if obj > best_obj:
            best, best_obj = vals, obj
    return best


def validate_small(model: IlpModel, omega: Optional[int] = None) -> bool:
    """Brute-force the model and check the trichotomy against omega(n)."""
    if omega is None:
        from .search_basic import rpa

        omega = rpa(model.primes).omega
    outcome = classify_solution(model, solve_bruteforce(model))
    if omega < model.m1:
        return outcome.kind == "too_large_m1"
    if omega >= model.m2:
        return outcome.kind == "too_small_m2"
    return outcome == IlpOutcome("omega_found", omega)


def system_feasible(n: int, m: int, primes: Optional[PrimeSet] = None) -> bool:
    """Whether some remainder choice covers 1..m (the plain feasibility system)."""
    primes = primes or primes_up_to_index(n)
    odd = primes.odd
    for rem in itertools.product(*(range(1, p) for p in odd)):
        if all(any(q % p == a for a, p in zip(rem, odd)) for q in range(1, m + 1)):
            return True
    return False
