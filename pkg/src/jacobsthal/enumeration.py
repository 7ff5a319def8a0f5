"""Maximal covers in their three equivalent forms, reversal and file export.

A cover of 1..m can be written as

* remainders: one non-zero class a_i per odd prime p_i,
* moduli: for each position q the smallest prime whose class contains q,
* permutation: the primes in the order they are anchored on the first free
  position, choosing the smallest prime whenever several classes contain it.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from itertools import groupby
from pathlib import Path
from typing import IO, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .coverage import ResidueAssignment, class_mask, first_free, reconstruct_offset
from .primes import PrimeSet, primes_up_to_index
from .search_basic import SearchOutcome, cover_length

KINDS = ("remainders", "moduli", "permutations")


@dataclass(frozen=True)
class SequenceRecord:
    n: int
    m: int
    remainders: Tuple[int, ...]
    moduli: Tuple[int, ...]
    pi: Tuple[int, ...]
    q: Tuple[int, ...]

    @classmethod
    def from_remainders(
        cls, remainders: Sequence[int], primes: Optional[PrimeSet] = None, m: Optional[int] = None
    ) -> "SequenceRecord":
        rem = tuple(remainders)
        primes = primes or primes_up_to_index(len(rem) + 1)
        odd = primes.odd
        if len(rem) != len(odd):
            raise ValueError(f"expected {len(odd)} remainders, got {len(rem)}")
        for a, p in zip(rem, odd):
            if not 1 <= a <= p - 1:
                raise ValueError(f"remainder {a} outside 1..{p - 1} for p={p}")
        actual = cover_length(rem, odd)
        if m is not None and m != actual:
            raise ValueError(f"remainders cover 1..{actual}, not 1..{m}")
        pi, q = remainders_to_permutation(rem, actual, primes)
        return cls(primes.n, actual, rem, minimal_moduli(rem, actual, primes), pi, q)

    def offset(self, primes: Optional[PrimeSet] = None) -> int:
        primes = primes or primes_up_to_index(self.n)
        return reconstruct_offset(ResidueAssignment.from_tuple(self.remainders, self.n), primes)

    def line(self, kind: str) -> str:
        values = {"remainders": self.remainders, "moduli": self.moduli, "permutations": self.pi}[kind]
        return " ".join(map(str, values))


def minimal_moduli(remainders: Sequence[int], m: int, primes: PrimeSet) -> Tuple[int, ...]:
    out = []
    for q in range(1, m + 1):
        hit = [p for a, p in zip(remainders, primes.odd) if q % p == a]
        if not hit:
            raise ValueError(f"position {q} is not covered")
        out.append(min(hit))
    return tuple(out)


def remainders_to_permutation(
    remainders: Sequence[int], m: int, primes: PrimeSet
) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Anchor primes on successive first free positions, smallest prime first."""
    odd = primes.odd
    if len(remainders) != len(odd):
        raise ValueError(f"expected {len(odd)} remainders")
    by_prime = dict(zip(odd, remainders))
    length = m + 2 * max(odd) + 2
    left = list(odd)
    bits = 0
    pi: List[int] = []
    qs: List[int] = []
    while left:
        q = first_free(bits)
        if q > m:
            raise ValueError(
                f"primes {left} are not needed to cover 1..{m}; the cover is not maximal"
            )
        cands = [p for p in left if q % p == by_prime[p]]
        if not cands:
            raise ValueError(f"position {q} is not covered; cover of 1..{m} incomplete")
        p = min(cands)
        pi.append(p)
        qs.append(q)
        left.remove(p)
        bits |= class_mask(p, by_prime[p], length)
    if first_free(bits) <= m:
        raise ValueError(f"cover of 1..{m} incomplete")
    return tuple(pi), tuple(qs)


def permutation_to_remainders(
    pi: Sequence[int], q: Sequence[int], primes: PrimeSet
) -> Tuple[int, ...]:
    """a_i = q_j mod p_i where pi_j = p_i."""
    if sorted(pi) != sorted(primes.odd):
        raise ValueError("pi is not a permutation of the odd primes")
    anchor = dict(zip(pi, q))
    rem = tuple(anchor[p] % p for p in primes.odd)
    if any(a == 0 for a in rem):
        raise ValueError("a prime is anchored on one of its multiples")
    return rem


def reverse_remainders(remainders: Sequence[int], m: int, odd: Sequence[int]) -> Tuple[int, ...]:
    rev = tuple((m + 1 - a) % p for a, p in zip(remainders, odd))
    if any(b == 0 for b in rev):
        raise ValueError("m + 1 falls in one of the classes; the cover is not maximal")
    return rev


def reverse_record(rec: SequenceRecord, primes: Optional[PrimeSet] = None) -> SequenceRecord:
    """The mirrored cover q -> m + 1 - q."""
    primes = primes or primes_up_to_index(rec.n)
    rev = reverse_remainders(rec.remainders, rec.m, primes.odd)
    return SequenceRecord.from_remainders(rev, primes, rec.m)


def records_from_outcome(outcome: SearchOutcome, primes: Optional[PrimeSet] = None) -> List[SequenceRecord]:
    primes = primes or primes_up_to_index(outcome.n)
    return [
        SequenceRecord.from_remainders(rem, primes, outcome.omega)
        for rem in outcome.sorted_sequences()
    ]


Sink = Union[str, os.PathLike, IO[str]]


def format_records(
    records: Iterable[SequenceRecord],
    kind: str,
    *,
    n: Optional[int] = None,
    omega: Optional[int] = None,
) -> str:
    """One line per record, one ``# n= omega= count=`` header per n."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    recs = sorted(records, key=lambda r: (r.n, r.remainders))
    buf = io.StringIO()
    if not recs:
        buf.write(f"# n={n if n is not None else '-'} omega={omega if omega is not None else '-'} count=0\n")
        return buf.getvalue()
    for key, group in groupby(recs, key=lambda r: r.n):
        group = list(group)
        buf.write(f"# n={key} omega={group[0].m} count={len(group)}\n")
        for rec in group:
            buf.write(rec.line(kind) + "\n")
    return buf.getvalue()


def export_records(
    records: Iterable[SequenceRecord],
    kind: str,
    sink: Sink,
    *,
    n: Optional[int] = None,
    omega: Optional[int] = None,
) -> str:
    text = format_records(records, kind, n=n, omega=omega)
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        Path(sink).write_text(text)
    return text


def export_all(outcome: SearchOutcome, out_dir: Union[str, os.PathLike]) -> Dict[str, Path]:
    """Write remainders.txt, moduli.txt and permutations.txt for one outcome."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = records_from_outcome(outcome)
    paths = {}
    for kind in KINDS:
        path = out / f"{kind}.txt"
        export_records(records, kind, path, n=outcome.n, omega=outcome.omega)
        paths[kind] = path
    return paths


def parse_records(text: str) -> Dict[int, Tuple[Optional[int], List[Tuple[int, ...]]]]:
    """Inverse of :func:`format_records`: n -> (omega, lines as integer tuples)."""
    sections: Dict[int, Tuple[Optional[int], List[Tuple[int, ...]]]] = {}
    current = None
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            fields = dict(tok.split("=") for tok in line[1:].split())
            if fields["n"] == "-":
                current = None
                continue
            omega = None if fields["omega"] == "-" else int(fields["omega"])
            current = int(fields["n"])
            sections[current] = (omega, [])
        elif current is not None:
            sections[current][1].append(tuple(int(x) for x in line.split()))
    return sections
