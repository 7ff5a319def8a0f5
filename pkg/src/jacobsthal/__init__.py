"""Exhaustive computation of the primorial Jacobsthal function.

h(n) is the longest gap between integers coprime to the product of the
first n primes. It is obtained from omega(n), the longest run of
consecutive integers each divisible by one of the odd primes p_2..p_n,
through h(n) = 2 omega(n) + 2.
"""

from .bounds import PsiMinTable, compute_psi_min, default_table
from .enumeration import SequenceRecord, export_records, reverse_record
from .literature import TABLE1, known_n_seq, known_omega
from .primes import PrimeSet, h_from_omega, primes_up_to_index
from .search_basic import GuardError, SearchOutcome, bpa, bsa, rpa
from .search_discarding import DsaConfig, crpdsa, dsa
from .search_greedy import gpa

__all__ = [
    "DsaConfig",
    "GuardError",
    "PrimeSet",
    "PsiMinTable",
    "SearchOutcome",
    "SequenceRecord",
    "TABLE1",
    "bpa",
    "bsa",
    "compute_psi_min",
    "crpdsa",
    "default_table",
    "dsa",
    "export_records",
    "gpa",
    "h_from_omega",
    "known_n_seq",
    "known_omega",
    "primes_up_to_index",
    "reverse_record",
    "rpa",
]

__version__ = "0.1.0"
