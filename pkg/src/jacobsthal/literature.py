"""Published values of h(n), omega(n) and the number of maximal sequences.

Literature data for p_n <= 251, used for verification and for seeding the
tentative sequence length of the discarding searches. Rows beyond n ~ 24 are
not reproducible at desk scale; they are only checked for internal
consistency (h = 2*omega + 2).
"""

from __future__ import annotations

from typing import Dict, NamedTuple, Optional


class TableRow(NamedTuple):
    n: int
    p_n: int
    h: int
    omega: Optional[int]
    n_seq: Optional[int]


_RAW = """
1 2 2 - -
2 3 4 1 1
3 5 6 2 2
4 7 10 4 2
5 11 14 6 2
6 13 22 10 2
7 17 26 12 2
8 19 34 16 2
9 23 40 19 12
10 29 46 22 2
11 31 58 28 2
12 37 66 32 24
13 41 74 36 2
14 43 90 44 48
15 47 100 49 24
16 53 106 52 240
17 59 118 58 60
18 61 132 65 12
19 67 152 75 144
20 71 174 86 52
21 73 190 94 24
22 79 200 99 144
23 83 216 107 16
24 89 234 116 16
25 97 258 128 4
26 101 264 131 40
27 103 282 140 4
28 107 300 149 24
29 109 312 155 204
30 113 330 164 48
31 127 354 176 2
32 131 378 188 2
33 137 388 193 8
34 139 414 206 22
35 149 432 215 4
36 151 450 224 18
37 157 476 237 4
38 163 492 245 28
39 167 510 254 4
40 173 538 268 4
41 179 550 274 2
42 181 574 286 4
43 191 600 299 4
44 193 616 307 4
45 197 642 320 10
46 199 660 329 10
47 211 686 342 2
48 223 718 358 4
49 227 742 370 2
50 229 762 380 4
51 233 798 398 2
52 239 810 404 2
53 241 834 416 2
54 251 858 428 4
"""


def _parse(raw: str) -> Dict[int, TableRow]:
    rows: Dict[int, TableRow] = {}
    for line in raw.strip().splitlines():
        n, p, h, omega, n_seq = line.split()
        rows[int(n)] = TableRow(
            int(n),
            int(p),
            int(h),
            None if omega == "-" else int(omega),
            None if n_seq == "-" else int(n_seq),
        )
    return rows


TABLE1: Dict[int, TableRow] = _parse(_RAW)


def known_omega(n: int) -> Optional[int]:
    row = TABLE1.get(n)
    return None if row is None else row.omega


def known_n_seq(n: int) -> Optional[int]:
    row = TABLE1.get(n)
    return None if row is None else row.n_seq
