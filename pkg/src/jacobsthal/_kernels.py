"""Compiled inner loop of the sequential remainder search.

Same traversal order, same pruning and same visited count as
:class:`~.search_discarding._Discarding`. Coverage is held in two 64-bit
words, which is enough for n <= 16; larger capacities raise ValueError.
Used where the interpreted search is too slow, chiefly the exhaustive runs
with pruning switched off.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_ONE = np.uint64(1)

MAX_CAPACITY = 128
OK, CAPACITY, OVERFLOW = 0, 1, 2


@njit(cache=True, inline="always")
def _popcount(x):
    x = x - ((x >> _ONE) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


@njit(cache=True, inline="always")
def _ctz(x):
    # x != 0
    return _popcount((x & (~x + _ONE)) - _ONE)


@njit(cache=True, inline="always")
def _bit_length(x):
    n = 0
    while x:
        x >>= _ONE
        n += 1
    return n


@njit(cache=True, inline="always")
def _first_free(a0, a1):
    inv = ~a0
    if inv:
        return _ctz(inv) + 1
    inv = ~a1
    if inv:
        return 65 + _ctz(inv)
    return 129


@njit(cache=True, inline="always")
def _low_mask(k):
    # bits 0..k-1 of a word, 0 <= k <= 64
    if k >= 64:
        return ~np.uint64(0)
    return (_ONE << np.uint64(k)) - _ONE


@njit(cache=True)
def _gap(a0, a1, m, reduced):
    """(window, uncovered) of 1..m, window shrunk to first..last gap if asked."""
    u0 = ~a0 & _low_mask(m)
    u1 = ~a1 & _low_mask(m - 64) if m > 64 else np.uint64(0)
    unc = _popcount(u0) + _popcount(u1)
    if unc == 0:
        return 0, 0
    if not reduced:
        return m, unc
    lo = _ctz(u0) + 1 if u0 else 65 + _ctz(u1)
    hi = 64 + _bit_length(u1) if u1 else _bit_length(u0)
    return hi - lo + 1, unc


@njit(cache=True)
def _store(out, count, res, last, r):
    for i in range(last):
        out[count, i] = res[i]
    out[count, last] = r


@njit(cache=True)
def dsa_kernel(m0w, m1w, odd, bounds, check_from, reduced, m0, cap, out):
    """Depth-first remainder search.

    m0w/m1w[level, r]   low/high coverage word of class r of the level-th odd prime
    bounds[level, w]    summed bound of odd[level:] for window w
    check_from          first level whose children are checked (large = never)
    cap                 number of valid positions in the masks
    out                 buffer for maximal remainder tuples

    Returns (status, m, count, visited).
    """
    nodd = odd.shape[0]
    last = nodd - 1
    b0 = np.zeros(nodd + 1, dtype=np.uint64)
    b1 = np.zeros(nodd + 1, dtype=np.uint64)
    res = np.zeros(nodd, dtype=np.int64)
    cand = np.zeros(64, dtype=np.int64)
    m = m0
    count = 0
    visited = 0
    level = 0
    p = odd[last]
    while level >= 0:
        if level == last or (level == last - 1 and level < check_from):
            c0 = b0[level]
            c1 = b1[level]
            if level == last:
                pp = 2  # a single node: only the last prime remains
                n_cand = 1
                cand[0] = 0
            else:
                # Unchecked second-to-last prime p'. With F the first free
                # position, every residue except F mod p' leaves F free, so
                # only the last prime's class of F can extend the cover, and
                # only if p' also takes the next gap G; other residues of p'
                # cannot reach m. All leaves are still counted.
                pp = odd[level]
                big_f = _first_free(c0, c1)
                if big_f > cap:
                    return CAPACITY, m, count, visited
                full = big_f - 1 >= m
                n_cand = 0
                rf = big_f % pp
                if not full:
                    if rf:
                        cand[n_cand] = rf
                        n_cand += 1
                    r0 = big_f % p
                    if r0:
                        big_g = _first_free(c0 | m0w[last, r0], c1 | m1w[last, r0])
                        if big_g > cap:
                            return CAPACITY, m, count, visited
                        if big_g - 1 >= m:
                            full = True
                        else:
                            rg = big_g % pp
                            if rg and rg != rf:
                                cand[n_cand] = rg
                                n_cand += 1
                if full:
                    n_cand = pp - 1
                    for i in range(n_cand):
                        cand[i] = i + 1
            visited += (pp - 1) * (p - 1)
            for i in range(n_cand):
                if level == last:
                    d0 = c0
                    d1 = c1
                else:
                    rr = cand[i]
                    d0 = c0 | m0w[level, rr]
                    d1 = c1 | m1w[level, rr]
                    res[level] = rr
                f1 = _first_free(d0, d1)
                if f1 > cap:
                    return CAPACITY, m, count, visited
                r0 = f1 % p
                if r0:
                    g = _first_free(d0 | m0w[last, r0], d1 | m1w[last, r0])
                    if g > cap:
                        return CAPACITY, m, count, visited
                    if g - 1 >= m:
                        if g - 1 > m:
                            m = g - 1
                            count = 0
                        if count >= out.shape[0]:
                            return OVERFLOW, m, count, visited
                        _store(out, count, res, last, r0)
                        count += 1
                if f1 - 1 >= m:
                    if f1 - 1 > m:
                        m = f1 - 1
                        count = 0
                    for r in range(1, p):
                        if r == r0:
                            continue
                        if count >= out.shape[0]:
                            return OVERFLOW, m, count, visited
                        _store(out, count, res, last, r)
                        count += 1
            level -= 1
            continue
        res[level] += 1
        if res[level] >= odd[level]:
            level -= 1
            continue
        r = res[level]
        n0 = b0[level] | m0w[level, r]
        n1 = b1[level] | m1w[level, r]
        b0[level + 1] = n0
        b1[level + 1] = n1
        if level >= check_from:
            win, unc = _gap(n0, n1, m, reduced)
            if unc > 0 and bounds[level + 1, win] < unc:
                continue
        level += 1
        res[level] = 0
    return OK, m, count, visited


def pack_masks(masks, capacity: int):
    """Python-int class masks -> (low words, high words), each [level, residue]."""
    if capacity > MAX_CAPACITY:
        raise ValueError(f"compiled backend holds at most {MAX_CAPACITY} positions")
    pmax = max(len(row) for row in masks)
    lo = np.zeros((len(masks), pmax), dtype=np.uint64)
    hi = np.zeros((len(masks), pmax), dtype=np.uint64)
    word = (1 << 64) - 1
    for li, row in enumerate(masks):
        for r, x in enumerate(row):
            lo[li, r] = x & word
            hi[li, r] = (x >> 64) & word
    return lo, hi


_ENTER, _LOOP, _AFTER = 0, 1, 2


@njit(cache=True)
def gpa_kernel(
    m0w, m1w, gp, off, rowidx, base_avail, prefix, start0, start1, criterion, m0, cap, out
):
    """Greedy permutation search below one sequential prefix.

    gp[j]            greedy primes in ascending order, slots off[j]..off[j]+gp[j]-1
    rowidx[q, j]     slot of prime j hit by position q
    m0w/m1w[j, r]    coverage words of class r of greedy prime j
    prefix           remainders of the sequentially placed primes
    start0/start1    coverage of the prefix

    Only the slots of primes not yet placed are touched at each level; the
    others have avail == 0, so skipping them leaves the traversal unchanged.

    Returns (status, m, count, visited), storing full remainder tuples in out.
    """
    J = gp.shape[0]
    T = base_avail.shape[0]
    s = prefix.shape[0]
    b0 = np.zeros(J + 1, dtype=np.uint64)
    b1 = np.zeros(J + 1, dtype=np.uint64)
    avail = np.zeros((J + 1, T), dtype=np.uint8)
    C = np.zeros((J + 1, T), dtype=np.int32)
    ce = np.zeros((J + 1, T), dtype=np.int32)
    rho = np.zeros((J + 1, J), dtype=np.int32)
    live = np.zeros((J + 1, J), dtype=np.int64)  # unplaced primes, ascending
    total = np.zeros(J + 1, dtype=np.int64)
    ngaps = np.zeros(J + 1, dtype=np.int64)
    W = np.zeros(J + 1, dtype=np.int64)
    Wp = np.zeros(J + 1, dtype=np.int64)
    haveC = np.zeros(J + 1, dtype=np.uint8)
    state = np.zeros(J + 1, dtype=np.int64)
    cur = np.zeros(J + 1, dtype=np.int64)
    pj = np.zeros(J + 1, dtype=np.int64)
    pr = np.zeros(J + 1, dtype=np.int64)
    rem = np.zeros(J, dtype=np.int64)
    # visiting order of a node: slots with ce > 0 by descending ce, then slot
    order = np.zeros((J + 1, T), dtype=np.int64)
    olen = np.zeros(J + 1, dtype=np.int64)
    opos = np.zeros(J + 1, dtype=np.int64)
    cnt = np.zeros(gp.max() + 1 if J else 1, dtype=np.int64)
    m = m0
    count = 0
    visited = 0
    b0[0] = start0
    b1[0] = start1
    for t in range(T):
        avail[0, t] = base_avail[t]
    for j in range(J):
        live[0, j] = j
    state[0] = _ENTER
    d = 0
    while d >= 0:
        st = state[d]
        nl = J - d
        if st == _ENTER:
            x0 = b0[d]
            x1 = b1[d]
            if d == J:
                visited += 1
                f = _first_free(x0, x1)
                if f > cap:
                    return CAPACITY, m, count, visited
                if f - 1 >= m:
                    if f - 1 > m:
                        m = f - 1
                        count = 0
                    if count >= out.shape[0]:
                        return OVERFLOW, m, count, visited
                    for i in range(s):
                        out[count, i] = prefix[i]
                    for k in range(J):
                        rem[pj[k]] = pr[k]
                    for k in range(J):
                        out[count, s + k] = rem[k]
                    count += 1
                d -= 1
                continue
            u0 = ~x0 & _low_mask(m)
            u1 = ~x1 & _low_mask(m - 64) if m > 64 else np.uint64(0)
            if u0 | u1:
                weff = m
            else:
                weff = _first_free(x0, x1)
                if weff > cap:
                    return CAPACITY, m, count, visited
                if weff <= 64:
                    u0 = _ONE << np.uint64(weff - 1)
                    u1 = np.uint64(0)
                else:
                    u0 = np.uint64(0)
                    u1 = _ONE << np.uint64(weff - 65)
            if haveC[d] == 0 or Wp[d] != weff:
                for k in range(nl):
                    j = live[d, k]
                    for t in range(off[j], off[j] + gp[j]):
                        C[d, t] = 0
                for w in range(2):
                    y = u0 if w == 0 else u1
                    while y:
                        q = 64 * w + _ctz(y) + 1
                        y &= y - _ONE
                        for k in range(nl):
                            C[d, rowidx[q, live[d, k]]] += 1
            W[d] = weff
            ngaps[d] = _popcount(u0) + _popcount(u1)
            tot = 0
            for k in range(nl):
                j = live[d, k]
                mx = 0
                for t in range(off[j], off[j] + gp[j]):
                    v = C[d, t] * avail[d, t]
                    ce[d, t] = v
                    if v > mx:
                        mx = v
                rho[d, j] = mx
                tot += mx
            if criterion:
                total[d] = tot
                if tot < ngaps[d]:
                    d -= 1
                    continue
            if nl == 1:
                # one prime left: every child is a leaf, so evaluate them in
                # place. The window is fixed for the whole sibling loop, hence
                # the visiting order does not change which leaves are stored.
                # With the check on, a sibling is reached iff ce >= ngaps.
                j = live[d, 0]
                lim = ngaps[d] if criterion else 1
                for t in range(off[j], off[j] + gp[j]):
                    if ce[d, t] < lim or ce[d, t] == 0:
                        continue
                    r = t - off[j]
                    visited += 1
                    f = _first_free(x0 | m0w[j, r], x1 | m1w[j, r])
                    if f > cap:
                        return CAPACITY, m, count, visited
                    if f - 1 >= m:
                        if f - 1 > m:
                            m = f - 1
                            count = 0
                        if count >= out.shape[0]:
                            return OVERFLOW, m, count, visited
                        pj[d] = j
                        pr[d] = r
                        for i in range(s):
                            out[count, i] = prefix[i]
                        for k in range(J):
                            rem[pj[k]] = pr[k]
                        for k in range(J):
                            out[count, s + k] = rem[k]
                        count += 1
                d -= 1
                continue
            # ce only changes by zeroing the slot just explored, so the
            # argmax sequence of the sibling loop is fixed here (stable
            # insertion sort; ties keep the lower slot first)
            c = 0
            for k in range(nl):
                j = live[d, k]
                for t in range(off[j], off[j] + gp[j]):
                    v = ce[d, t]
                    if v == 0:
                        continue
                    i = c
                    while i > 0 and ce[d, order[d, i - 1]] < v:
                        order[d, i] = order[d, i - 1]
                        i -= 1
                    order[d, i] = t
                    c += 1
            olen[d] = c
            opos[d] = 0
            state[d] = _LOOP
            continue
        if st == _LOOP:
            if opos[d] >= olen[d]:
                d -= 1
                continue
            idx = order[d, opos[d]]
            opos[d] += 1
            j = 0
            while j + 1 < J and off[j + 1] <= idx:
                j += 1
            r = idx - off[j]
            cur[d] = idx
            pj[d] = j
            pr[d] = r
            x0 = b0[d]
            x1 = b1[d]
            n0 = x0 | m0w[j, r]
            n1 = x1 | m1w[j, r]
            if nl == 2:
                # the child has one prime left: count its gaps per residue
                # and evaluate its leaves here instead of entering it
                j2 = live[d, 0] if live[d, 0] != j else live[d, 1]
                p2 = gp[j2]
                u0 = ~n0 & _low_mask(m)
                u1 = ~n1 & _low_mask(m - 64) if m > 64 else np.uint64(0)
                if not (u0 | u1):
                    weff = _first_free(n0, n1)
                    if weff > cap:
                        return CAPACITY, m, count, visited
                    if weff <= 64:
                        u0 = _ONE << np.uint64(weff - 1)
                    else:
                        u1 = _ONE << np.uint64(weff - 65)
                gaps = _popcount(u0) + _popcount(u1)
                for r2 in range(p2):
                    cnt[r2] = 0
                for w in range(2):
                    y = u0 if w == 0 else u1
                    while y:
                        q = 64 * w + _ctz(y) + 1
                        y &= y - _ONE
                        cnt[q % p2] += 1
                # with the check on, the child is discarded unless one class
                # closes every gap, and only such classes are visited
                lim = gaps if criterion else 1
                for r2 in range(1, p2):
                    v = cnt[r2] * avail[d, off[j2] + r2]
                    if v == 0 or v < lim:
                        continue
                    visited += 1
                    f = _first_free(n0 | m0w[j2, r2], n1 | m1w[j2, r2])
                    if f > cap:
                        return CAPACITY, m, count, visited
                    if f - 1 >= m:
                        if f - 1 > m:
                            m = f - 1
                            count = 0
                        if count >= out.shape[0]:
                            return OVERFLOW, m, count, visited
                        pj[d + 1] = j2
                        pr[d + 1] = r2
                        for i in range(s):
                            out[count, i] = prefix[i]
                        for k in range(J):
                            rem[pj[k]] = pr[k]
                        for k in range(J):
                            out[count, s + k] = rem[k]
                        count += 1
                state[d] = _AFTER
                continue
            e = d + 1
            b0[e] = n0
            b1[e] = n1
            c = 0
            for k in range(nl):
                jj = live[d, k]
                if jj == j:
                    continue
                live[e, c] = jj
                c += 1
                for t in range(off[jj], off[jj] + gp[jj]):
                    avail[e, t] = avail[d, t]
                    C[e, t] = C[d, t]
            weff = W[d]
            y0 = (n0 & ~x0) & _low_mask(weff)
            y1 = (n1 & ~x1) & _low_mask(weff - 64) if weff > 64 else np.uint64(0)
            for w in range(2):
                y = y0 if w == 0 else y1
                while y:
                    q = 64 * w + _ctz(y) + 1
                    y &= y - _ONE
                    for k in range(c):
                        C[e, rowidx[q, live[e, k]]] -= 1
            haveC[e] = 1
            Wp[e] = weff
            state[d] = _AFTER
            state[e] = _ENTER
            d = e
            continue
        # _AFTER: block the pair just explored
        idx = cur[d]
        j = pj[d]
        avail[d, idx] = 0
        ce[d, idx] = 0
        if criterion:
            mx = 0
            for t in range(off[j], off[j] + gp[j]):
                if ce[d, t] > mx:
                    mx = ce[d, t]
            total[d] += mx - rho[d, j]
            rho[d, j] = mx
            if total[d] < ngaps[d]:
                d -= 1
                continue
        state[d] = _LOOP
    return OK, m, count, visited
