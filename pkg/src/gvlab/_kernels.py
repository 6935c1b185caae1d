"""Compiled inner loops for binary words packed into uint64 (n <= 64)."""

from __future__ import annotations

import numpy as np
from numba import njit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(cache=True, inline="always")
def popcount(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


@njit(cache=True)
def all_pairs_hist(words, hist):
    """Add the distance of every unordered pair to ``hist``."""
    m = words.shape[0]
    for i in range(m):
        wi = words[i]
        for j in range(i + 1, m):
            hist[popcount(wi ^ words[j])] += 1


@njit(cache=True)
def pairs_upto_hist(words, w, hist):
    """Brute force, counting only pairs at distance <= w."""
    m = words.shape[0]
    for i in range(m):
        wi = words[i]
        for j in range(i + 1, m):
            dist = popcount(wi ^ words[j])
            if dist <= w:
                hist[dist] += 1


@njit(cache=True)
def block_pass(words, offsets, nbr, w, prev_shift, prev_mask, prev_radius, hist):
    """One block of the pigeonhole close-pair search.

    ``words`` are sorted by their block value and ``offsets[v]:offsets[v+1]``
    is the bucket of block value v.  Each pair of buckets whose values
    differ by a mask in ``nbr`` is visited once (from the smaller value),
    and pairs at distance <= w are counted.  A pair is credited to the first
    block where it qualifies, so earlier blocks (``prev_*``) act as a dedup
    filter.
    """
    nb = prev_shift.shape[0]
    nkeys = offsets.shape[0] - 1
    for a in range(nkeys):
        s0 = offsets[a]
        s1 = offsets[a + 1]
        if s0 == s1:
            continue
        for e in nbr:
            b = a ^ e
            if b < a:
                continue
            t0 = offsets[b]
            t1 = offsets[b + 1]
            if t0 == t1:
                continue
            for ii in range(s0, s1):
                wi = words[ii]
                start = ii + 1 if b == a else t0
                for jj in range(start, t1):
                    x = wi ^ words[jj]
                    dist = popcount(x)
                    if dist > w:
                        continue
                    first = True
                    for c in range(nb):
                        if popcount((x >> prev_shift[c]) & prev_mask[c]) <= prev_radius[c]:
                            first = False
                            break
                    if first:
                        hist[dist] += 1
