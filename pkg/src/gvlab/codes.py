"""Codes as data: Hamming metrics, enumerators, growth rates, serialization.

A :class:`CodeSample` is either *linear* (the row space of a basis over a
field; codewords are produced on demand) or an *explicit set* of distinct
words kept in canonical sorted order.

Binary codes with ``n <= 64`` are handled with words packed into ``uint64``
(bit ``i`` is coordinate ``i``); everything else uses dense ``(N, n)`` symbol
arrays.  Both paths return identical results.
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from . import _kernels
from .field import FieldError, FieldSpec, check_word, default_alphabet, rref

LINEAR = "linear"
EXPLICIT = "explicit-set"

WEIGHT = "weight"
ABOUT_CODEWORD = "distance-about-codeword"
PAIRWISE = "pairwise"

NEG_INF = float("-inf")

# Largest number of codewords materialized at once.
MATERIALIZE_LIMIT = 1 << 25
_MAX_BLOCK_BITS = 22


class CodeError(ValueError):
    pass


# -- word-level metrics --


def hamming_distance(a: Sequence[int], b: Sequence[int]) -> int:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    return int(np.count_nonzero(a != b))


def hamming_weight(a: Sequence[int]) -> int:
    return int(np.count_nonzero(np.asarray(a)))


def growth_rate(count: int, n: int, q: int) -> float:
    """``log_q(count) / n``; ``-inf`` for an empty count."""
    if count < 0:
        raise ValueError("count must be non-negative")
    if count == 0:
        return NEG_INF
    return math.log(count) / (n * math.log(q))


# -- packing --


def pack_binary(words: np.ndarray) -> np.ndarray:
    """Pack (N, n) binary words, n <= 64, into uint64 with bit i = coordinate i."""
    words = np.asarray(words, dtype=np.uint8)
    N, n = words.shape
    if n > 64:
        raise ValueError("packing needs n <= 64")
    padded = np.zeros((N, 64), dtype=np.uint8)
    padded[:, :n] = words
    return np.packbits(padded, axis=1, bitorder="little").view("<u8").ravel().astype(np.uint64)


def unpack_binary(packed: np.ndarray, n: int) -> np.ndarray:
    packed = np.ascontiguousarray(np.asarray(packed, dtype=np.uint64).astype("<u8"))
    bits = np.unpackbits(packed.view(np.uint8).reshape(-1, 8), axis=1, bitorder="little")
    return bits[:, :n].astype(np.uint8)


def _row_keys(words: np.ndarray) -> np.ndarray | None:
    """Integer keys ordered like the rows (coordinate 0 most significant), when they fit."""
    N, n = words.shape
    q = int(words.max()) + 1 if words.size else 2
    q = max(q, 2)
    if q == 2 and n <= 64:
        padded = np.zeros((N, 64), dtype=np.uint8)
        padded[:, 64 - n:] = words
        return np.packbits(padded, axis=1, bitorder="big").view(">u8").ravel().astype(np.uint64)
    if n * math.log2(q) < 63:
        keys = np.zeros(N, dtype=np.int64)
        for j in range(n):
            keys = keys * q + words[:, j].astype(np.int64)
        return keys
    return None


def unique_rows(words: np.ndarray, return_index: bool = False):
    """Distinct rows in lexicographic order (optionally with first-occurrence indices)."""
    if words.shape[0] == 0:
        return (words, np.zeros(0, np.int64)) if return_index else words
    keys = _row_keys(words)
    if keys is None:
        return np.unique(words, axis=0, return_index=return_index)
    _, idx = np.unique(keys, return_index=True)
    return (words[idx], idx) if return_index else words[idx]


def _canonical(words: np.ndarray) -> np.ndarray:
    """Distinct rows in lexicographic order."""
    return unique_rows(words)


class _Packed:
    """Vector ops on binary words packed into uint64."""

    def __init__(self, n: int):
        self.n = n

    def from_rows(self, rows: np.ndarray) -> np.ndarray:
        return pack_binary(np.asarray(rows, dtype=np.uint8).reshape(-1, self.n))

    def zero(self) -> np.ndarray:
        return np.zeros(1, dtype=np.uint64)

    def scaled(self, row, a):  # only a == 1 exists
        return row

    def add(self, a, b):
        return np.bitwise_xor(a, b)

    def combine(self, a, b):
        return np.bitwise_xor(a[:, None], b[None, :]).ravel()

    def concat(self, parts):
        return np.concatenate(parts)

    def weights(self, v) -> np.ndarray:
        return np.bitwise_count(v).astype(np.int64)

    def unique(self, v):
        return np.unique(v)

    def to_words(self, v) -> np.ndarray:
        return unpack_binary(v, self.n)

    def length(self, v) -> int:
        return v.shape[0]


class _Dense:
    """Vector ops on (N, n) arrays of field elements."""

    def __init__(self, n: int, fld: FieldSpec):
        self.n = n
        self.fld = fld

    def from_rows(self, rows):
        return np.asarray(rows, dtype=self.fld.dtype).reshape(-1, self.n)

    def zero(self):
        return np.zeros((1, self.n), dtype=self.fld.dtype)

    def scaled(self, row, a):
        return np.asarray(self.fld.mul(a, row), dtype=self.fld.dtype)

    def add(self, a, b):
        return np.asarray(self.fld.add(a, b), dtype=self.fld.dtype)

    def combine(self, a, b):
        out = self.fld.add(a[:, None, :], b[None, :, :])
        return np.asarray(out, dtype=self.fld.dtype).reshape(-1, self.n)

    def concat(self, parts):
        return np.concatenate(parts, axis=0)

    def weights(self, v):
        return np.count_nonzero(v, axis=1).astype(np.int64)

    def unique(self, v):
        return _canonical(v)

    def to_words(self, v):
        return np.asarray(v, dtype=self.fld.dtype)

    def length(self, v):
        return v.shape[0]


def _ops(n: int, fld: FieldSpec):
    if fld.q == 2 and n <= 64:
        return _Packed(n)
    return _Dense(n, fld)


# -- the code type --


@dataclass(frozen=True, eq=False)
class CodeSample:
    """A code of length n over an alphabet of size q.

    Linear codes keep ``basis`` (a reduced, full-rank ``dim x n`` matrix)
    and, when sampled, the ``generator`` matrix (``n x k``) they came from.
    Explicit codes keep ``explicit_words`` in canonical order; ``anchor`` is
    the index of the image of the zero message, used for per-codeword
    statistics.
    """

    field: FieldSpec
    n: int
    origin: str
    basis: np.ndarray | None = None
    generator: np.ndarray | None = None
    explicit_words: np.ndarray | None = None
    nominal_k: int | None = None
    anchor: int = 0
    rejections: int = 0

    @classmethod
    def from_generator(cls, generator: np.ndarray, fld: FieldSpec) -> "CodeSample":
        """Linear code spanned by the columns of an ``n x k`` generator."""
        fld.require_field()
        gen = np.asarray(generator, dtype=np.int64)
        if gen.ndim != 2:
            raise CodeError("generator must be an n x k matrix")
        if gen.size and (gen.min() < 0 or gen.max() >= fld.q):
            raise CodeError("generator entries must lie in [0, q)")
        n, k = gen.shape
        basis = _basis_of(gen.T, fld)
        return cls(field=fld, n=n, origin=LINEAR, basis=basis, generator=gen.astype(fld.dtype), nominal_k=k)

    @classmethod
    def from_basis(cls, rows: np.ndarray, fld: FieldSpec, nominal_k: int | None = None) -> "CodeSample":
        fld.require_field()
        rows = np.asarray(rows, dtype=np.int64)
        basis = _basis_of(rows, fld)
        return cls(field=fld, n=rows.shape[1], origin=LINEAR, basis=basis,
                   nominal_k=basis.shape[0] if nominal_k is None else nominal_k)

    @classmethod
    def from_words(cls, words, fld: FieldSpec | int, nominal_k: int | None = None,
                   anchor_word: Sequence[int] | None = None) -> "CodeSample":
        """Explicit code from a collection of words; duplicates are dropped."""
        if isinstance(fld, int):
            fld = default_alphabet(fld)
        arr = np.asarray(words)
        if arr.dtype.kind not in "iu":
            arr = arr.astype(np.int64)
        if arr.ndim != 2 or arr.shape[0] == 0:
            raise CodeError("need a non-empty (N, n) array of words")
        if arr.min() < 0 or arr.max() >= fld.q:
            raise CodeError(f"symbols must lie in [0, {fld.q})")
        canon = _canonical(arr.astype(fld.dtype))
        anchor = 0
        if anchor_word is not None:
            hit = np.flatnonzero(np.all(canon == np.asarray(anchor_word, dtype=fld.dtype), axis=1))
            if hit.size == 0:
                raise CodeError("anchor word is not a codeword")
            anchor = int(hit[0])
        return cls(field=fld, n=arr.shape[1], origin=EXPLICIT, explicit_words=canon,
                   nominal_k=nominal_k, anchor=anchor)

    # -- basic properties --

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def is_linear(self) -> bool:
        return self.origin == LINEAR

    @property
    def dimension(self) -> int:
        if not self.is_linear:
            raise CodeError("dimension is defined for linear codes only")
        return int(self.basis.shape[0])

    @property
    def size(self) -> int:
        if self.is_linear:
            return self.q ** self.dimension
        return int(self.explicit_words.shape[0])

    @property
    def words(self) -> np.ndarray:
        """All codewords as an (N, n) array in canonical order."""
        if not self.is_linear:
            return self.explicit_words
        if self.size > MATERIALIZE_LIMIT:
            raise CodeError(f"refusing to materialize {self.size} codewords")
        ops = _ops(self.n, self.field)
        return _canonical(ops.to_words(_span(self.basis, ops, self.field)))

    @property
    def anchor_word(self) -> np.ndarray:
        if self.is_linear:
            return np.zeros(self.n, dtype=self.field.dtype)
        return self.explicit_words[self.anchor]

    @property
    def packed(self) -> bool:
        return self.q == 2 and self.n <= 64

    def contains(self, word: Sequence[int]) -> bool:
        w = check_word(word, self.q, self.n)
        if self.is_linear:
            stacked = np.vstack([self.basis, w[None, :]])
            return _basis_of(stacked, self.field).shape[0] == self.dimension
        return bool(np.any(np.all(self.explicit_words == w, axis=1)))


def _basis_of(rows: np.ndarray, fld: FieldSpec) -> np.ndarray:
    R, piv = rref(rows, fld)
    return R[: len(piv)].astype(fld.dtype)


def _span(rows: np.ndarray, ops, fld: FieldSpec):
    """Every combination of ``rows`` (by repeated doubling in message order)."""
    cur = ops.zero()
    for row in np.asarray(rows):
        g = ops.from_rows(row[None, :])
        g = g[0] if isinstance(ops, _Packed) else g
        parts = [cur]
        for a in fld.nonzero:
            parts.append(ops.add(cur, ops.scaled(g, a)))
        cur = ops.concat(parts)
    return cur


# -- low-weight enumeration for linear codes --


def _partition(basis: np.ndarray, fld: FieldSpec) -> list[tuple[list[int], np.ndarray]]:
    """Split coordinates into disjoint pivot sets.

    Stage j runs elimination with pivots restricted to the columns not used
    by earlier stages.  Its matrix has identity on the stage's pivot
    columns in the first ``len(pivots)`` rows; the remaining rows vanish on
    every unused column and span the kernel of the projection.
    """
    remaining = list(range(basis.shape[1]))
    stages = []
    while remaining:
        R, piv = rref(basis, fld, columns=remaining)
        if not piv:
            break
        stages.append((piv, R.astype(fld.dtype)))
        used = set(piv)
        remaining = [c for c in remaining if c not in used]
    return stages


def _ball(r: int, t: int, q: int) -> int:
    return sum(math.comb(r, i) * (q - 1) ** i for i in range(min(t, r) + 1)) if t >= 0 else 0


def _allocate(ranks: Sequence[int], k: int, q: int, w: int) -> tuple[list[int], int] | None:
    """Per-stage weight thresholds t_j with sum(t_j + 1) >= w + 1, greedy by marginal cost.

    Returns (thresholds, cost) or None when full enumeration is cheaper.
    """
    full = q**k
    t = [-1] * len(ranks)
    mult = [q ** (k - r) for r in ranks]
    units = w + 1
    for _ in range(units):
        best, best_inc = None, None
        for j, r in enumerate(ranks):
            if t[j] >= r:
                continue
            inc = (_ball(r, t[j] + 1, q) - _ball(r, t[j], q)) * mult[j]
            if best_inc is None or inc < best_inc:
                best, best_inc = j, inc
        if best is None:
            return None
        t[best] += 1
        if t[best] == ranks[best]:
            return None  # this stage alone enumerates everything
    cost = sum(_ball(r, tj, q) * m for r, tj, m in zip(ranks, t, mult))
    if cost >= full:
        return None
    return t, cost


def linear_enumeration_cost(k: int, n: int, q: int, w: int, ranks: Sequence[int] | None = None) -> int:
    """Vectors touched when listing codewords of weight <= w.

    ``ranks`` defaults to the generic partition (full-rank stages of size k,
    then the leftover coordinates).
    """
    if ranks is None:
        ranks, left = [], n
        while left > 0 and k > 0:
            r = min(k, left)
            ranks.append(r)
            left -= r
    plan = _allocate(ranks, k, q, w)
    return q**k if plan is None else plan[1]


def _combos_upto(rows, t: int, ops, fld: FieldSpec):
    """All combinations of at most t of ``rows`` with nonzero coefficients."""
    r = len(rows)
    levels = [ops.zero()]
    cur_v, cur_last = ops.zero(), np.array([-1])
    for _ in range(min(t, r)):
        parts, lasts = [], []
        for j in range(r):
            hi = int(np.searchsorted(cur_last, j, side="left"))
            if hi == 0:
                continue
            base = cur_v[:hi]
            for a in fld.nonzero:
                parts.append(ops.add(base, ops.scaled(rows[j], a)))
                lasts.append(np.full(hi, j))
        if not parts:
            break
        cur_v = ops.concat(parts)
        cur_last = np.concatenate(lasts)
        levels.append(cur_v)
    return ops.concat(levels)


def low_weight_codewords(code: CodeSample, w: int):
    """Distinct nonzero codewords of weight <= w of a linear code.

    Returns ``(vectors, weights, work)`` where vectors are packed or dense
    depending on the code and ``work`` counts vectors generated.  The search
    is exact: coordinates are split into disjoint pivot sets P_1, P_2, ...
    and a codeword of weight <= w must have weight <= t_j on some P_j when
    ``sum(t_j + 1) > w``; each stage lists those codewords directly.
    """
    if not code.is_linear:
        raise CodeError("low-weight enumeration needs a linear code")
    fld, ops = code.field, _ops(code.n, code.field)
    k = code.dimension
    if k == 0 or w <= 0:
        return ops.from_rows(np.zeros((0, code.n))), np.zeros(0, np.int64), 0
    w = min(w, code.n)
    stages = _partition(code.basis, fld)
    plan = _allocate([len(p) for p, _ in stages], k, fld.q, w)
    if plan is None:
        vecs = _span(code.basis, ops, fld)
        work = ops.length(vecs)
    else:
        thresholds, _ = plan
        found = []
        work = 0
        for (piv, R), t in zip(stages, thresholds):
            if t < 0:
                continue
            r = len(piv)
            pivot_rows = ops.from_rows(R[:r])
            low = _combos_upto(pivot_rows, t, ops, fld)
            if r < k:
                low = ops.combine(low, _span(R[r:], ops, fld))
            work += ops.length(low)
            wts = ops.weights(low)
            found.append(low[(wts > 0) & (wts <= w)])
        vecs = ops.concat(found)
    wts = ops.weights(vecs)
    vecs = ops.unique(vecs[(wts > 0) & (wts <= w)])
    return vecs, ops.weights(vecs), work


def weight_counts_upto(code: CodeSample, w: int) -> np.ndarray:
    """``counts[j]`` = number of codewords of weight j for j = 0..w (exact)."""
    _, wts, _ = low_weight_codewords(code, w)
    counts = np.bincount(wts, minlength=w + 1)[: w + 1].astype(np.int64)
    counts[0] = 1
    return counts


def cumulative_weight(code: CodeSample, d: int) -> int:
    """Number of nonzero codewords of weight <= d."""
    if d <= 0:
        return 0
    return int(weight_counts_upto(code, d)[1:].sum())


# -- explicit codes: pairwise distances --


def _block_plan(N: int, n: int, w: int):
    """Cheapest exact pigeonhole layout for pairs within distance w, or None for brute force."""
    best = None
    brute = N * (N - 1) // 2
    lo = max(1, -(-n // _MAX_BLOCK_BITS))
    for B in range(lo, min(n, w + 1) + 1):
        lens = [n // B + (1 if i < n % B else 0) for i in range(B)]
        extra = w + 1 - B
        radii = [extra // B + (1 if i < extra % B else 0) for i in range(B)]
        if any(rad >= ln for rad, ln in zip(radii, lens)):
            continue
        probes = sum(N * _ball(ln, rad, 2) for ln, rad in zip(lens, radii))
        cands = sum(N * _ball(ln, rad, 2) * N / 2.0 ** (ln + 1) for ln, rad in zip(lens, radii))
        # A bucket probe is a random access; measured at about 2.5 candidate checks.
        cost = 2.5 * probes + cands + sum(2**ln for ln in lens)
        if best is None or cost < best[0]:
            best = (cost, lens, radii)
    if best is None or best[0] >= brute:
        return None, brute
    return (best[1], best[2]), int(best[0])


def pair_search_cost(N: int, n: int, w: int, q: int = 2) -> int:
    """Word operations needed to count pairs within distance w among N words."""
    if q == 2 and n <= 64:
        return _block_plan(N, n, w)[1]
    return N * (N - 1) // 2 * n


def _nbr_masks(bits: int, radius: int) -> np.ndarray:
    out = [0]
    for rad in range(1, radius + 1):
        for pos in combinations(range(bits), rad):
            out.append(sum(1 << p for p in pos))
    return np.array(out, dtype=np.uint64)


def _packed_pair_hist(packed: np.ndarray, n: int, w: int) -> np.ndarray:
    hist = np.zeros(65, dtype=np.int64)
    N = packed.shape[0]
    if N < 2:
        return hist[: w + 1]
    plan, _ = _block_plan(N, n, w)
    if plan is None:
        if w >= n:
            _kernels.all_pairs_hist(packed, hist)
        else:
            _kernels.pairs_upto_hist(packed, w, hist)
        return hist[: w + 1]
    lens, radii = plan
    shifts, masks = [], []
    start = 0
    for ln in lens:
        shifts.append(start)
        masks.append((1 << ln) - 1)
        start += ln
    for b, (ln, rad) in enumerate(zip(lens, radii)):
        keys = ((packed >> np.uint64(shifts[b])) & np.uint64(masks[b])).astype(np.int64)
        # Order within a bucket is irrelevant; 16-bit keys get numpy's radix sort.
        order = np.argsort(keys.astype(np.uint16), kind="stable") if ln <= 16 else np.argsort(keys)
        offsets = np.zeros((1 << ln) + 1, dtype=np.int64)
        np.cumsum(np.bincount(keys, minlength=1 << ln), out=offsets[1:])
        _kernels.block_pass(
            packed[order], offsets, _nbr_masks(ln, rad).astype(np.int64), w,
            np.array(shifts[:b], dtype=np.uint64), np.array(masks[:b], dtype=np.uint64),
            np.array(radii[:b], dtype=np.int64), hist,
        )
    return hist[: w + 1]


def _dense_pair_hist(words: np.ndarray, w: int) -> np.ndarray:
    N, n = words.shape
    hist = np.zeros(n + 1, dtype=np.int64)
    chunk = max(1, (1 << 22) // max(1, N * n))
    for i0 in range(0, N, chunk):
        blk = words[i0: i0 + chunk]
        dist = np.count_nonzero(blk[:, None, :] != words[None, :, :], axis=2)
        rows = np.arange(i0, i0 + blk.shape[0])[:, None]
        cols = np.arange(N)[None, :]
        hist += np.bincount(dist[cols > rows], minlength=n + 1)[: n + 1]
    return hist[: w + 1]


def pair_counts_upto(code: CodeSample, w: int) -> np.ndarray:
    """``counts[j]`` = unordered codeword pairs at distance j, for j = 0..w."""
    w = min(w, code.n)
    if code.packed:
        packed = pack_binary(code.words)
        return _packed_pair_hist(packed, code.n, w)
    return _dense_pair_hist(np.asarray(code.words), w)


def cumulative_pairs(code: CodeSample, d: int) -> int:
    """Number of unordered codeword pairs at distance <= d."""
    if d <= 0:
        return 0
    return int(pair_counts_upto(code, d)[1:].sum())


# -- enumerator profiles --


@dataclass(frozen=True)
class EnumeratorProfile:
    """Per-distance counts ``counts[j]``, j = 0..n."""

    kind: str
    n: int
    counts: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def cumulative(self) -> tuple[int, ...]:
        """``cumulative[d] = sum_{j=1..d} counts[j]``; ``cumulative[0] = 0``."""
        out, acc = [0], 0
        for c in self.counts[1:]:
            acc += c
            out.append(acc)
        return tuple(out)


def cumulative_enumerator(profile: EnumeratorProfile, d: int) -> int:
    if d < 0 or d > profile.n:
        raise ValueError(f"d={d} outside [0, n={profile.n}]")
    return sum(profile.counts[1: d + 1])


def weight_distribution(code: CodeSample) -> EnumeratorProfile:
    """Weight distribution of a linear code by enumerating every codeword."""
    if not code.is_linear:
        if not np.any(np.all(code.explicit_words == 0, axis=1)):
            raise CodeError("weight distribution of an explicit code needs the zero word")
        counts = np.bincount(np.count_nonzero(code.explicit_words, axis=1), minlength=code.n + 1)
        return EnumeratorProfile(WEIGHT, code.n, tuple(int(c) for c in counts))
    ops = _ops(code.n, code.field)
    if code.size > MATERIALIZE_LIMIT:
        raise CodeError(f"refusing to enumerate {code.size} codewords")
    wts = ops.weights(_span(code.basis, ops, code.field))
    counts = np.bincount(wts, minlength=code.n + 1)
    return EnumeratorProfile(WEIGHT, code.n, tuple(int(c) for c in counts))


def distance_profile_about(code: CodeSample, center: Sequence[int] | None = None) -> EnumeratorProfile:
    """Distance enumerator with respect to one codeword (default: the anchor)."""
    c = code.anchor_word if center is None else check_word(center, code.q, code.n)
    words = code.words
    dist = np.count_nonzero(words != np.asarray(c, dtype=words.dtype)[None, :], axis=1)
    counts = np.bincount(dist, minlength=code.n + 1)
    return EnumeratorProfile(ABOUT_CODEWORD, code.n, tuple(int(x) for x in counts))


def pairwise_distance_distribution(code: CodeSample) -> EnumeratorProfile:
    if code.size < 2:
        raise CodeError("pairwise distances need at least two codewords")
    counts = pair_counts_upto(code, code.n)
    return EnumeratorProfile(PAIRWISE, code.n, tuple(int(x) for x in counts))


# -- distances and rate --


def min_distance(code: CodeSample) -> int:
    """Minimum distance (minimum nonzero weight for linear codes)."""
    if code.size < 2:
        raise CodeError("minimum distance needs at least two codewords")
    n = code.n
    if code.is_linear:
        w = 2
        while True:
            vecs, wts, _ = low_weight_codewords(code, min(w, n))
            if wts.size:
                return int(wts.min())
            if w >= n:
                raise AssertionError("a nonzero linear code has a codeword of weight <= n")
            w = min(n, w + 2)
    N = code.size
    # Start where a handful of close pairs are expected among N random words.
    w = 1
    while w < n and N * (N - 1) / 2 * _ball(n, w, code.q) / float(code.q) ** n < 2.0:
        w += 1
    while True:
        counts = pair_counts_upto(code, w)
        nz = np.flatnonzero(counts[1:])
        if nz.size:
            return int(nz[0]) + 1
        w = min(n, w + 2)


def relative_distance(code: CodeSample) -> float:
    return min_distance(code) / code.n


def code_rate(code: CodeSample) -> float:
    """``log_q |C| / n``."""
    if code.is_linear:
        return code.dimension / code.n
    return math.log(code.size) / (code.n * math.log(code.q))


# -- text serialization: header "q n k origin", then one codeword per line --

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def _format_word(word: Iterable[int], q: int) -> str:
    if q <= len(_DIGITS):
        return "".join(_DIGITS[int(s)] for s in word)
    return " ".join(str(int(s)) for s in word)


def _parse_word(line: str, q: int) -> list[int]:
    if q <= len(_DIGITS):
        return [_DIGITS.index(ch) for ch in line.strip()]
    return [int(tok) for tok in line.split()]


def write_code(code: CodeSample, dest: str | os.PathLike | TextIO) -> None:
    k = code.dimension if code.is_linear else code.nominal_k
    lines = [f"{code.q} {code.n} {k if k is not None else '-'} {code.origin}"]
    lines.extend(_format_word(w, code.q) for w in code.words)
    text = "\n".join(lines) + "\n"
    if isinstance(dest, (str, os.PathLike)):
        Path(dest).write_text(text)
    else:
        dest.write(text)


def read_code(src: str | os.PathLike | TextIO, fld: FieldSpec | None = None) -> CodeSample:
    if isinstance(src, (str, os.PathLike)):
        text = Path(src).read_text()
    else:
        text = src.read()
    lines = [ln for ln in io.StringIO(text).read().splitlines() if ln.strip()]
    if not lines:
        raise CodeError("empty code file")
    head = lines[0].split()
    if len(head) != 4:
        raise CodeError(f"bad header {lines[0]!r}; expected 'q n k origin'")
    q, n = int(head[0]), int(head[1])
    k = None if head[2] == "-" else int(head[2])
    origin = head[3]
    if origin not in (LINEAR, EXPLICIT):
        raise CodeError(f"unknown origin {origin!r}")
    words = np.array([_parse_word(ln, q) for ln in lines[1:]], dtype=np.int64)
    if words.ndim != 2 or words.shape[1] != n:
        raise CodeError("codeword lengths do not match the header")
    fld = fld or default_alphabet(q)
    if origin == LINEAR:
        code = CodeSample.from_basis(words, fld)
        if code.size != len(np.unique(words, axis=0)):
            raise CodeError("listed words are not a linear subspace")
        if k is not None and code.dimension != k:
            raise CodeError(f"header k={k} but the words span dimension {code.dimension}")
        return code
    return CodeSample.from_words(words, fld, nominal_k=k)
