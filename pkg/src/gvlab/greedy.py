"""Greedy sphere-covering constructions meeting the finite Gilbert-Varshamov bound.

Words of ``F^n`` are encoded as integers with coordinate 0 as the most
significant base-q digit, so lexicographic order is integer order.  A flat
boolean array over all ``q^n`` words tracks which words are covered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .codes import CodeSample, code_rate, min_distance
from .field import FieldSpec, default_alphabet
from .numerics import ball_volume_exact, delta0, gv_bound
from .samplers import SeedSpec

MAX_SPACE = 1 << 26
LEX = "lex"
PERM = "perm"


class GreedyError(ValueError):
    pass


class SpaceCeilingExceeded(RuntimeError):
    """``q^n`` is too large for the covered-set bitmap."""


@dataclass(frozen=True)
class GreedyReport:
    code: CodeSample
    d: int
    covering_verified: bool
    gv_lower: int
    achieved_size: int

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def q(self) -> int:
        return self.code.q


def gv_lower(n: int, d: int, q: int) -> int:
    """``ceil(q^n / V_q(n, d))``."""
    V = ball_volume_exact(n, d, q)
    return -(-(q**n) // V)


def _check_space(n: int, q: int, d: int) -> None:
    if n < 1 or q < 2:
        raise GreedyError(f"need n >= 1 and q >= 2, got n={n}, q={q}")
    if not 0 <= d <= n:
        raise GreedyError(f"d={d} outside [0, n={n}]")
    if q**n > MAX_SPACE:
        raise SpaceCeilingExceeded(f"q^n = {q}^{n} exceeds the covered-set ceiling of 2^26 words")


def _powers(n: int, q: int) -> np.ndarray:
    return q ** np.arange(n - 1, -1, -1, dtype=np.int64)


def _decode(codes: np.ndarray, n: int, q: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    return (codes[:, None] // _powers(n, q)[None, :]) % q


class _Ball:
    """Integer codes of every word within distance d of a centre.

    Error patterns are generated once: a pattern is a set of at most d
    positions with a nonzero shift at each.
    The neighbour of ``c`` is ``c`` with the symbol at each position ``i``
    replaced by ``(c_i + s_i) mod q``.
    """

    def __init__(self, n: int, q: int, d: int):
        self.n, self.q = n, q
        pos, shift = [], []
        for size in range(1, d + 1):
            for where in combinations(range(n), size):
                for vals in product(range(1, q), repeat=size):
                    pos.append(where)
                    shift.append(vals)
        self.size = len(pos) + 1
        self.weights = _powers(n, q)
        if q == 2:
            masks = [0] + [int(sum(1 << (n - 1 - i) for i in where)) for where in pos]
            self.masks = np.array(masks, dtype=np.int64)
        else:
            self.masks = None
            self.err = np.zeros((len(pos) + 1, n), dtype=np.int64)
            for row, (where, vals) in enumerate(zip(pos, shift), start=1):
                self.err[row, list(where)] = vals

    def around(self, centre: int) -> np.ndarray:
        if self.masks is not None:
            return np.bitwise_xor(self.masks, centre)
        digits = (centre // self.weights) % self.q
        return ((digits[None, :] + self.err) % self.q) @ self.weights

    def around_many(self, centres: np.ndarray) -> np.ndarray:
        centres = np.asarray(centres, dtype=np.int64)
        if self.masks is not None:
            return np.bitwise_xor(self.masks[None, :], centres[:, None]).ravel()
        return np.concatenate([self.around(int(c)) for c in centres])


def _order(n: int, q: int, order: str, seed: int | None) -> np.ndarray | None:
    if order == LEX:
        return None
    if order == PERM:
        rng = SeedSpec(0 if seed is None else int(seed)).generator()
        return rng.permutation(q**n).astype(np.int64)
    raise GreedyError(f"order must be {LEX!r} or {PERM!r}, got {order!r}")


def _next_uncovered(covered: np.ndarray, seq: np.ndarray | None, pos: int, chunk: int = 1 << 16) -> tuple[int, int]:
    """Position (in visiting order) and word code of the next uncovered word, or (-1, -1)."""
    total = covered.shape[0]
    while pos < total:
        stop = min(total, pos + chunk)
        window = covered[pos:stop] if seq is None else covered[seq[pos:stop]]
        hit = np.flatnonzero(~window)
        if hit.size:
            at = pos + int(hit[0])
            return at, at if seq is None else int(seq[at])
        pos = stop
    return -1, -1


def greedy_code(n: int, q: int, d: int, order: str = LEX, seed: int | None = None,
                fld: FieldSpec | None = None) -> GreedyReport:
    """Visit ``F^n`` in order and keep each word at distance > d from all kept words."""
    _check_space(n, q, d)
    fld = fld or default_alphabet(q)
    seq = _order(n, q, order, seed)
    ball = _Ball(n, q, d)
    covered = np.zeros(q**n, dtype=bool)
    chosen = []
    pos = 0
    while True:
        pos, word = _next_uncovered(covered, seq, pos)
        if pos < 0:
            break
        chosen.append(word)
        covered[ball.around(word)] = True
    words = _decode(np.array(chosen), n, q)
    code = CodeSample.from_words(words, fld)
    return GreedyReport(code, d, verify_covering(code, d), gv_lower(n, d, q), code.size)


def greedy_linear_code(n: int, q: int, d: int, fld: FieldSpec | None = None) -> GreedyReport:
    """Grow a basis greedily: add the first word outside every radius-d ball around the span.

    Scalar multiples and sums of span elements stay in the span, so that
    condition makes every nonzero word of the enlarged span heavier than d.
    """
    _check_space(n, q, d)
    fld = fld or default_alphabet(q)
    fld.require_field()
    ball = _Ball(n, q, d)
    covered = np.zeros(q**n, dtype=bool)
    span = np.zeros((1, n), dtype=np.int64)  # current span as digit rows
    weights = _powers(n, q)
    covered[ball.around(0)] = True
    basis = []
    pos = 0
    while True:
        pos, word = _next_uncovered(covered, None, pos)
        if pos < 0:
            break
        v = _decode(np.array([word]), n, q)[0]
        basis.append(v)
        new = [np.asarray(fld.add(span, fld.mul(a, v)[None, :]), dtype=np.int64) for a in fld.nonzero]
        new = np.concatenate(new)
        covered[ball.around_many(new @ weights)] = True
        span = np.concatenate([span, new])
    if basis:
        code = CodeSample.from_basis(np.array(basis), fld)
    else:
        code = CodeSample.from_basis(np.zeros((1, n), dtype=np.int64), fld)
    return GreedyReport(code, d, verify_covering(code, d), gv_lower(n, d, q), code.size)


def verify_covering(code: CodeSample, d: int) -> bool:
    """Exhaustively check that every word of ``F^n`` lies within distance d of the code."""
    n, q = code.n, code.q
    if q**n > MAX_SPACE:
        raise SpaceCeilingExceeded("covering check needs q^n <= 2^26")
    words = code.words
    N = words.shape[0]
    if q**n * N <= 1 << 24:
        # Brute force: distance from every word of the space to every codeword.
        space = _decode(np.arange(q**n), n, q)
        best = np.full(q**n, n + 1, dtype=np.int64)
        for c in words.astype(np.int64):
            best = np.minimum(best, np.count_nonzero(space != c[None, :], axis=1))
        return bool(best.max() <= d)
    ball = _Ball(n, q, d)
    covered = np.zeros(q**n, dtype=bool)
    codes = words.astype(np.int64) @ _powers(n, q)
    for start in range(0, N, 4096):
        covered[ball.around_many(codes[start: start + 4096])] = True
    return bool(covered.all())


@dataclass(frozen=True)
class RateCheck:
    rate: float
    finite_bound: float
    gv_asymptotic: float
    margin: float
    meets_finite_bound: bool


def finite_gv_rate_check(report: GreedyReport) -> RateCheck:
    """Compare the achieved rate with ``log_q(ceil(q^n/V))/n`` and with ``GV_q(d/n)``.

    The finite comparison is exact: it checks ``|C| >= ceil(q^n / V_q(n, d))``.
    """
    n, q, d = report.n, report.q, report.d
    rate = code_rate(report.code)
    bound = math.log(report.gv_lower) / (n * math.log(q))
    rel = d / n
    gv = gv_bound(rel, q) if rel < delta0(q) else 0.0
    return RateCheck(rate, bound, gv, rate - gv, report.achieved_size >= report.gv_lower)


def verify_min_distance(report: GreedyReport) -> bool:
    """Independent check that the code's minimum distance exceeds d."""
    if report.code.size < 2:
        return True
    return min_distance(report.code) > report.d
