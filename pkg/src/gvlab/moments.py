"""Exact moments of the low-weight and close-pair counts.

``X`` is the number of nonzero codewords of weight <= d in a random linear
code (uniform over injective linear maps ``F^k -> F^n``); ``Y`` is the
number of unordered codeword pairs at distance <= d in a random code
(uniform over injective maps).  All exact values are ``Fraction``s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from .field import FieldSpec, default_alphabet, mat_rank
from .numerics import GENERAL, LINEAR, Params, ball_volume_exact, gv_bound, limit_constant

SUBCRITICAL = "subcritical"
CRITICAL = "critical"
SUPERCRITICAL = "supercritical"


def _check(q: int, n: int, k: int, d: int) -> int:
    if q < 2 or n < 1 or not 0 <= k <= n or not 0 <= d <= n:
        raise ValueError(f"invalid (q, n, k, d) = {(q, n, k, d)}")
    return ball_volume_exact(n, d, q)


def linear_first_moment(q: int, n: int, k: int, d: int) -> Fraction:
    """``E(X) = (q^k - 1)(V_q(n,d) - 1)/(q^n - 1)``."""
    V = _check(q, n, k, d)
    return Fraction((q**k - 1) * (V - 1), q**n - 1)


def linear_conditional_moment(q: int, n: int, k: int, d: int) -> Fraction:
    """``E(X | a fixed nonzero message is low weight) = (q-1) + (q^k-q)(V-q)/(q^n-q)``.

    The scalar multiples of the fixed codeword contribute ``q - 1``; any
    message outside their line maps to a word uniform on the ``q^n - q``
    words off that line, of which ``V - q`` are light.
    """
    V = _check(q, n, k, d)
    if q**n <= q:
        raise ValueError("need n >= 2 for the conditional moment")
    return (q - 1) + Fraction((q**k - q) * (V - q), q**n - q)


def linear_second_moment(q: int, n: int, k: int, d: int) -> Fraction:
    """``E(X^2) = E(X) * E(X | one light codeword)``."""
    return linear_first_moment(q, n, k, d) * linear_conditional_moment(q, n, k, d)


def linear_ratio_bounds(q: int, n: int, k: int, d: int) -> tuple[float, float]:
    """``1 <= E(X^2)/E(X)^2 < (q-1)/E(X) + 1``."""
    e = linear_first_moment(q, n, k, d)
    return 1.0, math.inf if e == 0 else float((q - 1) / e + 1)


def pair_count(q: int, k: int) -> int:
    """``K = q^k (q^k - 1) / 2``, the number of unordered message pairs."""
    return q**k * (q**k - 1) // 2


def pairwise_first_moment(q: int, n: int, k: int, d: int) -> Fraction:
    """``E(Y) = K (V_q(n,d) - 1)/(q^n - 1)``."""
    V = _check(q, n, k, d)
    return Fraction(pair_count(q, k) * (V - 1), q**n - 1)


def pairwise_second_moment_bounds(q: int, n: int, k: int, d: int) -> tuple[float, float]:
    """``1 <= E(Y^2)/E(Y)^2 < 1/E(Y) + 1`` (no exact value is claimed)."""
    e = pairwise_first_moment(q, n, k, d)
    return 1.0, math.inf if e == 0 else float(1 / e + 1)


def regime(params: Params, ensemble: str = LINEAR, tol: float = 1e-9) -> str:
    """Sign of ``r - r_delta`` (linear) or ``2r - r_delta`` (pairwise)."""
    scale = _scale(ensemble)
    diff = scale * params.r - gv_bound(params.delta, params.q)
    if abs(diff) <= tol:
        return CRITICAL
    return SUPERCRITICAL if diff > 0 else SUBCRITICAL


def _scale(ensemble: str) -> int:
    if ensemble == LINEAR:
        return 1
    if ensemble == GENERAL:
        return 2
    raise ValueError(f"ensemble must be {LINEAR!r} or {GENERAL!r}, got {ensemble!r}")


def asymptotic_first_moment_log(params: Params, ensemble: str = LINEAR) -> float:
    """Approximate ``log_q`` of the first moment from the limit constant of beta_n."""
    scale = _scale(ensemble)
    q, n = params.q, params.n
    lq = math.log(q)
    c = limit_constant(params.delta, q)
    if ensemble == GENERAL:
        c /= 2.0
    return (scale * params.r - gv_bound(params.delta, q)) * n - 0.5 * math.log(n) / lq + math.log(c) / lq


@dataclass(frozen=True)
class MomentReport:
    ensemble: str
    e_first: Fraction
    e_second: Fraction | None
    ratio_bound_low: float
    ratio_bound_high: float
    regime: str

    @property
    def e_first_float(self) -> float:
        return float(self.e_first)

    @property
    def e_second_float(self) -> float | None:
        return None if self.e_second is None else float(self.e_second)

    @property
    def ratio(self) -> Fraction | None:
        """Exact ``E(X^2)/E(X)^2`` when the second moment is known."""
        if self.e_second is None or self.e_first == 0:
            return None
        return self.e_second / self.e_first**2


def moment_report(params: Params, ensemble: str = LINEAR) -> MomentReport:
    q, n, k, d = params.q, params.n, params.k, params.d
    if ensemble == LINEAR:
        low, high = linear_ratio_bounds(q, n, k, d)
        return MomentReport(LINEAR, linear_first_moment(q, n, k, d), linear_second_moment(q, n, k, d),
                            low, high, regime(params, LINEAR))
    low, high = pairwise_second_moment_bounds(q, n, k, d)
    return MomentReport(GENERAL, pairwise_first_moment(q, n, k, d), None, low, high, regime(params, GENERAL))


# -- exhaustive oracles for tiny parameters --


def _all_words(q: int, n: int) -> np.ndarray:
    return np.array(list(product(range(q), repeat=n)), dtype=np.int64)


def exhaustive_linear_moments(q: int, n: int, k: int, d: int,
                              fld: FieldSpec | None = None) -> tuple[Fraction, Fraction, int]:
    """Average ``X`` and ``X^2`` over every injective linear map ``F^k -> F^n``.

    A map is an ordered basis: the images of the k unit vectors, linearly
    independent.  Returns ``(E(X), E(X^2), number_of_maps)``.
    """
    fld = fld or default_alphabet(q)
    fld.require_field()
    words = _all_words(q, n)[1:]
    msgs = _all_words(q, k)[1:]
    s1 = s2 = count = 0
    for idx in product(range(len(words)), repeat=k):
        G = words[list(idx)]  # k x n, rows are images of unit vectors
        if mat_rank(G, fld) < k:
            continue
        code = fld.reduce_sum(fld.mul(msgs[:, :, None], G[None, :, :]), axis=1)
        x = int(np.count_nonzero(np.count_nonzero(code, axis=1) <= d))
        s1 += x
        s2 += x * x
        count += 1
    return Fraction(s1, count), Fraction(s2, count), count


def exhaustive_pairwise_moments(q: int, n: int, k: int, d: int) -> tuple[Fraction, Fraction, int]:
    """Average ``Y`` and ``Y^2`` over every injective map ``F^k -> F^n``.

    ``Y`` depends only on the image, and each q^k-subset is the image of the
    same number of maps, so averaging over subsets is exact.
    """
    words = _all_words(q, n)
    dist = np.count_nonzero(words[:, None, :] != words[None, :, :], axis=2)
    close = dist <= d
    s1 = s2 = count = 0
    for subset in combinations(range(len(words)), q**k):
        sub = close[np.ix_(subset, subset)]
        y = (int(sub.sum()) - len(subset)) // 2
        s1 += y
        s2 += y * y
        count += 1
    return Fraction(s1, count), Fraction(s2, count), count
