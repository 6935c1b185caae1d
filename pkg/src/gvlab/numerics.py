"""Closed-form Gilbert-Varshamov quantities.

KL-divergence, q-ary entropy, the asymptotic GV bound and its inverse,
exact Hamming-ball volumes, the binomial tail ``beta_n(delta)`` together
with its asymptotic estimate, and the (delta, r) region classifier.

Logs of enumerators are returned in base ``q`` unless a name says otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

NEG_INF = float("-inf")

LINEAR = "linear"
GENERAL = "general"

AREA_I = "I"
AREA_II = "II"
AREA_II_PRIME = "II'"
AREA_II_DOUBLE = "II''"
AREA_III = "III"


def delta0(q: int) -> float:
    """Upper end of the relative-distance range, ``1 - 1/q``."""
    _check_q(q)
    return 1.0 - 1.0 / q


def _check_q(q: int) -> None:
    if int(q) != q or q < 2:
        raise ValueError(f"q must be an integer >= 2, got {q!r}")


def round_half_up(x) -> int:
    """Nearest integer, exact .5 ties rounded up.

    Floats are taken at their shortest decimal repr, so ``0.3 * 48`` is
    evaluated as 14.4 rather than a binary approximation of it.
    """
    if isinstance(x, float):
        x = Decimal(repr(x))
    elif isinstance(x, Fraction):
        return math.floor(x + Fraction(1, 2))
    return int(Decimal(x).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def scaled_round(frac: float, n: int) -> int:
    """``round_half_up(frac * n)`` with the product formed exactly."""
    return round_half_up(Fraction(Decimal(repr(float(frac)))) * n)


@dataclass(frozen=True)
class Params:
    """(q, n, delta, r) with the derived integers d and k."""

    q: int
    n: int
    delta: float
    r: float
    d: int
    k: int

    @classmethod
    def make(cls, q: int, n: int, delta: float, r: float) -> "Params":
        _check_q(q)
        if n < 2:
            raise ValueError(f"n must be >= 2, got {n}")
        d0 = delta0(q)
        if not 0.0 < delta < d0:
            raise ValueError(f"delta={delta} outside (0, {d0})")
        if not 0.0 < r < 1.0:
            raise ValueError(f"r={r} outside (0, 1)")
        d = scaled_round(delta, n)
        k = scaled_round(r, n)
        if not 1 <= d <= n:
            raise ValueError(f"d=round(delta*n)={d} outside [1, n] (delta={delta}, n={n})")
        if not 1 <= k < n:
            raise ValueError(f"k=round(r*n)={k} outside [1, n) (r={r}, n={n})")
        return cls(q=q, n=n, delta=float(delta), r=float(r), d=d, k=k)

    @classmethod
    def from_k(cls, q: int, n: int, k: int, d: int = 1) -> "Params":
        """Params with the integers given directly (delta = d/n, r = k/n)."""
        _check_q(q)
        if not 1 <= k < n:
            raise ValueError(f"k={k} outside [1, n) for n={n}")
        if not 0 <= d <= n:
            raise ValueError(f"d={d} outside [0, n] for n={n}")
        return cls(q=q, n=n, delta=d / n, r=k / n, d=d, k=k)

    @property
    def delta0(self) -> float:
        return delta0(self.q)


def kl_divergence(p: float, p_prime: float, q: int) -> float:
    """q-ary KL divergence ``D_q(p || p')`` with ``0 log 0 = 0`` and ``0 log 0/0 = 0``."""
    _check_q(q)
    for name, v in (("p", p), ("p_prime", p_prime)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name}={v} outside [0, 1]")
    total = 0.0
    for a, b in ((p, p_prime), (1.0 - p, 1.0 - p_prime)):
        if a == 0.0:
            continue
        if b == 0.0:
            return math.inf
        total += a * math.log(a / b)
    return max(total / math.log(q), 0.0)


def entropy_q(delta: float, q: int) -> float:
    """q-ary entropy ``H_q(delta)``."""
    _check_q(q)
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta={delta} outside [0, 1]")
    h = 0.0
    if delta > 0.0:
        h += delta * math.log(q - 1) - delta * math.log(delta)
    if delta < 1.0:
        h -= (1.0 - delta) * math.log(1.0 - delta)
    return h / math.log(q)


def gv_bound(delta: float, q: int) -> float:
    """Asymptotic GV bound ``GV_q(delta) = D_q(delta || delta0)``."""
    d0 = delta0(q)
    if not 0.0 <= delta <= d0:
        raise ValueError(f"delta={delta} outside [0, {d0}]")
    if delta == d0:
        return 0.0
    return kl_divergence(delta, d0, q)


def gv_distance(r: float, q: int, tol: float = 1e-12) -> float:
    """GV distance: the x in (0, delta0) with ``GV_q(x) = r``, by bisection.

    ``r = 1`` maps to 0 and ``r = 0`` to delta0.
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"r={r} outside [0, 1]")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    d0 = delta0(q)
    if r == 1.0:
        return 0.0
    if r == 0.0:
        return d0
    lo, hi = 0.0, d0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if gv_bound(mid, q) > r:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def plotkin_line(delta: float, q: int) -> float:
    """Asymptotic Plotkin rate ``1 - delta/delta0`` (boundary of Area III)."""
    return max(0.0, 1.0 - delta / delta0(q))


def ball_volume_exact(n: int, d: int, q: int) -> int:
    """``V_q(n, d) = sum_{i<=d} C(n, i) (q-1)^i`` as an exact integer."""
    _check_q(q)
    if d < 0 or d > n:
        raise ValueError(f"radius d={d} outside [0, n={n}]")
    total = 0
    term = 1  # C(n, i) (q-1)^i
    for i in range(d + 1):
        total += term
        term = term * (n - i) * (q - 1) // (i + 1)
    return total


def log_ball_volume(n: int, d: int, q: int) -> float:
    """Natural log of V_q(n, d) by log-space summation around the largest term."""
    _check_q(q)
    if d < 0 or d > n:
        raise ValueError(f"radius d={d} outside [0, n={n}]")
    lq1 = math.log(q - 1) if q > 2 else 0.0

    def log_term(i: int) -> float:
        return math.lgamma(n + 1) - math.lgamma(i + 1) - math.lgamma(n - i + 1) + i * lq1

    # Terms increase up to the mode (q-1)(n+1)/q, then decrease.
    mode = min(d, int((q - 1) * (n + 1) // q))
    top = log_term(mode)
    acc = 0.0
    for i in range(mode, -1, -1):
        x = log_term(i) - top
        acc += math.exp(x)
        if x < -60.0:
            break
    for i in range(mode + 1, d + 1):
        x = log_term(i) - top
        acc += math.exp(x)
        if x < -60.0:
            break
    return top + math.log(acc)


@dataclass(frozen=True)
class BetaEstimate:
    n: int
    d: int
    q: int
    exact_log_q: float
    exact_numerator: int | None
    exact_denominator: int | None
    asym_log_q: float | None

    @property
    def exact(self) -> Fraction | None:
        if self.exact_numerator is None:
            return None
        return Fraction(self.exact_numerator, self.exact_denominator)

    @property
    def ratio(self) -> float | None:
        """``beta_exact / beta_asymptotic``."""
        if self.asym_log_q is None:
            return None
        return float(self.q) ** (self.exact_log_q - self.asym_log_q)


def beta_exact(n: int, d: int, q: int, exact: bool = True) -> BetaEstimate:
    """``beta_n = V_q(n, d) / q^n``.

    The log is always computed in log space; the big-integer pair is skipped
    when ``exact`` is False (useful for very large n).
    """
    if d < 0 or d > n:
        raise ValueError(f"radius d={d} outside [0, n={n}]")
    log_q = (log_ball_volume(n, d, q) - n * math.log(q)) / math.log(q)
    num = den = None
    if exact:
        num = ball_volume_exact(n, d, q)
        den = q**n
    return BetaEstimate(n=n, d=d, q=q, exact_log_q=min(log_q, 0.0), exact_numerator=num,
                        exact_denominator=den, asym_log_q=None)


def limit_constant(delta: float, q: int) -> float:
    """``c(delta) = sqrt(1-delta) / ((1 - delta/delta0) sqrt(2 pi delta))``."""
    d0 = delta0(q)
    if not 0.0 < delta < d0:
        raise ValueError(f"delta={delta} outside (0, {d0}); the constant diverges at delta0")
    return math.sqrt(1.0 - delta) / ((1.0 - delta / d0) * math.sqrt(2.0 * math.pi * delta))


def beta_asymptotic(n: int, delta: float, q: int) -> float:
    """log_q of the asymptotic estimate ``-n D - 1/2 log_q n + log_q c(delta)``."""
    c = limit_constant(delta, q)
    lq = math.log(q)
    return -n * gv_bound(delta, q) - 0.5 * math.log(n) / lq + math.log(c) / lq


def beta_estimate(n: int, delta: float, q: int, exact: bool = True) -> BetaEstimate:
    """Exact and asymptotic beta together, with d = round(delta n)."""
    d = scaled_round(delta, n)
    est = beta_exact(n, d, q, exact=exact)
    return BetaEstimate(n=est.n, d=est.d, q=q, exact_log_q=est.exact_log_q,
                        exact_numerator=est.exact_numerator, exact_denominator=est.exact_denominator,
                        asym_log_q=beta_asymptotic(n, delta, q))


def scaled_beta_limit(n: int, r: float, delta: float, q: int) -> float:
    """log_q of ``q^{rn} beta_n(delta)`` from the asymptotic estimate.

    The linear coefficient ``r - D_q(delta||delta0)`` decides the limit:
    positive means the product diverges, otherwise it tends to 0.
    """
    if not 0.0 < r < 1.0:
        raise ValueError(f"r={r} outside (0, 1)")
    c = limit_constant(delta, q)
    lq = math.log(q)
    return (r - gv_bound(delta, q)) * n - 0.5 * math.log(n) / lq + math.log(c) / lq


def exact_scaled_beta_log(n: int, r: float, delta: float, q: int) -> float:
    """log_q of ``q^{rn} V_q(n, d) / q^n`` with d = round(delta n), computed exactly."""
    d = scaled_round(delta, n)
    return r * n + beta_exact(n, d, q, exact=False).exact_log_q


def classify_region(delta: float, r: float, q: int, ensemble: str = LINEAR) -> str:
    """Which area of the (delta, r) rectangle a point falls in.

    Linear codes: I on or below the GV curve, III above the Plotkin line, II
    between.  General codes split at half the GV curve: I, II' up to GV,
    II'' up to Plotkin, III above.
    """
    d0 = delta0(q)
    if not 0.0 < delta < d0:
        raise ValueError(f"delta={delta} outside (0, {d0})")
    if not 0.0 < r < 1.0:
        raise ValueError(f"r={r} outside (0, 1)")
    gv = gv_bound(delta, q)
    upper = plotkin_line(delta, q)
    if ensemble == LINEAR:
        if r <= gv:
            return AREA_I
        return AREA_III if r > upper else AREA_II
    if ensemble == GENERAL:
        if r <= 0.5 * gv:
            return AREA_I
        if r <= gv:
            return AREA_II_PRIME
        return AREA_III if r > upper else AREA_II_DOUBLE
    raise ValueError(f"ensemble must be {LINEAR!r} or {GENERAL!r}, got {ensemble!r}")
