from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from gvlab.numerics import (
    AREA_I,
    AREA_II,
    AREA_II_PRIME,
    AREA_III,
    GENERAL,
    LINEAR,
    Params,
    ball_volume_exact,
    beta_estimate,
    beta_exact,
    classify_region,
    delta0,
    entropy_q,
    exact_scaled_beta_log,
    gv_bound,
    gv_distance,
    kl_divergence,
    limit_constant,
    round_half_up,
    scaled_beta_limit,
    scaled_round,
)


def test_kl_examples():
    assert kl_divergence(0.5, 0.5, 2) == pytest.approx(0.0, abs=1e-15)
    assert kl_divergence(0.0, 0.3, 2) == pytest.approx(math.log2(1 / 0.7), abs=1e-12)
    assert kl_divergence(0.25, 0.5, 2) == pytest.approx(1 - entropy_q(0.25, 2), abs=1e-12)
    assert kl_divergence(0.25, 0.5, 2) == pytest.approx(0.18872, abs=1e-5)


def test_kl_rejects_out_of_range():
    with pytest.raises(ValueError):
        kl_divergence(1.2, 0.5, 2)
    with pytest.raises(ValueError):
        kl_divergence(0.2, -0.1, 2)


@pytest.mark.parametrize("q", [2, 3, 4, 7])
def test_entropy_endpoints(q):
    assert entropy_q(0.0, q) == 0.0
    assert entropy_q(delta0(q), q) == pytest.approx(1.0, abs=1e-12)
    assert gv_bound(0.0, q) == pytest.approx(1.0)
    assert gv_bound(delta0(q), q) == pytest.approx(0.0, abs=1e-12)


def test_entropy_and_gv_values():
    assert entropy_q(0.2, 2) == pytest.approx(0.72193, abs=1e-5)
    assert gv_bound(0.2, 2) == pytest.approx(0.27807, abs=1e-5)
    assert gv_bound(0.3, 2) == pytest.approx(0.11871, abs=1e-5)
    with pytest.raises(ValueError):
        gv_bound(0.6, 2)


def test_gv_distance_values():
    assert gv_distance(1.0, 2) == 0.0
    assert gv_distance(0.0, 3) == pytest.approx(delta0(3))
    assert gv_distance(0.5, 2) == pytest.approx(0.11003, abs=1e-5)
    with pytest.raises(ValueError):
        gv_distance(1.5, 2)
    with pytest.raises(ValueError):
        gv_distance(0.5, 2, tol=0.0)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_kl_convex_with_unique_zero(q):
    d0 = delta0(q)
    xs = np.linspace(0.0, 1.0, 401)
    vals = np.array([kl_divergence(x, d0, q) for x in xs])
    mid = np.array([kl_divergence((a + b) / 2, d0, q) for a, b in zip(xs[:-2], xs[2:])])
    assert np.all(mid <= (vals[:-2] + vals[2:]) / 2 + 1e-9)
    assert vals.min() >= -1e-12
    assert abs(xs[np.argmin(vals)] - d0) <= 1.0 / 400


@pytest.mark.parametrize("q", [2, 3, 4])
def test_gv_monotone_and_inverse(q):
    d0 = delta0(q)
    grid = np.arange(1e-3, d0, 1e-3)
    vals = np.array([gv_bound(x, q) for x in grid])
    assert np.all(np.diff(vals) < 0)
    for x in grid[::25]:
        assert gv_distance(gv_bound(x, q), q) == pytest.approx(x, abs=1e-8)


def test_ball_volume_examples():
    assert ball_volume_exact(9, 0, 3) == 1
    assert ball_volume_exact(3, 1, 2) == 4
    assert ball_volume_exact(10, 2, 2) == 56
    assert ball_volume_exact(5, 5, 3) == 3**5
    with pytest.raises(ValueError):
        ball_volume_exact(3, 4, 2)


def test_beta_exact_examples():
    assert beta_exact(2, 1, 2).exact == Fraction(3, 4)
    assert beta_exact(6, 6, 3).exact == 1
    assert beta_exact(4, 1, 2).exact == Fraction(5, 16)
    with pytest.raises(ValueError):
        beta_exact(4, 5, 2)


def test_beta_log_matches_exact_rational():
    for q in (2, 3):
        for n in range(1, 201, 7):
            for d in range(0, n + 1, max(1, n // 9)):
                est = beta_exact(n, d, q)
                want = (math.log(est.exact_numerator) - math.log(est.exact_denominator)) / math.log(q)
                assert est.exact_log_q == pytest.approx(want, abs=1e-10)


def test_limit_constant_diverges_at_delta0():
    with pytest.raises(ValueError):
        limit_constant(0.5, 2)


def test_asymptotic_ratio_converges():
    assert beta_estimate(8192, 0.25, 2).ratio == pytest.approx(1.0, abs=0.02)


@pytest.mark.parametrize("delta, r", [(0.2, 0.1), (0.2, 0.5), (0.1, 0.3), (0.3, 0.05), (0.3, 0.25)])
def test_scaled_beta_sign_agrees_with_exact(delta, r):
    diverges = r > gv_bound(delta, 2)
    for n in (50, 100, 200):
        approx = scaled_beta_limit(n, r, delta, 2)
        exact = exact_scaled_beta_log(n, r, delta, 2)
        assert (approx > 0) == diverges
        assert (exact > 0) == diverges


def test_scaled_beta_limit_direction():
    lo = [scaled_beta_limit(n, 0.1, 0.2, 2) for n in (100, 1000, 10000)]
    hi = [scaled_beta_limit(n, 0.5, 0.2, 2) for n in (100, 1000, 10000)]
    assert lo[0] > lo[1] > lo[2]
    assert hi[0] < hi[1] < hi[2]


def test_classify_region_examples():
    assert classify_region(0.3, 0.05, 2, LINEAR) == AREA_I
    assert classify_region(0.3, 0.2, 2, LINEAR) == AREA_II
    assert classify_region(0.3, 0.1, 2, GENERAL) == AREA_II_PRIME
    assert classify_region(0.3, 0.45, 2, LINEAR) == AREA_III
    with pytest.raises(ValueError):
        classify_region(0.3, 1.5, 2)


def test_half_up_rounding():
    assert round_half_up(2.5) == 3
    assert round_half_up(3.5) == 4
    assert scaled_round(0.25, 10) == 3  # 2.5 rounds up
    assert scaled_round(3 / 14, 14) == 3


def test_params_make_and_from_k():
    p = Params.make(2, 48, 0.2, 0.5)
    assert (p.d, p.k) == (10, 24)
    p = Params.from_k(2, 14, 5, 3)
    assert (p.k, p.d) == (5, 3)
