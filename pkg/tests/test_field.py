from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gvlab.field import (
    EXTENSION_FIELD,
    PLAIN_ALPHABET,
    PRIME_FIELD,
    FieldError,
    default_alphabet,
    field_make,
    mat_apply,
    mat_rank,
    rref,
)

FIELD_ORDERS = (2, 3, 4, 5, 7, 8, 9, 11, 13, 16)


def test_gf2_characteristic_two():
    f = field_make(2, PRIME_FIELD)
    assert int(f.add(1, 1)) == 0


def test_gf4_product_of_x_with_itself():
    f = field_make(4, EXTENSION_FIELD, polynomial=[1, 1, 1])  # x^2 + x + 1
    x, x_plus_1 = 2, 3
    assert int(f.mul(x, x)) == x_plus_1
    assert int(f.inv(x)) == x_plus_1


def test_gf5_examples():
    f = field_make(5)
    assert int(f.add(3, 4)) == 2
    assert int(f.inv(2)) == 3


@pytest.mark.parametrize("q, kind, poly", [
    (4, PRIME_FIELD, None),
    (1, PRIME_FIELD, None),
    (4, EXTENSION_FIELD, [1, 0, 1]),  # x^2 + 1 = (x + 1)^2 over GF(2)
    (6, EXTENSION_FIELD, None),
])
def test_field_make_rejects(q, kind, poly):
    with pytest.raises(FieldError):
        field_make(q, kind, polynomial=poly)


def test_inverse_of_zero_is_an_error():
    with pytest.raises(ZeroDivisionError):
        field_make(7).inv(0)


def test_plain_alphabet_has_no_arithmetic():
    f = field_make(6, PLAIN_ALPHABET)
    assert not f.is_field
    with pytest.raises(FieldError):
        f.add(1, 2)
    with pytest.raises(FieldError):
        mat_rank(np.eye(2, dtype=int), f)


def test_default_alphabet_kinds():
    assert default_alphabet(7).kind == PRIME_FIELD
    assert default_alphabet(9).kind == EXTENSION_FIELD
    assert default_alphabet(6).kind == PLAIN_ALPHABET


@pytest.mark.parametrize("q", FIELD_ORDERS)
def test_field_axioms_on_full_grid(q):
    f = default_alphabet(q)
    a, b, c = np.meshgrid(np.arange(q), np.arange(q), np.arange(q), indexing="ij")
    add, mul = f.add, f.mul
    assert np.array_equal(add(a, b), add(b, a))
    assert np.array_equal(mul(a, b), mul(b, a))
    assert np.array_equal(add(add(a, b), c), add(a, add(b, c)))
    assert np.array_equal(mul(mul(a, b), c), mul(a, mul(b, c)))
    assert np.array_equal(mul(a, add(b, c)), add(mul(a, b), mul(a, c)))
    e = np.arange(q)
    assert np.array_equal(add(e, 0), e)
    assert np.array_equal(mul(e, 1), e)
    assert np.all(add(e, f.neg(e)) == 0)
    nz = np.arange(1, q)
    assert np.all(mul(nz, f.inv(nz)) == 1)


def test_rank_examples():
    f2, f3 = field_make(2), field_make(3)
    assert mat_rank(np.eye(2, dtype=int), f2) == 2
    assert mat_rank(np.zeros((3, 2), dtype=int), f3) == 0
    assert mat_rank(np.array([[1, 1], [1, 1], [0, 1]]), f2) == 2


def test_rank_leaves_input_untouched():
    m = np.array([[1, 2], [2, 1]])
    before = m.copy()
    mat_rank(m, field_make(3))
    assert np.array_equal(m, before)


def test_rref_pivots_are_unit_columns():
    f = default_alphabet(9)
    rng = np.random.default_rng(1)
    m = rng.integers(0, 9, size=(4, 7))
    R, piv = rref(m, f)
    for i, c in enumerate(piv):
        col = np.zeros(R.shape[0], dtype=int)
        col[i] = 1
        assert np.array_equal(R[:, c], col)


def test_mat_apply_examples():
    f = field_make(2)
    m = np.array([[1, 0], [1, 1], [0, 1]])
    assert np.array_equal(mat_apply(m, [0, 0], f), [0, 0, 0])
    assert np.array_equal(mat_apply(m, [1, 1], f), m[:, 0] ^ m[:, 1])
    f5 = field_make(5)
    assert np.array_equal(mat_apply(np.eye(3, dtype=int), [4, 2, 3], f5), [4, 2, 3])
    with pytest.raises(ValueError):
        mat_apply(m, [1, 0, 1], f)


@settings(max_examples=60, deadline=None)
@given(q=st.sampled_from(FIELD_ORDERS), seed=st.integers(0, 2**32 - 1))
def test_mat_apply_is_linear(q, seed):
    f = default_alphabet(q)
    rng = np.random.default_rng(seed)
    n, k = rng.integers(1, 8, size=2)
    m = rng.integers(0, q, size=(n, k))
    u, v = rng.integers(0, q, size=(2, k))
    alpha = int(rng.integers(0, q))
    lhs = mat_apply(m, np.asarray(f.add(f.mul(alpha, u), v), dtype=np.int64), f)
    rhs = f.add(f.mul(alpha, mat_apply(m, u, f)), mat_apply(m, v, f))
    assert np.array_equal(lhs, rhs)


@settings(max_examples=60, deadline=None)
@given(q=st.sampled_from(FIELD_ORDERS), seed=st.integers(0, 2**32 - 1))
def test_rank_invariant_under_row_operations(q, seed):
    f = default_alphabet(q)
    rng = np.random.default_rng(seed)
    rows, cols = rng.integers(1, 7, size=2)
    m = rng.integers(0, q, size=(rows, cols))
    # bias towards rank deficiency with a repeated row
    if rows > 1:
        m[-1] = m[0]
    r = mat_rank(m, f)
    assert r <= min(rows, cols)
    perm = rng.permutation(rows)
    assert mat_rank(m[perm], f) == r
    scale = rng.integers(1, q, size=rows)
    assert mat_rank(np.asarray(f.mul(scale[:, None], m), dtype=np.int64), f) == r
