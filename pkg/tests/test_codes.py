from __future__ import annotations

import io
import math
from itertools import combinations

import numpy as np
import pytest

from gvlab.codes import (
    CodeError,
    CodeSample,
    code_rate,
    cumulative_enumerator,
    cumulative_pairs,
    cumulative_weight,
    distance_profile_about,
    growth_rate,
    hamming_distance,
    hamming_weight,
    min_distance,
    pair_counts_upto,
    pairwise_distance_distribution,
    read_code,
    relative_distance,
    weight_counts_upto,
    weight_distribution,
    write_code,
)
from gvlab.field import default_alphabet
from gvlab.numerics import Params
from gvlab.samplers import SeedSpec, sample_general_injective, sample_linear_injective

GF2 = default_alphabet(2)
HAMMING_7_4 = np.array([
    [1, 0, 0, 0, 1, 1, 0],
    [0, 1, 0, 0, 1, 0, 1],
    [0, 0, 1, 0, 0, 1, 1],
    [0, 0, 0, 1, 1, 1, 1],
])


def repetition3() -> CodeSample:
    return CodeSample.from_basis(np.array([[1, 1, 1]]), GF2)


def brute_pairs(words: np.ndarray) -> np.ndarray:
    n = words.shape[1]
    counts = np.zeros(n + 1, dtype=np.int64)
    for i in range(words.shape[0] - 1):
        dist = np.count_nonzero(words[i + 1:] != words[i], axis=1)
        counts += np.bincount(dist, minlength=n + 1)
    return counts


def test_hamming_examples():
    a = [0, 1, 1, 0]
    assert hamming_distance(a, a) == 0
    assert hamming_weight(a) == 2
    assert hamming_distance([1, 2, 0], [1, 0, 2]) == 2
    with pytest.raises(ValueError):
        hamming_distance([0, 1], [0, 1, 1])


def test_repetition_code():
    code = repetition3()
    prof = weight_distribution(code)
    assert prof.counts == (1, 0, 0, 1)
    assert cumulative_enumerator(prof, 2) == 0
    assert cumulative_enumerator(prof, 3) == 1
    assert min_distance(code) == 3
    assert relative_distance(code) == 1.0
    with pytest.raises(ValueError):
        cumulative_enumerator(prof, 4)


def test_hamming_7_4():
    code = CodeSample.from_basis(HAMMING_7_4, GF2)
    prof = weight_distribution(code)
    assert prof.counts == (1, 0, 0, 7, 7, 0, 0, 1)
    assert cumulative_enumerator(prof, 3) == 7
    assert min_distance(code) == 3
    assert code_rate(code) == pytest.approx(4 / 7)


def test_any_4_2_code_has_four_words():
    code = CodeSample.from_generator(np.array([[1, 0], [0, 1], [1, 1], [0, 1]]), GF2)
    assert weight_distribution(code).total == 4


def test_pairwise_examples():
    two = CodeSample.from_words(np.array([[0, 0, 0], [1, 1, 1]]), GF2)
    prof = pairwise_distance_distribution(two)
    assert prof.counts[3] == 1 and prof.total == 1
    square = CodeSample.from_words(np.array([[0, 0], [0, 1], [1, 0], [1, 1]]), GF2)
    prof = pairwise_distance_distribution(square)
    assert prof.counts == (0, 4, 2)
    assert min_distance(square) == 1
    assert relative_distance(square) == 0.5
    single = CodeSample.from_words(np.array([[0, 1, 1]]), GF2)
    with pytest.raises(CodeError):
        pairwise_distance_distribution(single)
    with pytest.raises(CodeError):
        min_distance(single)


def test_weight_distribution_needs_zero_word():
    code = CodeSample.from_words(np.array([[0, 1], [1, 1]]), GF2)
    with pytest.raises(CodeError):
        weight_distribution(code)


def test_growth_rate_examples():
    assert growth_rate(0, 10, 2) == -math.inf
    assert growth_rate(1, 10, 2) == 0.0
    assert growth_rate(3**4, 12, 3) == pytest.approx(4 / 12)


def test_code_rate_examples():
    words = np.array([[0, 0, 0, 0], [1, 0, 1, 0], [1, 1, 1, 1]])
    assert code_rate(CodeSample.from_words(words, GF2)) == pytest.approx(math.log2(3) / 4)
    assert code_rate(CodeSample.from_words(words[:1], GF2)) == 0.0


@pytest.mark.parametrize("q, n, k", [(2, 12, 5), (2, 40, 14), (3, 10, 4), (4, 9, 3), (5, 8, 3), (7, 6, 2)])
def test_linear_enumeration_agrees_with_full_distribution(q, n, k):
    fld = default_alphabet(q)
    p = Params.from_k(q, n, k)
    for trial in range(4):
        code = sample_linear_injective(p, fld, SeedSpec(11, trial))
        full = weight_distribution(code)
        assert full.counts[0] == 1 and full.total == q**k
        assert all(c % (q - 1) == 0 for c in full.counts[1:])
        nonzero = [j for j, c in enumerate(full.counts) if j and c]
        assert min_distance(code) == nonzero[0]
        first = next(d for d in range(n + 1) if cumulative_enumerator(full, d) >= 1)
        assert first == nonzero[0]
        for w in (0, 1, n // 4, n // 2, n):
            assert list(weight_counts_upto(code, w)) == list(full.counts[: w + 1])
            assert cumulative_weight(code, w) == cumulative_enumerator(full, w)
        d = n // 3
        assert growth_rate(cumulative_weight(code, d), n, q) < p.r + 1e-12


@pytest.mark.parametrize("q, n, k", [(2, 20, 8), (2, 40, 10), (2, 64, 9), (3, 9, 3), (5, 7, 2)])
def test_pair_counts_agree_with_brute_force(q, n, k):
    p = Params.from_k(q, n, k)
    for trial in range(3):
        code = sample_general_injective(p, SeedSpec(5, trial))
        want = brute_pairs(code.words)
        for w in (1, n // 8, n // 4, n):
            assert list(pair_counts_upto(code, w)) == list(want[: w + 1])
        prof = pairwise_distance_distribution(code)
        assert prof.counts[0] == 0
        assert prof.total == code.size * (code.size - 1) // 2
        d = n // 4
        assert growth_rate(cumulative_pairs(code, d), n, q) < 2 * p.r + 1e-12


def test_blocked_pair_search_on_a_large_binary_code():
    # Large enough that the pigeonhole block search is chosen over brute force.
    code = sample_general_injective(Params.from_k(2, 48, 12), SeedSpec(3))
    want = brute_pairs(code.words)
    for w in (4, 8, 11):
        assert list(pair_counts_upto(code, w)) == list(want[: w + 1])


@pytest.mark.parametrize("q", [2, 3])
def test_pairwise_equals_half_sum_of_per_codeword_profiles(q):
    code = sample_general_injective(Params.from_k(q, 8, 3), SeedSpec(9))
    pair = pairwise_distance_distribution(code)
    for d in range(code.n + 1):
        per = sum(cumulative_enumerator(distance_profile_about(code, c), d) for c in code.words)
        assert 2 * cumulative_enumerator(pair, d) == per


def test_explicit_words_are_canonical_and_distinct():
    words = np.array([[1, 1, 0], [0, 0, 1], [1, 0, 0]])
    code = CodeSample.from_words(words, GF2)
    stored = [tuple(w) for w in code.words]
    assert stored == sorted(stored)
    assert len(set(stored)) == len(stored)


@pytest.mark.parametrize("q, linear", [(2, True), (3, True), (16, True), (2, False), (6, False), (20, False)])
def test_serialization_round_trip(q, linear):
    fld = default_alphabet(q)
    p = Params.from_k(q, 7, 2)
    code = sample_linear_injective(p, fld, SeedSpec(1)) if linear else sample_general_injective(p, SeedSpec(1), fld)
    buf = io.StringIO()
    write_code(code, buf)
    header = buf.getvalue().splitlines()[0].split()
    assert header[:3] == [str(q), "7", "2"]
    back = read_code(io.StringIO(buf.getvalue()))
    assert back.is_linear == code.is_linear
    assert np.array_equal(back.words, code.words)


def test_linear_code_contains_zero_and_is_closed():
    fld = default_alphabet(3)
    code = sample_linear_injective(Params.from_k(3, 6, 3), fld, SeedSpec(2))
    words = code.words.astype(np.int64)
    keys = {tuple(w) for w in words}
    assert (0,) * 6 in keys
    for a, b in combinations(range(0, len(words), 5), 2):
        assert tuple(np.asarray(fld.add(words[a], words[b]))) in keys
