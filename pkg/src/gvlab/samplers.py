"""Seeded random code ensembles.

Four ensembles are provided:

* ``linear-injective``: image of a uniformly random rank-k ``n x k`` matrix.
* ``linear-full``: image of a uniformly random ``n x k`` matrix (any rank).
* ``general-injective``: ``q^k`` distinct words drawn without replacement.
* ``general-full``: ``q^k`` independent uniform words; the code is the
  image set, so it may be smaller than ``q^k``.

Randomness
----------
Every trial owns a Philox-4x64 stream (``numpy.random.Philox``) whose
128-bit key is ``(splitmix64(master_seed ^ splitmix64(cell_id)),
splitmix64(trial_index))`` with the counter starting at zero.  A trial's
code is therefore a pure function of ``(master_seed, cell_id, trial_index)``
and does not depend on which process or in which order it is drawn.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .codes import CodeSample, unique_rows
from .field import FieldSpec, default_alphabet
from .numerics import Params

LINEAR_INJECTIVE = "linear-injective"
LINEAR_FULL = "linear-full"
GENERAL_INJECTIVE = "general-injective"
GENERAL_FULL = "general-full"
ENSEMBLES = (LINEAR_INJECTIVE, LINEAR_FULL, GENERAL_INJECTIVE, GENERAL_FULL)
LINEAR_ENSEMBLES = (LINEAR_INJECTIVE, LINEAR_FULL)
FULL_ENSEMBLES = (LINEAR_FULL, GENERAL_FULL)

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One output of the SplitMix64 mixer for state ``x``."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    trial_index: int = 0
    cell_id: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed <= _MASK64:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if self.trial_index < 0:
            raise ValueError("trial_index must be non-negative")

    def key(self) -> tuple[int, int]:
        k0 = splitmix64(self.master_seed ^ splitmix64(self.cell_id & _MASK64))
        return k0, splitmix64(self.trial_index & _MASK64)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=np.array(self.key(), dtype=np.uint64)))


def _check(params: Params) -> None:
    if not 1 <= params.k < params.n:
        raise ValueError(f"need 1 <= k < n, got k={params.k}, n={params.n}")


def _field_for(params: Params, fld: FieldSpec | None) -> FieldSpec:
    fld = fld or default_alphabet(params.q)
    if fld.q != params.q:
        raise ValueError(f"alphabet has q={fld.q} but params have q={params.q}")
    return fld


def sample_linear_injective(params: Params, fld: FieldSpec | None, seed: SeedSpec) -> CodeSample:
    """Uniform rank-k generator by rejection; the code is its column span."""
    _check(params)
    fld = _field_for(params, fld)
    fld.require_field()
    rng = seed.generator()
    rejected = 0
    while True:
        gen = rng.integers(0, fld.q, size=(params.n, params.k), dtype=np.int64)
        code = CodeSample.from_generator(gen, fld)
        if code.dimension == params.k:
            return CodeSample(field=fld, n=code.n, origin=code.origin, basis=code.basis,
                              generator=code.generator, nominal_k=params.k, rejections=rejected)
        rejected += 1


def sample_linear_full(params: Params, fld: FieldSpec | None, seed: SeedSpec) -> CodeSample:
    """Uniform ``n x k`` generator; the image may have dimension below k."""
    _check(params)
    fld = _field_for(params, fld)
    fld.require_field()
    gen = seed.generator().integers(0, fld.q, size=(params.n, params.k), dtype=np.int64)
    return CodeSample.from_generator(gen, fld)


def _draw_words(rng: np.random.Generator, count: int, n: int, q: int) -> np.ndarray:
    return rng.integers(0, q, size=(count, n), dtype=np.uint8 if q <= 256 else np.uint16)


def _first_occurrences(words: np.ndarray) -> np.ndarray:
    _, idx = unique_rows(words, return_index=True)
    return words[np.sort(idx)]


def sample_general_injective(params: Params, seed: SeedSpec, fld: FieldSpec | None = None) -> CodeSample:
    """``q^k`` distinct uniform words, drawn in sequence with repeats rejected.

    The first drawn word plays the role of the image of the zero message.
    """
    _check(params)
    fld = _field_for(params, fld)
    rng = seed.generator()
    target = params.q**params.k
    words = _first_occurrences(_draw_words(rng, target, params.n, params.q))
    rejected = target - words.shape[0]
    while words.shape[0] < target:
        extra = _draw_words(rng, target - words.shape[0], params.n, params.q)
        merged = _first_occurrences(np.concatenate([words, extra]))
        rejected += words.shape[0] + extra.shape[0] - merged.shape[0]
        words = merged
    code = CodeSample.from_words(words, fld, nominal_k=params.k, anchor_word=words[0])
    return CodeSample(field=fld, n=code.n, origin=code.origin, explicit_words=code.explicit_words,
                      nominal_k=params.k, anchor=code.anchor, rejections=rejected)


def sample_general_full(params: Params, seed: SeedSpec, fld: FieldSpec | None = None) -> CodeSample:
    """Image of ``q^k`` independent uniform words (duplicates collapse)."""
    _check(params)
    fld = _field_for(params, fld)
    words = _draw_words(seed.generator(), params.q**params.k, params.n, params.q)
    return CodeSample.from_words(words, fld, nominal_k=params.k, anchor_word=words[0])


def sample(ensemble: str, params: Params, seed: SeedSpec, fld: FieldSpec | None = None) -> CodeSample:
    """Draw one code from the named ensemble."""
    table: dict[str, Callable[[], CodeSample]] = {
        LINEAR_INJECTIVE: lambda: sample_linear_injective(params, fld, seed),
        LINEAR_FULL: lambda: sample_linear_full(params, fld, seed),
        GENERAL_INJECTIVE: lambda: sample_general_injective(params, seed, fld),
        GENERAL_FULL: lambda: sample_general_full(params, seed, fld),
    }
    if ensemble not in table:
        raise ValueError(f"unknown ensemble {ensemble!r}; expected one of {ENSEMBLES}")
    return table[ensemble]()


def full_rank_probability(q: int, n: int, k: int) -> float:
    """Probability that a uniform ``n x k`` matrix over GF(q) has rank k."""
    p = 1.0
    for i in range(k):
        p *= 1.0 - float(q) ** (i - n)
    return p


def expected_image_size(q: int, n: int, k: int) -> float:
    """Mean number of distinct words among ``q^k`` uniform draws from ``F^n``."""
    total = float(q) ** n
    return total * -np.expm1(q**k * np.log1p(-1.0 / total))
