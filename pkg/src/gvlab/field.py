"""Arithmetic over the code alphabet.

Three alphabet kinds are supported:

* ``prime-field``: GF(p), elements are the integers ``0..p-1``.
* ``extension-field``: GF(p^m) built from an irreducible polynomial over GF(p).
  An element is encoded as the integer whose base-``p`` digits are its
  polynomial coefficients (constant term first), so ``x`` in GF(4) is ``2``
  and ``x + 1`` is ``3``.  Multiplication goes through exp/log tables.
* ``plain-alphabet``: ``q`` symbols with equality only.  Anything that needs
  field structure raises :class:`FieldError`.

All arithmetic methods accept Python ints or numpy integer arrays and
broadcast like numpy ufuncs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

PRIME_FIELD = "prime-field"
EXTENSION_FIELD = "extension-field"
PLAIN_ALPHABET = "plain-alphabet"
KINDS = (PRIME_FIELD, EXTENSION_FIELD, PLAIN_ALPHABET)

# Irreducible polynomials, coefficients constant term first.
BUILTIN_POLYNOMIALS: dict[int, tuple[int, ...]] = {
    4: (1, 1, 1),  # x^2 + x + 1 over GF(2)
    8: (1, 1, 0, 1),  # x^3 + x + 1 over GF(2)
    9: (2, 1, 1),  # x^2 + x + 2 over GF(3)
    16: (1, 1, 0, 0, 1),  # x^4 + x + 1 over GF(2)
    25: (2, 1, 1),  # x^2 + x + 2 over GF(5)
    27: (1, 2, 0, 1),  # x^3 + 2x + 1 over GF(3)
}

MAX_ORDER = 1 << 16
_TABLE_LIMIT = 256


class FieldError(ValueError):
    """Invalid alphabet construction or an operation the alphabet cannot do."""


def is_prime(x: int) -> bool:
    if x < 2:
        return False
    if x % 2 == 0:
        return x == 2
    f = 3
    while f * f <= x:
        if x % f == 0:
            return False
        f += 2
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, m)`` with ``q == p**m`` or None if q is not a prime power."""
    for p in range(2, q + 1):
        if q % p == 0:
            if not is_prime(p):
                return None
            m, rest = 0, q
            while rest % p == 0:
                rest //= p
                m += 1
            return (p, m) if rest == 1 else None
    return None


# -- polynomial helpers over GF(p); coefficient lists, constant term first --


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = _poly_trim([c % p for c in a])
    b = _poly_trim([c % p for c in b])
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        factor = (a[-1] * inv_lead) % p
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - factor * c) % p
        _poly_trim(a)
    return a


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = _poly_trim([c % p for c in poly])
    deg = len(poly) - 1
    if deg < 1:
        return False
    for fd in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=fd):
            if not _poly_mod(poly, list(low) + [1], p):
                return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """An alphabet of size ``q``; immutable and safe to share between workers."""

    q: int
    kind: str
    p: int | None = None
    m: int = 1
    polynomial: tuple[int, ...] | None = None
    _exp: np.ndarray | None = field(default=None, repr=False, compare=False)
    _log: np.ndarray | None = field(default=None, repr=False, compare=False)
    _add_t: np.ndarray | None = field(default=None, repr=False, compare=False)
    _mul_t: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def is_field(self) -> bool:
        return self.kind != PLAIN_ALPHABET

    @property
    def dtype(self) -> type:
        return np.uint8 if self.q <= 256 else np.uint16

    @property
    def nonzero(self) -> range:
        return range(1, self.q)

    def require_field(self) -> None:
        if not self.is_field:
            raise FieldError(f"alphabet of size {self.q} is a plain alphabet; field arithmetic is undefined")

    # -- element arithmetic --

    def add(self, a, b):
        self.require_field()
        if self._add_t is not None:
            return _out(self._add_t[a, b])
        if self.kind == PRIME_FIELD:
            return _out((np.asarray(a, np.int64) + b) % self.q)
        if self.p == 2:
            return _out(np.bitwise_xor(a, b))
        return _out(self._digitwise(a, b, 1))

    def neg(self, a):
        self.require_field()
        if self.kind == PRIME_FIELD:
            return _out((-np.asarray(a, np.int64)) % self.q)
        if self.p == 2:
            return _out(np.asarray(a))
        return _out(self._digitwise(np.zeros_like(np.asarray(a)), a, -1))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        self.require_field()
        if self._mul_t is not None:
            return _out(self._mul_t[a, b])
        if self.kind == PRIME_FIELD:
            return _out((np.asarray(a, np.int64) * b) % self.q)
        a = np.asarray(a, np.int64)
        b = np.asarray(b, np.int64)
        e = self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return _out(np.where((a == 0) | (b == 0), 0, e))

    def inv(self, a):
        self.require_field()
        arr = np.asarray(a, np.int64)
        if np.any(arr == 0):
            raise ZeroDivisionError("0 has no multiplicative inverse")
        if self.kind == PRIME_FIELD:
            if arr.ndim == 0:
                return pow(int(arr), self.q - 2, self.q)
            return np.array([pow(int(x), self.q - 2, self.q) for x in arr.ravel()]).reshape(arr.shape)
        return _out(self._exp[(-self._log[arr]) % (self.q - 1)])

    def _digitwise(self, a, b, sign: int):
        a = np.asarray(a, np.int64)
        b = np.asarray(b, np.int64)
        out = np.zeros(np.broadcast(a, b).shape, np.int64)
        place = 1
        for _ in range(self.m):
            da = (a // place) % self.p
            db = (b // place) % self.p
            out = out + ((da + sign * db) % self.p) * place
            place *= self.p
        return out

    # -- vector helpers --

    def reduce_sum(self, arr: np.ndarray, axis: int = -1) -> np.ndarray:
        """Field sum along ``axis``."""
        self.require_field()
        arr = np.asarray(arr)
        if self.kind == PRIME_FIELD:
            return np.asarray(arr.astype(np.int64).sum(axis=axis) % self.q)
        if self.p == 2:
            return np.bitwise_xor.reduce(arr, axis=axis)
        arr = np.moveaxis(arr, axis, -1)
        acc = np.zeros(arr.shape[:-1], np.int64)
        for j in range(arr.shape[-1]):
            acc = self.add(acc, arr[..., j])
        return np.asarray(acc)


def _out(x):
    x = np.asarray(x)
    return int(x) if x.ndim == 0 else x


def _poly_element_mul(a: int, b: int, p: int, m: int, poly: Sequence[int]) -> int:
    da = [(a // p**i) % p for i in range(m)]
    db = [(b // p**i) % p for i in range(m)]
    prod = [0] * (2 * m - 1)
    for i, x in enumerate(da):
        if x:
            for j, y in enumerate(db):
                prod[i + j] = (prod[i + j] + x * y) % p
    rem = _poly_mod(prod, poly, p)
    return sum(c * p**i for i, c in enumerate(rem))


def field_make(q: int, kind: str = PRIME_FIELD, polynomial: Sequence[int] | None = None) -> FieldSpec:
    """Build an alphabet of size ``q``.

    ``polynomial`` lists coefficients constant term first and is only used for
    extension fields; it defaults to a built-in choice for q in 4, 8, 9, 16, 25, 27.
    """
    if kind not in KINDS:
        raise FieldError(f"unknown alphabet kind {kind!r}; expected one of {KINDS}")
    if q < 2:
        raise FieldError(f"alphabet size must be >= 2, got {q}")
    if q > MAX_ORDER:
        raise FieldError(f"alphabet size {q} exceeds the supported maximum {MAX_ORDER}")

    if kind == PLAIN_ALPHABET:
        return FieldSpec(q=q, kind=kind)

    if kind == PRIME_FIELD:
        if not is_prime(q):
            raise FieldError(f"q={q} is not prime; use kind={EXTENSION_FIELD!r} for prime powers")
        spec = FieldSpec(q=q, kind=kind, p=q, m=1)
        if q <= _TABLE_LIMIT:
            idx = np.arange(q, dtype=np.int64)
            add_t = ((idx[:, None] + idx[None, :]) % q).astype(spec.dtype)
            mul_t = ((idx[:, None] * idx[None, :]) % q).astype(spec.dtype)
            spec = FieldSpec(q=q, kind=kind, p=q, m=1, _add_t=add_t, _mul_t=mul_t)
        return spec

    pm = prime_power(q)
    if pm is None or pm[1] < 2:
        raise FieldError(f"q={q} is not a proper prime power p^m with m >= 2")
    p, m = pm
    if polynomial is None:
        if q not in BUILTIN_POLYNOMIALS:
            raise FieldError(f"no built-in irreducible polynomial for q={q}; pass one explicitly")
        polynomial = BUILTIN_POLYNOMIALS[q]
    poly = tuple(int(c) % p for c in polynomial)
    poly = tuple(_poly_trim(list(poly)))
    if len(poly) - 1 != m:
        raise FieldError(f"polynomial degree {len(poly) - 1} does not match m={m} for q={q}")
    if poly[-1] != 1:
        inv_lead = pow(poly[-1], p - 2, p)
        poly = tuple((c * inv_lead) % p for c in poly)
    if not is_irreducible(poly, p):
        raise FieldError(f"polynomial {poly} is reducible over GF({p})")

    # Find a generator of the multiplicative group; x itself need not be primitive.
    exp = log = None
    for g in range(2, q):
        powers = [1]
        cur = 1
        for _ in range(q - 2):
            cur = _poly_element_mul(cur, g, p, m, poly)
            if cur == 1:
                break
            powers.append(cur)
        if len(powers) == q - 1:
            exp = np.array(powers + powers[:1], dtype=np.int64)
            log = np.zeros(q, dtype=np.int64)
            log[exp[:-1]] = np.arange(q - 1)
            break
    assert exp is not None, "a finite field always has a primitive element"

    spec = FieldSpec(q=q, kind=kind, p=p, m=m, polynomial=poly, _exp=exp, _log=log)
    if q <= _TABLE_LIMIT:
        idx = np.arange(q, dtype=np.int64)
        add_t = np.asarray(spec.add(idx[:, None], idx[None, :])).astype(spec.dtype)
        mul_t = np.asarray(spec.mul(idx[:, None], idx[None, :])).astype(spec.dtype)
        spec = FieldSpec(q=q, kind=kind, p=p, m=m, polynomial=poly, _exp=exp, _log=log, _add_t=add_t, _mul_t=mul_t)
    return spec


def default_alphabet(q: int) -> FieldSpec:
    """Field of order q when one exists (built-in polynomial), else a plain alphabet."""
    if is_prime(q):
        return field_make(q, PRIME_FIELD)
    if q in BUILTIN_POLYNOMIALS:
        return field_make(q, EXTENSION_FIELD)
    return field_make(q, PLAIN_ALPHABET)


# -- matrices: 2-D numpy arrays of field elements, row-major --


def rref(mat: np.ndarray, fld: FieldSpec, columns: Sequence[int] | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over the field.

    Pivots are searched only in ``columns`` (in the given order); row
    operations still act on the full width.  Returns a new matrix and the
    pivot columns; pivot row ``i`` has a 1 in ``pivots[i]`` and zeros in that
    column elsewhere.
    """
    fld.require_field()
    R = np.array(mat, dtype=np.int64, copy=True)
    if R.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    rows, cols = R.shape
    if columns is None:
        columns = range(cols)
    pivots: list[int] = []
    r = 0
    for c in columns:
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        lead = int(R[r, c])
        if lead != 1:
            R[r] = fld.mul(fld.inv(lead), R[r])
        factors = R[:, c].copy()
        factors[r] = 0
        hit = np.flatnonzero(factors)
        if hit.size:
            R[hit] = fld.sub(R[hit], fld.mul(factors[hit, None], R[r][None, :]))
        pivots.append(int(c))
        r += 1
    return R, pivots


def mat_rank(mat: np.ndarray, fld: FieldSpec) -> int:
    """Rank over the field; the input is not modified."""
    mat = np.asarray(mat)
    if mat.size == 0:
        return 0
    return len(rref(mat, fld)[1])


def mat_apply(mat: np.ndarray, msg: Sequence[int], fld: FieldSpec) -> np.ndarray:
    """Matrix-vector product ``mat @ msg`` over the field (mat is n x k)."""
    fld.require_field()
    mat = np.asarray(mat, dtype=np.int64)
    msg = np.asarray(msg, dtype=np.int64)
    if mat.ndim != 2 or msg.ndim != 1 or mat.shape[1] != msg.shape[0]:
        raise ValueError(f"dimension mismatch: matrix {mat.shape} vs message {msg.shape}")
    if np.any(msg >= fld.q) or np.any(msg < 0):
        raise ValueError("message symbols must lie in [0, q)")
    return np.asarray(fld.reduce_sum(fld.mul(mat, msg[None, :]), axis=1), dtype=np.int64)


def check_word(word: Sequence[int], q: int, n: int | None = None) -> np.ndarray:
    arr = np.asarray(word, dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError("a word is a 1-D symbol sequence")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"word length {arr.shape[0]} != n={n}")
    if arr.size and (arr.min() < 0 or arr.max() >= q):
        raise ValueError(f"word symbols must lie in [0, {q})")
    return arr
