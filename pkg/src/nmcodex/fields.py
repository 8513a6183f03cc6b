"""Finite fields GF(p^m) with p^m <= 2^16.

An element is an integer ``sum(c_i * p**i)`` where ``c_i`` is the coefficient
of ``alpha**i`` in the polynomial basis. Packed into bits it is written
big-endian, so for characteristic 2 the bit string of an element is simply
the binary expansion of its integer value (``alpha`` is ``10``).

Vectorized arithmetic over numpy arrays is provided for characteristic 2,
which is all the extractor and code pipelines need.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .bits import BitString

MAX_FIELD_SIZE = 1 << 16
TABLE_INVERSE_LIMIT = 256


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, math.isqrt(p) + 1))


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_divmod(a: Sequence[int], b: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    # little-endian coefficient lists over GF(p); b must be nonzero
    a = _trim(list(a))
    b = _trim(list(b))
    inv_lead = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        q[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        _trim(a)
    return q, a


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _poly_sub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2.

    ``coeffs`` is big-endian (leading coefficient first).
    """
    poly = list(reversed(coeffs))
    deg = len(_trim(list(poly))) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for low in range(p**d):
            divisor = [(low // p**i) % p for i in range(d)] + [1]
            if not _poly_divmod(poly, divisor, p)[1]:
                return False
    return True


def _default_polynomial(p: int, m: int) -> tuple[int, ...]:
    if m == 1:
        return (1, 0)
    for low in range(1, p**m):
        coeffs = (1,) + tuple((low // p**i) % p for i in reversed(range(m)))
        if is_irreducible(coeffs, p):
            return coeffs
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


@dataclass(frozen=True)
class FieldDescriptor:
    characteristic: int
    extension_degree: int
    reduction_polynomial: tuple[int, ...]

    def __post_init__(self):
        p, m, poly = self.characteristic, self.extension_degree, self.reduction_polynomial
        if not _is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if m < 1 or p**m > MAX_FIELD_SIZE:
            raise ValueError(f"GF({p}^{m}) is outside the supported range")
        if len(poly) != m + 1 or poly[0] != 1 or any(not 0 <= c < p for c in poly):
            raise ValueError(f"reduction polynomial {poly} is not monic of degree {m} over GF({p})")
        if m > 1 and not is_irreducible(poly, p):
            raise ValueError(f"reduction polynomial {poly} is reducible over GF({p})")

    def __repr__(self) -> str:
        return f"GF({self.characteristic}^{self.extension_degree})"

    @property
    def size(self) -> int:
        return self.characteristic**self.extension_degree

    @property
    def bits_per_element(self) -> int:
        return (self.size - 1).bit_length()

    @cached_property
    def _poly_int(self) -> int:
        # characteristic-2 reduction polynomial as a bit mask
        return int("".join(map(str, self.reduction_polynomial)), 2)

    def _digits(self, a: int) -> list[int]:
        p = self.characteristic
        return _trim([(a // p**i) % p for i in range(self.extension_degree)])

    def _undigits(self, d: Sequence[int]) -> int:
        p = self.characteristic
        return sum(c * p**i for i, c in enumerate(d))

    def check(self, a: int) -> int:
        if not 0 <= a < self.size:
            raise ValueError(f"{a} is not an element of {self!r}")
        return a

    def add(self, a: int, b: int) -> int:
        if self.characteristic == 2:
            return a ^ b
        if self.extension_degree == 1:
            return (a + b) % self.characteristic
        p = self.characteristic
        da, db = self._digits(a), self._digits(b)
        n = max(len(da), len(db))
        da += [0] * (n - len(da))
        db += [0] * (n - len(db))
        return self._undigits([(x + y) % p for x, y in zip(da, db)])

    def neg(self, a: int) -> int:
        if self.characteristic == 2:
            return a
        p = self.characteristic
        return self._undigits([(-c) % p for c in self._digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def _mul_slow(self, a: int, b: int) -> int:
        if self.characteristic == 2:
            m, poly = self.extension_degree, self._poly_int
            r = 0
            while b:
                if b & 1:
                    r ^= a
                b >>= 1
                a <<= 1
                if a >> m:
                    a ^= poly
            return r
        p = self.characteristic
        prod = _poly_mul(self._digits(a), self._digits(b), p)
        _, rem = _poly_divmod(prod, list(reversed(self.reduction_polynomial)), p)
        return self._undigits(rem)

    @cached_property
    def _log_tables(self) -> tuple[np.ndarray, np.ndarray]:
        """(exp, log) with respect to the smallest primitive element."""
        q = self.size
        order = q - 1
        factors = _prime_factors(order)
        for g in range(2 if q > 2 else 1, q):
            if all(self._pow_slow(g, order // r) != 1 for r in factors):
                break
        exp = np.zeros(2 * order, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        x = 1
        for i in range(order):
            exp[i] = x
            log[x] = i
            x = self._mul_slow(x, g)
        exp[order:] = exp[:order]
        return exp, log

    def _pow_slow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self._mul_slow(r, a)
            a = self._mul_slow(a, a)
            e >>= 1
        return r

    @cached_property
    def _mul_table(self) -> np.ndarray | None:
        if self.size > TABLE_INVERSE_LIMIT:
            return None
        exp, log = self._log_tables
        q = self.size
        a = np.arange(q)
        t = exp[log[a][:, None] + log[a][None, :]]
        t[0, :] = 0
        t[:, 0] = 0
        return t

    @cached_property
    def _inv_table(self) -> np.ndarray | None:
        if self.size > TABLE_INVERSE_LIMIT:
            return None
        exp, log = self._log_tables
        inv = np.zeros(self.size, dtype=np.int64)
        order = self.size - 1
        inv[1:] = exp[(order - log[1:]) % order]
        return inv

    def mul(self, a: int, b: int) -> int:
        t = self._mul_table
        if t is not None:
            return int(t[a, b])
        if a == 0 or b == 0:
            return 0
        exp, log = self._log_tables
        return int(exp[log[a] + log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"inverse of zero in {self!r}")
        t = self._inv_table
        if t is not None:
            return int(t[a])
        return self._inv_euclid(a)

    def _inv_euclid(self, a: int) -> int:
        p = self.characteristic
        r0, r1 = list(reversed(self.reduction_polynomial)), self._digits(a)
        s0, s1 = [], [1]
        while r1:
            q, r = _poly_divmod(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1, p), p)
        # r0 is a nonzero constant
        c = pow(r0[0], -1, p)
        return self._undigits([(x * c) % p for x in s0])

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    # vectorized characteristic-2 arithmetic

    def vmul(self, a, b):
        """Elementwise product of integer arrays (characteristic 2 only)."""
        if self.characteristic != 2:
            raise NotImplementedError("vectorized arithmetic is characteristic-2 only")
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        t = self._mul_table
        if t is not None:
            return t[a, b]
        exp, log = self._log_tables
        out = exp[log[a] + log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def elem(self, value: int) -> "FieldElem":
        return FieldElem(self, self.check(value))

    def zero(self) -> "FieldElem":
        return FieldElem(self, 0)

    def one(self) -> "FieldElem":
        return FieldElem(self, 1)

    def elements(self) -> list["FieldElem"]:
        return [FieldElem(self, v) for v in range(self.size)]


@functools.lru_cache(maxsize=None)
def gf(p: int, m: int = 1, poly: tuple[int, ...] | None = None) -> FieldDescriptor:
    """The field GF(p^m); without ``poly`` the smallest irreducible is used."""
    if poly is None:
        poly = _default_polynomial(p, m)
    return FieldDescriptor(p, m, tuple(poly))


def gf2(w: int) -> FieldDescriptor:
    return gf(2, w)


@dataclass(frozen=True)
class FieldElem:
    field: FieldDescriptor
    value: int

    def _other(self, other: "FieldElem") -> int:
        if not isinstance(other, FieldElem):
            return NotImplemented
        if other.field != self.field:
            raise ValueError(f"field mismatch: {self.field!r} vs {other.field!r}")
        return other.value

    def __add__(self, other):
        return FieldElem(self.field, self.field.add(self.value, self._other(other)))

    def __sub__(self, other):
        return FieldElem(self.field, self.field.sub(self.value, self._other(other)))

    def __mul__(self, other):
        return FieldElem(self.field, self.field.mul(self.value, self._other(other)))

    def __truediv__(self, other):
        return FieldElem(self.field, self.field.div(self.value, self._other(other)))

    def __neg__(self):
        return FieldElem(self.field, self.field.neg(self.value))

    def __pow__(self, e: int):
        return FieldElem(self.field, self.field.pow(self.value, e))

    def inverse(self) -> "FieldElem":
        return FieldElem(self.field, self.field.inv(self.value))

    def __bool__(self) -> bool:
        return self.value != 0

    def to_bits(self) -> BitString:
        return BitString(self.value, self.field.bits_per_element)


def field_add(a: FieldElem, b: FieldElem) -> FieldElem:
    return a + b


def field_mul(a: FieldElem, b: FieldElem) -> FieldElem:
    return a * b


def field_inv(a: FieldElem) -> FieldElem:
    return a.inverse()


def bits_to_field_vec(x: BitString, field: FieldDescriptor) -> list[FieldElem]:
    w = field.bits_per_element
    if x.length % w:
        raise ValueError(f"{x.length} bits do not divide into {w}-bit elements of {field!r}")
    pieces = x.split(*([w] * (x.length // w)))
    return [field.elem(piece.value) for piece in pieces]


def field_vec_to_bits(v: Sequence[FieldElem]) -> BitString:
    out = BitString(0, 0)
    for e in v:
        out = out + e.to_bits()
    return out
