"""Reed-Solomon evaluation codes.

Message symbols are polynomial coefficients, constant term first; the
codeword is the polynomial evaluated at the first ``code_len`` field
elements in canonical order (0, 1, alpha, alpha+1, ...).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bits import BitString
from .fields import FieldDescriptor, FieldElem


@dataclass(frozen=True)
class EccParams:
    field: FieldDescriptor
    message_len: int
    code_len: int

    def __post_init__(self):
        if not 1 <= self.message_len <= self.code_len <= self.field.size:
            raise ValueError(
                f"need 1 <= k={self.message_len} <= n={self.code_len} <= q={self.field.size}"
            )

    @property
    def relative_distance(self) -> Fraction:
        return Fraction(self.code_len - self.message_len + 1, self.code_len)

    @property
    def symbol_bits(self) -> int:
        return self.field.bits_per_element

    @property
    def message_bits(self) -> int:
        return self.message_len * self.symbol_bits


def ecc_encode(msg: Sequence[FieldElem], params: EccParams) -> list[FieldElem]:
    if len(msg) != params.message_len:
        raise ValueError(f"message has {len(msg)} symbols, expected {params.message_len}")
    F = params.field
    coeffs = []
    for c in msg:
        if c.field != F:
            raise ValueError(f"symbol from {c.field!r}, code is over {F!r}")
        coeffs.append(c.value)
    return [F.elem(_horner(F, coeffs, pt)) for pt in range(params.code_len)]


def _horner(F: FieldDescriptor, coeffs: Sequence[int], pt: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = F.add(F.mul(acc, pt), c)
    return acc


def pack_message(msg: BitString, params: EccParams) -> list[int]:
    """Big-endian symbols of ``msg`` zero-padded on the right to ``message_len`` symbols."""
    if msg.length > params.message_bits:
        raise ValueError(f"{msg.length}-bit message exceeds {params.message_bits} bits")
    w = params.symbol_bits
    padded = msg.pad_right(params.message_bits)
    return [p.value for p in padded.split(*([w] * params.message_len))]


def ecc_symbol_at(msg: BitString, r: int, params: EccParams) -> BitString:
    """Symbol ``r`` of the codeword of ``msg`` without building the whole codeword."""
    if not 0 <= r < params.code_len:
        raise IndexError(f"symbol index {r} out of range for length {params.code_len}")
    coeffs = pack_message(msg, params)
    return BitString(_horner(params.field, coeffs, r), params.symbol_bits)


def ecc_symbol_batch(msg, msg_bits: int, r, params: EccParams):
    """Vectorized ``ecc_symbol_at`` over integer arrays of messages and indices."""
    F = params.field
    w = params.symbol_bits
    msg = np.asarray(msg, dtype=np.uint64)
    r = np.asarray(r, dtype=np.int64)
    pad = params.message_bits - msg_bits
    if pad < 0:
        raise ValueError(f"{msg_bits}-bit message exceeds {params.message_bits} bits")
    padded = msg << np.uint64(pad)
    mask = np.uint64((1 << w) - 1)
    acc = np.zeros(np.broadcast(padded, r).shape, dtype=np.int64)
    # coefficient i sits at bit offset (k-1-i)*w; Horner from the top coefficient
    for i in reversed(range(params.message_len)):
        c = ((padded >> np.uint64((params.message_len - 1 - i) * w)) & mask).astype(np.int64)
        acc = F.vmul(acc, r) ^ c
    return acc.astype(np.uint64)
