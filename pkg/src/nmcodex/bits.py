"""Fixed-width bit strings.

Bits are stored most-significant-first: bit 0 of a ``BitString`` is the
highest bit of its integer value. The empty string is valid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class BitString:
    value: int
    length: int

    def __post_init__(self):
        if self.length < 0:
            raise ValueError(f"negative length {self.length}")
        if not 0 <= self.value < (1 << self.length):
            raise ValueError(f"value {self.value} does not fit in {self.length} bits")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitString":
        v = 0
        n = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"not a bit: {b!r}")
            v = (v << 1) | b
            n += 1
        return cls(v, n)

    @classmethod
    def from_str(cls, s: str) -> "BitString":
        return cls.from_bits(int(c) for c in s)

    @classmethod
    def zeros(cls, length: int) -> "BitString":
        return cls(0, length)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.length - 1 - i)) & 1 for i in range(self.length))

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> int:
        if not -self.length <= i < self.length:
            raise IndexError(i)
        i %= self.length
        return (self.value >> (self.length - 1 - i)) & 1

    def __add__(self, other: "BitString") -> "BitString":
        return BitString((self.value << other.length) | other.value, self.length + other.length)

    def __xor__(self, other: "BitString") -> "BitString":
        if other.length != self.length:
            raise ValueError("xor of bit strings with different lengths")
        return BitString(self.value ^ other.value, self.length)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))

    def prefix(self, d: int) -> "BitString":
        return prefix(self, d)

    def split(self, *lengths: int) -> tuple["BitString", ...]:
        """Cut into consecutive pieces; the lengths must sum to ``len(self)``."""
        if sum(lengths) != self.length:
            raise ValueError(f"pieces {lengths} do not cover {self.length} bits")
        out = []
        rest = self.length
        for n in lengths:
            rest -= n
            out.append(BitString((self.value >> rest) & ((1 << n) - 1), n))
        return tuple(out)

    def pad_right(self, length: int) -> "BitString":
        if length < self.length:
            raise ValueError("cannot pad to a shorter length")
        return BitString(self.value << (length - self.length), length)

    def weight(self) -> int:
        return self.value.bit_count()

    def to_hex(self) -> str:
        return to_hex(self)

    @classmethod
    def from_hex(cls, s: str) -> "BitString":
        return from_hex(s)


def prefix(x: BitString, d: int) -> BitString:
    """The first ``d`` bits of ``x``."""
    if not 0 <= d <= x.length:
        raise IndexError(f"prefix length {d} out of range for {x.length}-bit string")
    return BitString(x.value >> (x.length - d), d)


def to_hex(x: BitString) -> str:
    """``<bit-length>:<hex>``; a trailing partial nibble is zero-padded on the right."""
    nibbles = -(-x.length // 4)
    if nibbles == 0:
        return f"{x.length}:"
    v = x.value << (4 * nibbles - x.length)
    return f"{x.length}:{v:0{nibbles}x}"


def from_hex(s: str) -> BitString:
    try:
        head, payload = s.strip().split(":", 1)
        length = int(head)
    except ValueError:
        raise ValueError(f"malformed hex bit string {s!r}") from None
    if length < 0:
        raise ValueError(f"malformed hex bit string {s!r}")
    nibbles = -(-length // 4)
    if len(payload) != nibbles:
        raise ValueError(f"expected {nibbles} hex digits for {length} bits, got {payload!r}")
    if nibbles == 0:
        return BitString(0, 0)
    try:
        v = int(payload, 16)
    except ValueError:
        raise ValueError(f"malformed hex bit string {s!r}") from None
    pad = 4 * nibbles - length
    if v & ((1 << pad) - 1):
        raise ValueError(f"nonzero padding bits in {s!r}")
    return BitString(v >> pad, length)
