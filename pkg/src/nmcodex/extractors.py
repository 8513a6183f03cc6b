"""Inner-product two-source extractor and Toeplitz-hashing seeded extractors.

Functions whose names end in ``_words`` accept plain integers or numpy
``uint64`` arrays holding big-endian bit strings, so the same code serves a
single evaluation and an exhaustive sweep over every input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .bits import BitString
from .fields import FieldDescriptor

MAX_SCAN_POINTS = 1 << 20


def parity(v):
    if isinstance(v, (int, np.integer)):
        return int(v).bit_count() & 1
    return (np.bitwise_count(v) & np.uint8(1)).astype(np.uint64)


def _u(v):
    # Python ints stay ints; anything array-like becomes uint64
    if isinstance(v, (int, np.integer)):
        return int(v)
    return np.asarray(v, dtype=np.uint64)


def _c(v: int, like):
    return v if isinstance(like, int) else np.uint64(v)


# --- inner product -------------------------------------------------------


@dataclass(frozen=True)
class IpSpec:
    field: FieldDescriptor
    block_count: int

    def __post_init__(self):
        if self.field.characteristic != 2:
            raise ValueError("inner product is defined over GF(2^m)")
        if self.block_count < 1:
            raise ValueError("need at least one block")

    @property
    def symbol_bits(self) -> int:
        return self.field.bits_per_element

    @property
    def input_bits(self) -> int:
        return self.block_count * self.symbol_bits


def ip_words(x, y, spec: IpSpec):
    x, y = _u(x), _u(y)
    F, w = spec.field, spec.symbol_bits
    mask = (1 << w) - 1
    scalar = isinstance(x, int) and isinstance(y, int)
    acc = 0 if scalar else np.zeros(np.broadcast(x, y).shape, dtype=np.uint64)
    for i in range(spec.block_count):
        shift = (spec.block_count - 1 - i) * w
        xi = (x >> _c(shift, x)) & _c(mask, x)
        yi = (y >> _c(shift, y)) & _c(mask, y)
        if scalar:
            acc ^= F.mul(xi, yi)
        else:
            acc ^= F.vmul(xi, yi).astype(np.uint64)
    return acc


def ip(x: BitString, y: BitString, spec: IpSpec) -> BitString:
    """Sum of blockwise products over GF(2^m), returned as an m-bit string."""
    n = spec.input_bits
    if x.length != n or y.length != n:
        raise ValueError(f"inner product expects two {n}-bit inputs, got {x.length} and {y.length}")
    return BitString(ip_words(x.value, y.value, spec), spec.symbol_bits)


# --- seeded extractors ---------------------------------------------------


@dataclass(frozen=True)
class SeededExtractorSpec:
    """An (n, d, m) extractor with its claimed (k, eps) guarantee.

    ``offset`` is a public constant XORed into the Toeplitz diagonal vector.
    With a full-length seed (``d >= n + m - 1``) this only relabels seeds, so
    the family stays 2-universal; with shorter seeds it keeps the all-zero
    seed from collapsing to the zero matrix.
    """

    source_len: int
    seed_len: int
    output_len: int
    min_entropy: float = 0.0
    error: float = 1.0
    family: str = "hash_based"
    offset: int = 0

    def __post_init__(self):
        if self.family not in ("hash_based", "trevisan_stub"):
            raise ValueError(f"unknown extractor family {self.family!r}")
        if not 0 <= self.output_len <= self.source_len:
            raise ValueError(f"output length {self.output_len} exceeds source length {self.source_len}")
        if self.seed_len < 1:
            raise ValueError("seed must be at least one bit")
        if not 0 <= self.offset < (1 << self.diagonal_len):
            raise ValueError("offset wider than the Toeplitz diagonal")

    @property
    def diagonal_len(self) -> int:
        return self.source_len + self.output_len - 1

    @property
    def is_universal(self) -> bool:
        """True when every diagonal vector is reachable, i.e. the family is 2-universal."""
        return self.seed_len >= self.diagonal_len

    def lhl_bound(self, k: float | None = None) -> float:
        """Leftover-hash bound on the strong extractor distance, 1/2 * sqrt(2^(m-k))."""
        k = self.min_entropy if k is None else k
        return 0.5 * math.sqrt(2.0 ** (self.output_len - k))


def toeplitz_diagonal(seed, spec: SeededExtractorSpec):
    """Expand a seed to the diagonal vector: truncate if long, repeat cyclically if short."""
    seed = _u(seed)
    d, L = spec.seed_len, spec.diagonal_len
    if d >= L:
        t = seed >> _c(d - L, seed)
    else:
        t = 0 if isinstance(seed, int) else np.zeros_like(seed)
        filled = 0
        while filled < L:
            take = min(d, L - filled)
            t = (t << _c(take, seed)) | (seed >> _c(d - take, seed))
            filled += take
    return t ^ _c(spec.offset, seed)


def toeplitz_hash_words(x, diag, n: int, m: int):
    """Multiply the m x n Toeplitz matrix with diagonal vector ``diag`` by ``x``.

    Row i of the matrix is bits i..i+n-1 counted from the low end of ``diag``
    once shifted, i.e. entry (i, j) is diagonal bit j - i + m - 1 (big-endian).
    """
    x, diag = _u(x), _u(diag)
    mask = _c((1 << n) - 1, diag)
    scalar = isinstance(x, int) and isinstance(diag, int)
    out = 0 if scalar else np.zeros(np.broadcast(x, diag).shape, dtype=np.uint64)
    for i in range(m):
        row = (diag >> _c(i, diag)) & mask
        bit = parity(row & x)
        out = out | (bit << _c(m - 1 - i, out))
    return out


def ext_words(x, seed, spec: SeededExtractorSpec):
    if spec.family != "hash_based":
        raise NotImplementedError(f"extractor family {spec.family!r} is reserved")
    return toeplitz_hash_words(x, toeplitz_diagonal(seed, spec), spec.source_len, spec.output_len)


def ext(x: BitString, seed: BitString, spec: SeededExtractorSpec) -> BitString:
    if x.length != spec.source_len:
        raise ValueError(f"source has {x.length} bits, expected {spec.source_len}")
    if seed.length != spec.seed_len:
        raise ValueError(f"seed has {seed.length} bits, expected {spec.seed_len}")
    return BitString(ext_words(x.value, seed.value, spec), spec.output_len)


def _as_arrays(source) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(source, Mapping):
        values = np.fromiter((int(v.value if isinstance(v, BitString) else v) for v in source), dtype=np.uint64)
        probs = np.fromiter((float(p) for p in source.values()), dtype=float)
    else:
        values, probs = source
        values = np.asarray(values, dtype=np.uint64)
        probs = np.asarray(probs, dtype=float)
    return values, probs


def uniformity_scan(spec: SeededExtractorSpec, source, chunk: int = 1 << 22) -> float:
    """Exact distance of (Ext(X, S), S) from uniform over (output, seed).

    ``source`` is either a mapping value -> probability or a pair of arrays.
    """
    values, probs = _as_arrays(source)
    if values.size > MAX_SCAN_POINTS:
        raise ValueError(f"source support {values.size} exceeds {MAX_SCAN_POINTS} points")
    if not np.isclose(probs.sum(), 1.0, atol=1e-12):
        raise ValueError("source probabilities do not sum to 1")
    if spec.seed_len > 24:
        raise ValueError(f"{spec.seed_len}-bit seed space is too large to enumerate")
    n_seeds = 1 << spec.seed_len
    n_out = 1 << spec.output_len
    per = max(1, chunk // max(values.size, 1))
    total = 0.0
    for start in range(0, n_seeds, per):
        seeds = np.arange(start, min(start + per, n_seeds), dtype=np.uint64)
        out = ext_words(values[None, :], seeds[:, None], spec)
        idx = (np.arange(seeds.size, dtype=np.int64)[:, None] * n_out + out.astype(np.int64)).ravel()
        w = np.broadcast_to(probs, out.shape).ravel()
        hist = np.bincount(idx, weights=w, minlength=seeds.size * n_out)
        total += np.abs(hist - 1.0 / n_out).sum()
    return 0.5 * total / n_seeds
