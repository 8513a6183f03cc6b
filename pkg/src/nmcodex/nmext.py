"""Two-source non-malleable extractor: advice generator, flip-flop, correlation breaker.

The ``*_words`` functions take numpy ``uint64`` arrays (or ints) of x and y
values and run the whole pipeline elementwise, which is how the harness
evaluates the extractor on every input pair at once. The BitString functions
are thin wrappers for single evaluations.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .bits import BitString
from .codes import ecc_symbol_batch
from .extractors import ext_words, ip_words
from .profiles import ParameterProfile

MAX_TABLE_BITS = 22


@dataclass(frozen=True)
class AdviceString:
    g: BitString

    def bit(self, i: int) -> int:
        return self.g[i]

    def __len__(self) -> int:
        return self.g.length


def _arr(v) -> np.ndarray:
    return np.atleast_1d(np.asarray(v, dtype=np.uint64))


def _sh(v: int) -> np.uint64:
    return np.uint64(v)


def _ext(role: str, src, seed, p: ParameterProfile):
    return ext_words(src, seed, p.extractors[role])


# --- array pipeline ---------------------------------------------------------


def advice_words(x, y, p: ParameterProfile, with_index: bool = False):
    x, y = _arr(x), _arr(y)
    k3, lq = p.x1_len, p.log_q
    x1 = x >> _sh(p.n - k3)
    y1 = y >> _sh(p.y_len - k3)
    r = ip_words(x1, y1, p.ip1)
    ecc = p.ecc
    cx = ecc_symbol_batch(x, p.n, r, ecc)
    cy = ecc_symbol_batch(y << _sh(p.n - p.y_len), p.n, r, ecc)
    g = (x1 << _sh(k3 + 2 * lq)) | (y1 << _sh(2 * lq)) | (cx << _sh(lq)) | cy
    return (g, r) if with_index else g


def ip2_words(x, y, p: ParameterProfile):
    """Z0 = IP2 of the 3k^3-bit prefixes, each right-padded to whole GF(2^h) blocks."""
    x, y = _arr(x), _arr(y)
    k3 = p.x2_len
    pad = p.ip2.input_bits - k3
    x2 = (x >> _sh(p.n - k3)) << _sh(pad)
    y2 = (y >> _sh(p.y_len - k3)) << _sh(pad)
    return ip_words(x2, y2, p.ip2)


def two_ff_words(y, x, z, g_bit, p: ParameterProfile):
    y, x, z = _arr(y), _arr(x), _arr(z)
    g_bit = _arr(g_bit).astype(bool)
    drop = _sh(p.h - p.s)

    a = _ext("ext1", y, z >> drop, p)
    c = _ext("ext2", z, a, p)
    b = _ext("ext1", y, c, p)
    zbar = _ext("ext3", x, np.where(g_bit, b, a), p)

    a_bar = _ext("ext1", y, zbar >> drop, p)
    c_bar = _ext("ext2", zbar, a_bar, p)
    b_bar = _ext("ext1", y, c_bar, p)
    return _ext("ext3", x, np.where(g_bit, a_bar, b_bar), p)


def two_advcb_words(y, x, z0, g, p: ParameterProfile, trace: list | None = None):
    z = _arr(z0)
    g = _arr(g)
    for i in range(p.a):
        bit = (g >> _sh(p.a - 1 - i)) & _sh(1)
        z = two_ff_words(y, x, z, bit, p)
        if trace is not None:
            trace.append(z)
    return _ext("ext4", _arr(y), z, p)


def two_nmext_words(x, y, p: ParameterProfile, advice: bool = True):
    """2nmExt on arrays of inputs; ``advice=False`` forces G = 0^a (the ablated pipeline)."""
    x, y = np.broadcast_arrays(_arr(x), _arr(y))
    g = advice_words(x, y, p) if advice else np.zeros_like(x)
    z0 = ip2_words(x, y, p)
    s = two_advcb_words(y, x, z0, g, p)
    return _ext("ext6", x, s, p)


@functools.lru_cache(maxsize=8)
def nmext_table(p: ParameterProfile, advice: bool = True) -> np.ndarray:
    """Output for every input pair, indexed by (x << y_len) | y. Read-only."""
    bits = p.rand_len
    if bits > MAX_TABLE_BITS:
        raise ValueError(f"{bits}-bit input space is too large to tabulate")
    out = np.empty(1 << bits, dtype=np.uint64)
    chunk = 1 << 16
    ymask = _sh((1 << p.y_len) - 1)
    for start in range(0, out.size, chunk):
        idx = np.arange(start, min(start + chunk, out.size), dtype=np.uint64)
        out[start:start + idx.size] = two_nmext_words(idx >> _sh(p.y_len), idx & ymask, p, advice)
    out.flags.writeable = False
    return out


# --- single evaluations -----------------------------------------------------


def _check(x: BitString, y: BitString, p: ParameterProfile):
    if x.length != p.n:
        raise ValueError(f"x has {x.length} bits, profile {p.name} expects {p.n}")
    if y.length != p.y_len:
        raise ValueError(f"y has {y.length} bits, profile {p.name} expects {p.y_len}")


def advice_gen(x: BitString, y: BitString, p: ParameterProfile) -> AdviceString:
    _check(x, y, p)
    return AdviceString(BitString(int(advice_words(x.value, y.value, p)[0]), p.a))


def two_ff(y: BitString, x: BitString, z: BitString, g_bit: int, p: ParameterProfile) -> BitString:
    _check(x, y, p)
    if z.length != p.h:
        raise ValueError(f"z has {z.length} bits, expected h = {p.h}")
    if g_bit not in (0, 1):
        raise ValueError(f"advice bit must be 0 or 1, got {g_bit!r}")
    return BitString(int(two_ff_words(y.value, x.value, z.value, g_bit, p)[0]), p.h)


def two_advcb(y: BitString, x: BitString, z0: BitString, g: AdviceString, p: ParameterProfile) -> BitString:
    _check(x, y, p)
    if z0.length != p.h:
        raise ValueError(f"z0 has {z0.length} bits, expected h = {p.h}")
    if len(g) != p.a:
        raise ValueError(f"advice has {len(g)} bits, expected a = {p.a}")
    return BitString(int(two_advcb_words(y.value, x.value, z0.value, g.g.value, p)[0]), p.cb_len)


def two_nmext(x: BitString, y: BitString, p: ParameterProfile, advice: bool = True) -> BitString:
    _check(x, y, p)
    return BitString(int(two_nmext_words(x.value, y.value, p, advice)[0]), p.out_len)


@dataclass(frozen=True)
class NmextTrace:
    r: int
    g: BitString
    z: tuple[BitString, ...]
    s: BitString
    out: BitString


def two_nmext_trace(x: BitString, y: BitString, p: ParameterProfile) -> NmextTrace:
    """Every intermediate register of one evaluation: R, G, Z_0..Z_a, S, L."""
    _check(x, y, p)
    g, r = advice_words(x.value, y.value, p, with_index=True)
    z0 = ip2_words(x.value, y.value, p)
    zs: list = [z0]
    s = two_advcb_words(y.value, x.value, z0, g, p, trace=zs)
    out = _ext("ext6", _arr(x.value), s, p)
    return NmextTrace(
        r=int(r[0]),
        g=BitString(int(g[0]), p.a),
        z=tuple(BitString(int(v[0]), p.h) for v in zs),
        s=BitString(int(s[0]), p.cb_len),
        out=BitString(int(out[0]), p.out_len),
    )
