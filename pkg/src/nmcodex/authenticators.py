"""One-time polynomial MAC and the affine permutation family over GF(2^m)."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bits import BitString
from .fields import FieldElem, gf

# --- MAC ---------------------------------------------------------------------


@dataclass(frozen=True)
class MacParams:
    msg_len: int
    tag_len: int

    def __post_init__(self):
        if self.msg_len < 1 or self.tag_len < 1:
            raise ValueError("message and tag lengths must be positive")

    @classmethod
    def for_target(cls, msg_len: int, eps: float) -> "MacParams":
        """Smallest tag length with t >= log2(m) + log2(1/eps)."""
        return cls(msg_len, math.ceil(math.log2(msg_len) + math.log2(1 / eps)))

    @property
    def key_len(self) -> int:
        return 2 * self.tag_len

    @property
    def blocks(self) -> int:
        return -(-self.msg_len // self.tag_len)

    @property
    def forgery_bound(self) -> Fraction:
        """Root-counting bound: z * mu(z) has degree ceil(m/t), so at most that many roots."""
        return Fraction(self.blocks, 2**self.tag_len)

    @property
    def field(self):
        return gf(2, self.tag_len)


def mac_words(key, msg, mp: MacParams):
    """Tag for integer arrays (or ints) of keys and messages."""
    t, d = mp.tag_len, mp.blocks
    F = mp.field
    key = np.asarray(key, dtype=np.uint64)
    msg = np.asarray(msg, dtype=np.uint64)
    mask = np.uint64((1 << t) - 1)
    k1 = (key >> np.uint64(t)).astype(np.int64)
    k2 = (key & mask).astype(np.int64)
    padded = msg << np.uint64(d * t - mp.msg_len)
    acc = np.zeros(np.broadcast(k1, padded).shape, dtype=np.int64)
    # coefficient i (constant term first) is the i-th t-bit block from the left
    for i in reversed(range(d)):
        c = ((padded >> np.uint64((d - 1 - i) * t)) & mask).astype(np.int64)
        acc = F.vmul(acc, k1) ^ c
    acc = F.vmul(acc, k1)
    return (acc ^ k2).astype(np.uint64)


def _check_mac(key: BitString, msg: BitString, mp: MacParams):
    if key.length != mp.key_len:
        raise ValueError(f"MAC key has {key.length} bits, expected {mp.key_len}")
    if msg.length != mp.msg_len:
        raise ValueError(f"MAC message has {msg.length} bits, expected {mp.msg_len}")


def mac(key: BitString, msg: BitString, mp: MacParams) -> BitString:
    """tag = k1 * mu(k1) + k2 where mu has the t-bit blocks of msg as coefficients."""
    _check_mac(key, msg, mp)
    return BitString(int(mac_words(key.value, msg.value, mp)), mp.tag_len)


def mac_verify(key: BitString, msg: BitString, tag: BitString, mp: MacParams) -> bool:
    _check_mac(key, msg, mp)
    if tag.length != mp.tag_len:
        raise ValueError(f"tag has {tag.length} bits, expected {mp.tag_len}")
    return mac(key, msg, mp) == tag


def mac_tag_table(mp: MacParams) -> np.ndarray:
    """tags[key, msg] for every key and message."""
    if mp.key_len + mp.msg_len > 24:
        raise ValueError("key and message spaces too large to tabulate")
    keys = np.arange(1 << mp.key_len, dtype=np.uint64)[:, None]
    msgs = np.arange(1 << mp.msg_len, dtype=np.uint64)[None, :]
    return mac_words(keys, msgs, mp)


def mac_forgery_probability(mp: MacParams) -> Fraction:
    """Exact best substitution probability after seeing one (msg, tag) pair.

    For each message mu the adversary sees sigma = tag(K, mu) and answers with
    the (mu', sigma'), mu' != mu, most likely to verify given sigma. Returns the
    maximum over mu of the adversary's success probability.
    """
    tags = mac_tag_table(mp).astype(np.int64)
    n_keys, n_msgs = tags.shape
    T = 1 << mp.tag_len
    best = 0
    for mu in range(n_msgs):
        sigma = tags[:, mu]
        # joint[sigma, mu', sigma'] counts of keys
        idx = (sigma[:, None] * n_msgs + np.arange(n_msgs)[None, :]) * T + tags
        joint = np.bincount(idx.ravel(), minlength=T * n_msgs * T).reshape(T, n_msgs, T)
        joint[:, mu, :] = 0
        best = max(best, int(joint.max(axis=(1, 2)).sum()))
    return Fraction(best, n_keys)


# --- permutations -------------------------------------------------------------


@dataclass(frozen=True)
class PermKey:
    a: FieldElem
    b: FieldElem

    def __post_init__(self):
        if self.a.field != self.b.field:
            raise ValueError("permutation key components from different fields")
        if self.a.value == 0:
            raise ValueError("permutation key needs a != 0")

    @property
    def m(self) -> int:
        return self.a.field.extension_degree


@functools.lru_cache(maxsize=None)
def _inverses(m: int) -> np.ndarray:
    F = gf(2, m)
    out = np.array([0] + [F.inv(v) for v in range(1, F.size)], dtype=np.int64)
    out.flags.writeable = False
    return out


def perm_words(a, b, mu, m: int, inverse: bool = False):
    """a * mu + b (or its inverse (mu - b) / a) on integer arrays."""
    F = gf(2, m)
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    mu = np.asarray(mu, dtype=np.int64)
    if inverse:
        return F.vmul(mu ^ b, _inverses(m)[a]).astype(np.uint64)
    return (F.vmul(a, mu) ^ b).astype(np.uint64)


def _check_perm(key: PermKey, msg: BitString):
    if msg.length != key.m:
        raise ValueError(f"permutation acts on {key.m}-bit strings, got {msg.length}")


def perm_apply(key: PermKey, msg: BitString) -> BitString:
    _check_perm(key, msg)
    F = key.a.field
    return BitString(F.add(F.mul(key.a.value, msg.value), key.b.value), key.m)


def perm_invert(key: PermKey, img: BitString) -> BitString:
    _check_perm(key, img)
    F = key.a.field
    return BitString(F.div(F.sub(img.value, key.b.value), key.a.value), key.m)


def split_perm_raw(raw, m: int):
    """(a, b) integer arrays from 2m-bit raw keys, with a = 0 remapped to 1."""
    raw = np.asarray(raw, dtype=np.uint64)
    a = (raw >> np.uint64(m)).astype(np.int64)
    b = (raw & np.uint64((1 << m) - 1)).astype(np.int64)
    return np.where(a == 0, 1, a), b


def sample_perm_key(raw: BitString) -> PermKey:
    """First half of ``raw`` is a (0 mapped to 1), second half is b."""
    if raw.length % 2 or raw.length == 0:
        raise ValueError(f"raw key must have even positive length, got {raw.length}")
    m = raw.length // 2
    hi, lo = raw.split(m, m)
    F = gf(2, m)
    return PermKey(F.elem(hi.value or 1), F.elem(lo.value))


def perm_pair_probabilities(m: int, remapped: bool = False) -> tuple[np.ndarray, int]:
    """Counts c[mu1, mu2, v1, v2] of keys sending (mu1, mu2) to (v1, v2), and the key count.

    Keys are uniform over a != 0, or over raw 2m-bit strings with the a = 0
    remap when ``remapped`` is true.
    """
    if m > 4:
        raise ValueError("pair table limited to m <= 4")
    q = 1 << m
    if remapped:
        a, b = split_perm_raw(np.arange(q * q), m)
    else:
        a, b = np.meshgrid(np.arange(1, q), np.arange(q), indexing="ij")
        a, b = a.ravel(), b.ravel()
    images = perm_words(a[:, None], b[:, None], np.arange(q)[None, :], m).astype(np.int64)
    counts = np.zeros((q, q, q, q), dtype=np.int64)
    for mu1 in range(q):
        for mu2 in range(q):
            np.add.at(counts[mu1, mu2], (images[:, mu1], images[:, mu2]), 1)
    return counts, a.size


def perm_pairwise_deficit(m: int, remapped: bool = False, distinct_images: bool = False) -> Fraction:
    """max over mu1 != mu2 and (v1, v2) of |Pr[P(mu1)=v1, P(mu2)=v2] - 2^{-2m}|, exactly."""
    counts, n_keys = perm_pair_probabilities(m, remapped)
    q = 1 << m
    off = ~np.eye(q, dtype=bool)
    c = counts[off]  # shape (pairs, v1, v2)
    if distinct_images:
        c = c[:, off]
    # |c/n - 1/q^2| = |c q^2 - n| / (n q^2)
    worst = int(np.abs(c * q * q - n_keys).max())
    return Fraction(worst, n_keys * q * q)
