"""Classical codes built on the non-malleable extractor.

* NMRE: randomness (x, y) encodes the message 2nmExt(x, y).
* 3-split code: z = (R_e xor M) || MAC(R_a, R_e xor M) with R = 2nmExt(x, y).
* 2-split average-case code: z = P_R^{-1}(M), codeword (x, y || z).

Encoders take explicit randomness. ``SeededEncoder`` draws it from a
deterministic generator. The ``*Codec`` classes expose array-valued
encode/decode over whole randomness spaces for the tampering harness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .authenticators import (
    MacParams,
    mac_words,
    perm_apply,
    perm_invert,
    perm_words,
    sample_perm_key,
    split_perm_raw,
)
from .bits import BitString, from_hex, to_hex
from .nmext import MAX_TABLE_BITS, nmext_table, two_nmext, two_nmext_words
from .profiles import ParameterProfile
from .rates import message_len

BOT_CODE = -1


class _Bottom:
    """Decoder rejection symbol."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "BOT"

    __str__ = __repr__

    def __reduce__(self):
        return (_Bottom, ())


BOT = _Bottom()


class CodecError(ValueError):
    pass


# --- containers ---------------------------------------------------------------


@dataclass(frozen=True)
class Codeword3:
    x: BitString
    y: BitString
    z: BitString

    @property
    def splits(self) -> tuple[BitString, ...]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class Codeword2:
    x: BitString
    yz: BitString

    @property
    def splits(self) -> tuple[BitString, ...]:
        return (self.x, self.yz)


@dataclass(frozen=True)
class NmreOutput:
    message: BitString
    x: BitString
    y: BitString


def serialize_codeword(c) -> str:
    parts = c.splits if hasattr(c, "splits") else tuple(c)
    return ":".join([str(len(parts))] + [to_hex(s) for s in parts])


def parse_codeword(s: str):
    fields = s.strip().split(":")
    try:
        count = int(fields[0])
    except ValueError:
        raise ValueError(f"malformed codeword {s!r}") from None
    if count not in (2, 3) or len(fields) != 1 + 2 * count:
        raise ValueError(f"malformed codeword {s!r}")
    parts = [from_hex(f"{fields[1 + 2 * i]}:{fields[2 + 2 * i]}") for i in range(count)]
    return Codeword3(*parts) if count == 3 else Codeword2(*parts)


# --- helpers ---------------------------------------------------------------------


def _split_rand(rand: BitString, p: ParameterProfile) -> tuple[BitString, BitString]:
    if rand.length != p.rand_len:
        raise CodecError(f"randomness has {rand.length} bits, profile {p.name} needs {p.rand_len}")
    return rand.split(p.n, p.y_len)


def _check_xy(x: BitString, y: BitString, p: ParameterProfile):
    if x.length != p.n or y.length != p.y_len:
        raise CodecError(f"splits of {x.length}/{y.length} bits, profile {p.name} needs {p.n}/{p.y_len}")


def _require(p: ParameterProfile, scheme: str):
    if not p.supports(scheme):
        raise CodecError(f"profile {p.name} does not support {scheme}")


def default_mac(p: ParameterProfile) -> MacParams:
    return MacParams(message_len(p, "nmc3c"), p.mac_tag_len)


def _check_mac(p: ParameterProfile, mp: MacParams):
    if mp.msg_len != p.out_len - mp.key_len:
        raise CodecError(
            f"MAC with {mp.key_len}-bit key and {mp.msg_len}-bit messages does not fit "
            f"the {p.out_len}-bit extractor output of profile {p.name}"
        )


# --- NMRE ------------------------------------------------------------------------


def nmre_encode(randomness: BitString, p: ParameterProfile) -> NmreOutput:
    x, y = _split_rand(randomness, p)
    return NmreOutput(two_nmext(x, y, p), x, y)


def nmre_decode(x: BitString, y: BitString, p: ParameterProfile) -> BitString:
    _check_xy(x, y, p)
    return two_nmext(x, y, p)


# --- 3-split classical -----------------------------------------------------------


def nmc3c_encode(msg: BitString, rand: BitString, p: ParameterProfile, mp: MacParams | None = None) -> Codeword3:
    _require(p, "nmc3c")
    mp = mp or default_mac(p)
    _check_mac(p, mp)
    if msg.length != mp.msg_len:
        raise CodecError(f"message has {msg.length} bits, expected {mp.msg_len}")
    x, y = _split_rand(rand, p)
    r_e, r_a = two_nmext(x, y, p).split(mp.msg_len, mp.key_len)
    z1 = r_e ^ msg
    tag = BitString(int(mac_words(r_a.value, z1.value, mp)), mp.tag_len)
    return Codeword3(x, y, z1 + tag)


def nmc3c_decode(c: Codeword3, p: ParameterProfile, mp: MacParams | None = None):
    """The message, or ``BOT`` if the tag does not verify."""
    _require(p, "nmc3c")
    mp = mp or default_mac(p)
    _check_mac(p, mp)
    _check_xy(c.x, c.y, p)
    if c.z.length != mp.msg_len + mp.tag_len:
        raise CodecError(f"z has {c.z.length} bits, expected {mp.msg_len + mp.tag_len}")
    r_e, r_a = two_nmext(c.x, c.y, p).split(mp.msg_len, mp.key_len)
    z1, z2 = c.z.split(mp.msg_len, mp.tag_len)
    if int(mac_words(r_a.value, z1.value, mp)) != z2.value:
        return BOT
    return z1 ^ r_e


def share3(msg: BitString, rand: BitString, p: ParameterProfile) -> tuple[BitString, BitString, BitString]:
    return nmc3c_encode(msg, rand, p).splits


def reconstruct3(shares, p: ParameterProfile):
    return nmc3c_decode(Codeword3(*shares), p)


# --- 2-split average case --------------------------------------------------------


def _perm_len(p: ParameterProfile) -> int:
    _require(p, "nmc2a")
    return p.out_len // 2


def nmc2a_encode(msg: BitString, rand: BitString, p: ParameterProfile) -> Codeword2:
    m = _perm_len(p)
    if msg.length != m:
        raise CodecError(f"message has {msg.length} bits, expected {m}")
    x, y = _split_rand(rand, p)
    key = sample_perm_key(two_nmext(x, y, p))
    return Codeword2(x, y + perm_invert(key, msg))


def nmc2a_decode(c: Codeword2, p: ParameterProfile) -> BitString:
    m = _perm_len(p)
    if c.x.length != p.n or c.yz.length != p.y_len + m:
        raise CodecError(f"codeword splits of {c.x.length}/{c.yz.length} bits do not match profile {p.name}")
    y, z = c.yz.split(p.y_len, m)
    key = sample_perm_key(two_nmext(c.x, y, p))
    return perm_apply(key, z)


# --- seeded convenience layer --------------------------------------------------


class SeededEncoder:
    """Draws encoder randomness from a seeded generator; one instance per thread."""

    def __init__(self, p: ParameterProfile, seed: int = 0):
        self.profile = p
        self.rng = np.random.default_rng(seed)

    def randomness(self) -> BitString:
        bits = self.rng.integers(0, 2, size=self.profile.rand_len)
        return BitString.from_bits(int(b) for b in bits)

    def nmre(self) -> NmreOutput:
        return nmre_encode(self.randomness(), self.profile)

    def nmc3c(self, msg: BitString) -> Codeword3:
        return nmc3c_encode(msg, self.randomness(), self.profile)

    def nmc2a(self, msg: BitString) -> Codeword2:
        return nmc2a_encode(msg, self.randomness(), self.profile)


# --- array codecs for exhaustive experiments ------------------------------------


class ArrayCodec:
    """Encode/decode on integer arrays; ``BOT_CODE`` marks rejection.

    ``advice=False`` swaps in the ablated extractor (advice forced to zero).
    """

    scheme = ""
    split_names: tuple[str, ...] = ()

    def __init__(self, p: ParameterProfile, advice: bool = True):
        _require(p, self.scheme)
        self.profile = p
        self.advice = advice

    @property
    def msg_len(self) -> int:
        return message_len(self.profile, self.scheme)

    @property
    def rand_len(self) -> int:
        return self.profile.rand_len

    @property
    def split_lens(self) -> tuple[int, ...]:
        raise NotImplementedError

    def nmext(self, x, y) -> np.ndarray:
        p = self.profile
        x = np.asarray(x, dtype=np.uint64)
        y = np.asarray(y, dtype=np.uint64)
        if p.rand_len <= MAX_TABLE_BITS:
            return nmext_table(p, self.advice)[(x << np.uint64(p.y_len)) | y]
        return two_nmext_words(x, y, p, self.advice).reshape(np.broadcast(x, y).shape)

    def split_rand(self, r):
        r = np.asarray(r, dtype=np.uint64)
        p = self.profile
        return r >> np.uint64(p.y_len), r & np.uint64((1 << p.y_len) - 1)

    def encode(self, msg: int, r) -> tuple[np.ndarray, ...]:
        raise NotImplementedError

    def decode(self, splits) -> np.ndarray:
        raise NotImplementedError


class NmreCodec(ArrayCodec):
    scheme = "nmre"
    split_names = ("x", "y")

    @property
    def split_lens(self):
        return (self.profile.n, self.profile.y_len)

    def encode(self, msg, r):
        # the message is generated, not chosen; ``msg`` is ignored
        return self.split_rand(r)

    def decode(self, splits):
        return self.nmext(*splits).astype(np.int64)


class Nmc3cCodec(ArrayCodec):
    scheme = "nmc3c"
    split_names = ("x", "y", "z")

    def __init__(self, p: ParameterProfile, advice: bool = True, mp: MacParams | None = None):
        super().__init__(p, advice)
        self.mac = mp or default_mac(p)
        _check_mac(p, self.mac)

    @property
    def split_lens(self):
        return (self.profile.n, self.profile.y_len, self.mac.msg_len + self.mac.tag_len)

    def _keys(self, x, y):
        r = self.nmext(x, y)
        ka = np.uint64(self.mac.key_len)
        return r >> ka, r & np.uint64((1 << self.mac.key_len) - 1)

    def encode(self, msg, r):
        x, y = self.split_rand(r)
        r_e, r_a = self._keys(x, y)
        z1 = r_e ^ np.uint64(msg)
        z = (z1 << np.uint64(self.mac.tag_len)) | mac_words(r_a, z1, self.mac)
        return x, y, z

    def decode(self, splits):
        x, y, z = (np.asarray(s, dtype=np.uint64) for s in splits)
        r_e, r_a = self._keys(x, y)
        z1 = z >> np.uint64(self.mac.tag_len)
        z2 = z & np.uint64((1 << self.mac.tag_len) - 1)
        ok = mac_words(r_a, z1, self.mac) == z2
        return np.where(ok, (z1 ^ r_e).astype(np.int64), BOT_CODE)


class Nmc2aCodec(ArrayCodec):
    scheme = "nmc2a"
    split_names = ("x", "yz")

    @property
    def split_lens(self):
        return (self.profile.n, self.profile.y_len + self.msg_len)

    def _key(self, x, y):
        return split_perm_raw(self.nmext(x, y), self.msg_len)

    def encode(self, msg, r):
        x, y = self.split_rand(r)
        a, b = self._key(x, y)
        z = perm_words(a, b, np.full(np.shape(x), msg), self.msg_len, inverse=True)
        return x, (y << np.uint64(self.msg_len)) | z

    def decode(self, splits):
        x, yz = (np.asarray(s, dtype=np.uint64) for s in splits)
        m = np.uint64(self.msg_len)
        y, z = yz >> m, yz & np.uint64((1 << self.msg_len) - 1)
        a, b = self._key(x, y)
        return perm_words(a, b, z, self.msg_len).astype(np.int64)


ARRAY_CODECS = {"nmre": NmreCodec, "nmc3c": Nmc3cCodec, "nmc2a": Nmc2aCodec}


def array_codec(scheme: str, p: ParameterProfile, advice: bool = True) -> ArrayCodec:
    if scheme not in ARRAY_CODECS:
        raise CodecError(f"no classical array codec for scheme {scheme!r}")
    return ARRAY_CODECS[scheme](p, advice)
