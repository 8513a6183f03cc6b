import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from nmcodex import BitString, get_profile
from nmcodex.authenticators import mac_words
from nmcodex.codecs import (
    BOT, BOT_CODE, CodecError, Codeword2, Codeword3, SeededEncoder, array_codec, nmc2a_decode, nmc2a_encode,
    nmc3c_decode, nmc3c_encode, nmre_decode, nmre_encode, parse_codeword, reconstruct3, serialize_codeword, share3,
)
from nmcodex.harness import ClassicalTamper, SplitFunction, tamper_distribution
from nmcodex.nmext import nmext_table, two_nmext

XS, S, M = (get_profile(n) for n in ("XS", "S", "M"))


def _rand(p, v):
    return BitString(v, p.rand_len)


def _oracle_out(p, x, y):
    return oracles.value_of(oracles.Pipeline.of(p).run(oracles.bits_of(x, p.n), oracles.bits_of(y, p.y_len))["out"])


def test_nmre_zero_randomness():
    out = nmre_encode(_rand(XS, 0), XS)
    assert out.message.value == 0


@given(st.integers(0, (1 << XS.rand_len) - 1))
@settings(max_examples=50)
def test_nmre_round_trip(r):
    out = nmre_encode(_rand(XS, r), XS)
    assert nmre_decode(out.x, out.y, XS) == out.message
    assert out.x + out.y == _rand(XS, r)


def test_nmre_matches_oracle():
    out = nmre_encode(_rand(XS, 0x2AB3 << 3 | 5), XS)
    assert out.message.value == _oracle_out(XS, 0x2AB3, 5) == 3


def test_nmc3c_zero_message():
    r = _rand(XS, 0x155AB)
    c = nmc3c_encode(BitString(0, 2), r, XS)
    out = two_nmext(c.x, c.y, XS)
    r_e, r_a = out.split(2, 2)
    assert c.z == r_e + BitString(int(mac_words(r_a.value, r_e.value, nmc3c_codec().mac)), 1)


def nmc3c_codec():
    return array_codec("nmc3c", XS)


def test_nmc3c_oracle_vector():
    # x = 0x2AB3, y = 5 gives R = 0011: R_e = 00, R_a = 11
    r = _rand(XS, 0x2AB3 << 3 | 5)
    c = nmc3c_encode(BitString(0b10, 2), r, XS)
    tag = oracles.mac_tag([1, 1], [1, 0], 1)
    assert c.z.bits == (1, 0, *tag)
    assert nmc3c_decode(c, XS) == BitString(0b10, 2)


@pytest.mark.parametrize("p", [XS, S], ids=["XS", "S"])
def test_nmc3c_round_trip_sampled(p):
    enc = SeededEncoder(p, 7)
    mlen = p.out_len - 2 * p.mac_tag_len
    for m in range(1 << mlen):
        c = enc.nmc3c(BitString(m, mlen))
        assert nmc3c_decode(c, p) == BitString(m, mlen)


def test_tag_bit_flip_always_rejected():
    codec = nmc3c_codec()
    r = np.arange(1 << codec.rand_len, dtype=np.uint64)
    for m in range(4):
        x, y, z = codec.encode(m, r)
        assert (codec.decode((x, y, z ^ np.uint64(1))) == BOT_CODE).all()


def test_constant_x_matches_harness():
    # direct per-randomness BitString decoding against the harness distribution
    codec = nmc3c_codec()
    cx = BitString(0x1234, XS.n)
    tamper = ClassicalTamper.single("cx", x=SplitFunction("constant", cx))
    dist = tamper_distribution(codec, tamper, 1)
    rng = np.random.default_rng(0)
    counts = {}
    sample = rng.integers(0, 1 << XS.rand_len, 400)
    for r in sample:
        c = nmc3c_encode(BitString(1, 2), _rand(XS, int(r)), XS)
        out = nmc3c_decode(Codeword3(cx, c.y, c.z), XS)
        key = BOT if out is BOT else out.value
        counts[key] = counts.get(key, 0) + 1
    for key, cnt in counts.items():
        assert abs(cnt / sample.size - float(dist[key])) < 0.1
    # the exact law over all randomness from the array path
    r = np.arange(1 << XS.rand_len, dtype=np.uint64)
    x, y, z = codec.encode(1, r)
    outs = codec.decode((np.full_like(x, cx.value), y, z))
    for key in dist.support:
        code = BOT_CODE if key is BOT else key
        assert float(dist[key]) == pytest.approx(float((outs == code).mean()))


def test_share_round_trip():
    shares = share3(BitString(3, 2), _rand(XS, 99), XS)
    assert reconstruct3(shares, XS) == BitString(3, 2)
    text = serialize_codeword(shares)
    assert parse_codeword(text).splits == shares


def test_nmc2a_identity_key():
    # randomness whose extractor output is 0 gives key (1, 0): z = msg
    t = nmext_table(XS)
    r = int(np.flatnonzero(t == 0)[0])
    c = nmc2a_encode(BitString(0b10, 2), _rand(XS, r), XS)
    assert c.yz.split(XS.y_len, 2)[1] == BitString(0b10, 2)


def test_nmc2a_oracle_vector():
    # R = 0011: a = 00 -> 1, b = 11; encoding inverts mu -> mu + b
    r = _rand(XS, 0x2AB3 << 3 | 5)
    c = nmc2a_encode(BitString(0b01, 2), r, XS)
    assert c.yz.split(XS.y_len, 2)[1] == BitString(0b01 ^ 0b11, 2)
    assert nmc2a_decode(c, XS) == BitString(0b01, 2)


@pytest.mark.parametrize("scheme,p", [("nmre", XS), ("nmc3c", XS), ("nmc2a", XS), ("nmre", S), ("nmc3c", S)])
def test_array_round_trip_exhaustive(scheme, p):
    codec = array_codec(scheme, p)
    r = np.arange(1 << codec.rand_len, dtype=np.uint64)
    if scheme == "nmre":
        x, y = codec.encode(0, r)
        assert np.array_equal(codec.decode((x, y)), nmext_table(p)[r].astype(np.int64))
        return
    for m in range(1 << codec.msg_len):
        assert (codec.decode(codec.encode(m, r)) == m).all()


@pytest.mark.parametrize("scheme", ["nmre", "nmc3c", "nmc2a"])
def test_array_matches_bitstring_path(scheme):
    codec = array_codec(scheme, M)
    rng = np.random.default_rng(1)
    r = rng.integers(0, 1 << M.rand_len, 20).astype(np.uint64)
    m = 5 if scheme != "nmre" else 0
    splits = codec.encode(m, r)
    for i in range(r.size):
        rb = _rand(M, int(r[i]))
        if scheme == "nmre":
            out = nmre_encode(rb, M)
            assert int(codec.decode(splits)[i]) == out.message.value
        elif scheme == "nmc3c":
            c = nmc3c_encode(BitString(m, codec.msg_len), rb, M)
            assert tuple(int(s[i]) for s in splits) == tuple(v.value for v in c.splits)
        else:
            c = nmc2a_encode(BitString(m, codec.msg_len), rb, M)
            assert tuple(int(s[i]) for s in splits) == tuple(v.value for v in c.splits)
    if scheme != "nmre":
        assert (codec.decode(splits) == m).all()


def test_codeword_serialization():
    c = Codeword2(BitString(5, 14), BitString(3, 5))
    assert parse_codeword(serialize_codeword(c)) == c
    with pytest.raises(ValueError):
        parse_codeword("4:1:0")
    with pytest.raises(ValueError):
        parse_codeword("2:14:zz:3:2")


def test_length_checks():
    with pytest.raises(CodecError):
        nmc3c_encode(BitString(0, 3), _rand(XS, 0), XS)
    with pytest.raises(CodecError):
        nmre_encode(BitString(0, 5), XS)
    with pytest.raises(CodecError):
        nmc2a_encode(BitString(0, 2), _rand(S, 0), S)


def test_bot_is_singleton():
    import pickle
    assert pickle.loads(pickle.dumps(BOT)) is BOT


def test_seeded_encoder_deterministic():
    a = SeededEncoder(XS, 11).nmc3c(BitString(2, 2))
    b = SeededEncoder(XS, 11).nmc3c(BitString(2, 2))
    assert a == b
