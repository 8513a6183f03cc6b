import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from nmcodex import BitString, gf
from nmcodex.codes import EccParams, ecc_encode, ecc_symbol_at, ecc_symbol_batch
from nmcodex.extractors import IpSpec, SeededExtractorSpec, ext, ext_words, ip, uniformity_scan


def test_repetition_code():
    F = gf(2, 2)
    params = EccParams(F, 1, 3)
    assert ecc_encode([F.elem(2)], params) == [F.elem(2)] * 3


def test_rs_two_symbol_frozen():
    F = gf(2, 2)
    params = EccParams(F, 2, 3)
    out = [c.value for c in ecc_encode([F.elem(1), F.elem(1)], params)]
    assert out == [1, 0, 3]
    assert out == [oracles.value_of(oracles.rs_symbol([0, 1, 0, 1], 2, 2, r)) for r in range(3)]


def test_rs_minimum_distance_gf8():
    F = gf(2, 3)
    params = EccParams(F, 2, 7)
    words = [[c.value for c in ecc_encode([F.elem(a), F.elem(b)], params)] for a in range(8) for b in range(8)]
    dmin = min(sum(u != v for u, v in zip(w1, w2)) for w1, w2 in itertools.combinations(words, 2))
    assert dmin == 6


def test_symbol_at_matches_full_encoding():
    F = gf(2, 3)
    params = EccParams(F, 2, 7)
    for v in range(64):
        full = ecc_encode([F.elem(v >> 3), F.elem(v & 7)], params)
        for r in range(7):
            assert ecc_symbol_at(BitString(v, 6), r, params).value == full[r].value


def test_symbol_at_boundary():
    params = EccParams(gf(2, 2), 1, 3)
    assert ecc_symbol_at(BitString(3, 2), 0, params).value == 3
    with pytest.raises(IndexError):
        ecc_symbol_at(BitString(3, 2), 3, params)


def test_batch_matches_oracle():
    params = EccParams(gf(2, 4), 4, 8)
    msgs = np.arange(0, 1 << 14, 37, dtype=np.uint64)
    for r in range(8):
        got = ecc_symbol_batch(msgs, 14, np.full(msgs.size, r), params)
        for m, g in zip(msgs[:40], got[:40]):
            assert int(g) == oracles.value_of(oracles.rs_symbol(oracles.bits_of(int(m), 14), 4, 4, r))


def test_code_length_limited_by_field():
    with pytest.raises(ValueError):
        EccParams(gf(2, 2), 2, 5)


def test_ip_single_bit():
    spec = IpSpec(gf(2, 1), 1)
    assert ip(BitString(1, 1), BitString(1, 1), spec) == BitString(1, 1)
    assert ip(BitString(1, 1), BitString(0, 1), spec) == BitString(0, 1)


def test_ip_gf4_cancels():
    spec = IpSpec(gf(2, 2), 2)
    # x = (1, alpha), y = (alpha, 1)
    assert ip(BitString(0b0110, 4), BitString(0b1001, 4), spec) == BitString(0, 2)


@given(st.integers(0, (1 << 12) - 1))
def test_ip_zero_annihilates(x):
    spec = IpSpec(gf(2, 4), 3)
    assert ip(BitString(x, 12), BitString(0, 12), spec).value == 0


@given(st.integers(0, (1 << 12) - 1), st.integers(0, (1 << 12) - 1))
def test_ip_matches_oracle(x, y):
    spec = IpSpec(gf(2, 4), 3)
    want = oracles.inner_product(oracles.bits_of(x, 12), oracles.bits_of(y, 12), 4)
    assert ip(BitString(x, 12), BitString(y, 12), spec).value == oracles.value_of(want)


def test_ip_length_check():
    with pytest.raises(ValueError):
        ip(BitString(0, 3), BitString(0, 4), IpSpec(gf(2, 2), 2))


def test_toeplitz_identity_seed():
    # diagonal 0^(n-1) 1 0^(m-1) is the identity when m = n
    spec = SeededExtractorSpec(4, 7, 4)
    seed = BitString(0b0001000, 7)
    for x in range(16):
        assert ext(BitString(x, 4), seed, spec).value == x


def test_toeplitz_parity_row():
    spec = SeededExtractorSpec(2, 2, 1)
    seed = BitString(0b11, 2)
    assert ext(BitString.from_str("10"), seed, spec).value == 1
    assert ext(BitString.from_str("11"), seed, spec).value == 0


@given(st.integers(0, (1 << 10) - 1), st.integers(0, (1 << 3) - 1), st.integers(1, 6), st.integers(0, 255))
@settings(max_examples=200)
def test_toeplitz_matches_oracle(x, seed, m, offset):
    spec = SeededExtractorSpec(10, 3, m, offset=offset % (1 << (9 + m)))
    want = oracles.toeplitz(oracles.bits_of(x, 10), oracles.bits_of(seed, 3), m,
                            oracles.bits_of(spec.offset, 9 + m))
    assert int(ext_words(x, seed, spec)) == oracles.value_of(want)


def test_extractor_rejects_wrong_lengths():
    spec = SeededExtractorSpec(4, 3, 2)
    with pytest.raises(ValueError):
        ext(BitString(0, 5), BitString(0, 3), spec)
    with pytest.raises(ValueError):
        SeededExtractorSpec(4, 3, 5)


def test_two_point_source():
    # flat on {0000, 1111}: k = 1, m = 1, full-length seeds
    spec = SeededExtractorSpec(4, 4, 1)
    src = {BitString(0, 4): 0.5, BitString(15, 4): 0.5}
    d = uniformity_scan(spec, src)
    want = oracles.strong_extractor_distance([[0] * 4, [1] * 4], 4, 1)
    assert d == pytest.approx(float(want), abs=1e-12)
    assert float(want) == 0.25
    assert d <= spec.lhl_bound(1)


def _rank_distance(n, m):
    """Exact distance for the uniform source over full-length seeds: a seed
    whose m x n Toeplitz matrix has rank m is perfectly uniform, and rank r < m
    puts mass on 2^r outputs, distance 1 - 2^(r - m)."""
    L = n + m - 1
    total = Fraction(0)
    for t in range(1 << L):
        rows = [sum(1 << j for j in range(n) if (t >> (L - 1 - (j - i + m - 1))) & 1) for i in range(m)]
        basis = []
        for r in rows:
            for b in basis:
                r = min(r, r ^ b)
            if r:
                basis.append(r)
        total += 1 - Fraction(1 << len(basis), 1 << m)
    return total / (1 << L)


@pytest.mark.parametrize("n,m", [(4, 1), (4, 2), (5, 3), (6, 2)])
def test_uniform_source_matches_rank_form(n, m):
    spec = SeededExtractorSpec(n, n + m - 1, m)
    src = (np.arange(1 << n), np.full(1 << n, 1.0 / (1 << n)))
    assert uniformity_scan(spec, src) == pytest.approx(float(_rank_distance(n, m)), abs=1e-12)


def test_parity_extractor_on_uniform_source():
    # m = 1: only the all-zero diagonal fails, distance 1/2 on it
    n = 5
    spec = SeededExtractorSpec(n, n, 1)
    src = (np.arange(1 << n), np.full(1 << n, 1.0 / (1 << n)))
    assert uniformity_scan(spec, src) == pytest.approx(0.5 / (1 << n))


def test_point_source_reported():
    spec = SeededExtractorSpec(4, 4, 1)
    d = uniformity_scan(spec, {BitString(5, 4): 1.0})
    assert d >= 0.25


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_flat_sources_within_lhl(k):
    n, m = 6, 1
    spec = SeededExtractorSpec(n, n + m - 1, m)
    rng = np.random.default_rng(k)
    pts = rng.choice(1 << n, 1 << k, replace=False)
    d = uniformity_scan(spec, (pts, np.full(pts.size, 1.0 / pts.size)))
    assert d <= spec.lhl_bound(k) + 1e-12
    assert d == pytest.approx(float(oracles.strong_extractor_distance(
        [oracles.bits_of(int(p), n) for p in pts], n + m - 1, m)), abs=1e-12)


def test_lhl_bound_formula():
    spec = SeededExtractorSpec(8, 8, 3, min_entropy=5)
    assert spec.lhl_bound() == pytest.approx(0.5 * math.sqrt(2 ** -2))
