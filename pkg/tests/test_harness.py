from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nmcodex import get_profile
from nmcodex.codecs import BOT, array_codec
from nmcodex.harness import (
    ClassicalTamper, Distribution, DistributionError, extractor_distance, fit_joint, fit_simulator,
    joint_distribution, min_entropy, naive_fit_epsilon, parse_primitive, parse_tamper, privacy_bound,
    privacy_distance, statistical_distance, tamper_distribution, tamper_report,
)

XS = get_profile("XS")


@pytest.fixture(scope="module")
def nmc3c():
    return array_codec("nmc3c", XS)


def test_distribution_validation():
    with pytest.raises(DistributionError):
        Distribution({0: Fraction(1, 2)})
    with pytest.raises(DistributionError):
        Distribution({0: Fraction(3, 2), 1: Fraction(-1, 2)})


def test_distance_and_entropy():
    u = Distribution.uniform(range(4))
    assert statistical_distance(u, Distribution.point(0)) == Fraction(3, 4)
    assert min_entropy(u) == pytest.approx(2.0)


@given(st.lists(st.integers(1, 20), min_size=1, max_size=6), st.lists(st.integers(1, 20), min_size=1, max_size=6))
def test_distance_is_a_metric_bound(a, b):
    d1 = Distribution.from_counts(dict(enumerate(a)))
    d2 = Distribution.from_counts(dict(enumerate(b)))
    d = statistical_distance(d1, d2)
    assert 0 <= d <= 1
    assert d == statistical_distance(d2, d1)


def test_primitives():
    v = np.array([0b1010], dtype=np.uint64)
    assert parse_primitive("bitflip:0").apply(v, 4)[0] == 0b0010
    assert parse_primitive("xor:4:f").apply(v, 4)[0] == 0b0101
    assert parse_primitive("constant:4:3").apply(v, 4)[0] == 3
    assert parse_primitive("permute:3,2,1,0").apply(v, 4)[0] == 0b0101
    assert parse_primitive("parity_fold:3").apply(v, 4)[0] == 0b1010
    assert parse_primitive("table:" + ",".join(str(15 - i) for i in range(16))).apply(v, 4)[0] == 0b0101
    with pytest.raises(ValueError):
        parse_primitive("bogus:1")
    with pytest.raises(ValueError):
        parse_primitive("table:0,1").apply(v, 4)


def test_tamper_spec_parsing():
    t = parse_tamper("[seed 1/4]\nx = bitflip:0\n[seed 3/4]\ny = constant:3:2\n")
    assert [w for w, _ in t.branches] == [Fraction(1, 4), Fraction(3, 4)]
    with pytest.raises(ValueError):
        parse_tamper("[seed 1/2]\nx = identity\n")
    assert parse_tamper("identity").is_identity


def test_identity_tamper_point_mass(nmc3c):
    for m in range(4):
        assert tamper_distribution(nmc3c, ClassicalTamper.identity(), m) == Distribution.point(m)


def test_constant_codeword_point_mass(nmc3c):
    r = np.array([12345], dtype=np.uint64)
    x, y, z = (int(s[0]) for s in nmc3c.encode(2, r))
    t = parse_tamper(f"x = constant:14:{x << 2:04x}\ny = constant:3:{y << 1:x}\nz = constant:3:{z << 1:x}")
    for m in range(4):
        assert tamper_distribution(nmc3c, t, m) == Distribution.point(2)


def test_bitflip_on_x_bot_mass(nmc3c):
    # rejection mass equals a direct count of MAC failures over all randomness
    d = tamper_distribution(nmc3c, parse_tamper("x = bitflip:0"), 1)
    r = np.arange(1 << XS.rand_len, dtype=np.uint64)
    x, y, z = nmc3c.encode(1, r)
    t = nmc3c.profile
    x2 = x ^ np.uint64(1 << (t.n - 1))
    from nmcodex.authenticators import mac_words
    from nmcodex.nmext import nmext_table
    out = nmext_table(t)[(x2 << np.uint64(t.y_len)) | y]
    r_a = out & np.uint64(3)
    rejected = mac_words(r_a, z >> np.uint64(1), nmc3c.mac) != (z & np.uint64(1))
    assert d[BOT] == Fraction(int(rejected.sum()), r.size)


def test_fit_all_same():
    per = {m: Distribution.point(m) for m in range(4)}
    fit = fit_simulator(per)
    assert (fit.epsilon_star, fit.p_star, fit.exact) == (0, 1, True)


def test_fit_all_equal():
    g0 = Distribution({0: Fraction(1, 3), BOT: Fraction(2, 3)})
    fit = fit_simulator({m: g0 for m in range(4)})
    assert (fit.epsilon_star, fit.p_star) == (0, 0)
    assert fit.gamma_star == g0


def test_fit_half_mixture():
    g0 = Distribution({BOT: Fraction(1, 2), 3: Fraction(1, 2)})
    per = {m: Distribution.point(m).mix(g0, Fraction(1, 2)) for m in range(3)}
    fit = fit_simulator(per)
    assert fit.epsilon_star == pytest.approx(0, abs=1e-9)
    assert fit.p_star == pytest.approx(0.5, abs=1e-9)


@given(st.integers(0, 10), st.lists(st.integers(0, 5), min_size=3, max_size=3))
@settings(max_examples=30, deadline=None)
def test_fit_recovers_planted_decomposition(p10, gw):
    p = Fraction(p10, 10)
    if sum(gw) == 0:
        gw = [1, 0, 0]
    gamma = Distribution.from_counts({k: w for k, w in zip([0, 1, BOT], gw) if w})
    per = {m: Distribution.point(m).mix(gamma, p) for m in range(3)}
    fit = fit_simulator(per)
    assert fit.epsilon_star == pytest.approx(0, abs=1e-8)
    assert fit.epsilon_star <= naive_fit_epsilon(per) + 1e-12


def test_fit_joint_exact_cases():
    assert fit_joint({(0, 0): Fraction(1, 2), (1, 1): Fraction(1, 2)}).epsilon_star == 0
    joint = {(m, b): Fraction(1, 8) for m in range(2) for b in range(4)}
    fit = fit_joint(joint)
    assert (fit.epsilon_star, fit.p_star) == (0, 0)


def test_identity_report(nmc3c):
    rep = tamper_report(nmc3c, ClassicalTamper.identity())
    assert rep.epsilon_star == 0
    assert rep.joint_fit.p_star == 1
    text = rep.render()
    assert "[joint_fit]" in text and "epsilon_star: 0" in text


def test_constant_y_nmre_full_vs_ablated():
    t = parse_tamper("y = constant:3:a")
    full = tamper_report(array_codec("nmre", XS), t)
    ablated = tamper_report(array_codec("nmre", XS, advice=False), t)
    print(f"constant-y epsilon: full {float(full.epsilon_star):.6f}, ablated {float(ablated.epsilon_star):.6f}")
    assert full.epsilon_star <= ablated.epsilon_star + 1e-9


def test_permutation_tamper_report_only():
    t = parse_tamper("x = permute:13,0,1,2,3,4,5,6,7,8,9,10,11,12")
    rep = tamper_report(array_codec("nmre", XS), t)
    assert 0 <= rep.epsilon_star <= 1
    assert rep.p_unchanged > 0


def test_shared_randomness_mixture(nmc3c):
    t = parse_tamper("[seed 1/2]\nx = identity\n[seed 1/2]\nz = bitflip:2\n")
    d = tamper_distribution(nmc3c, t, 0)
    assert d[0] == Fraction(1, 2)
    assert d[BOT] == Fraction(1, 2)


def test_joint_distribution_sums_to_one(nmc3c):
    joint = joint_distribution(nmc3c, parse_tamper("x = bitflip:3"))
    assert sum(joint.values()) == 1


def test_privacy_of_two_shares(nmc3c):
    assert privacy_distance(nmc3c, ["x", "y"]) == 0
    assert privacy_bound(nmc3c, ["x", "y"]) == 0


@pytest.mark.parametrize("subset", [["z"], ["x", "z"], ["y", "z"]])
def test_privacy_with_z_within_bound(nmc3c, subset):
    assert privacy_distance(nmc3c, subset) <= privacy_bound(nmc3c, subset)


def test_full_share_set_reveals_message(nmc3c):
    assert privacy_distance(nmc3c, ["x", "y", "z"]) == 1


def test_extractor_distance_side_information(nmc3c):
    assert extractor_distance(nmc3c) <= extractor_distance(nmc3c, "y") <= extractor_distance(nmc3c, "x")
    with pytest.raises(ValueError):
        extractor_distance(nmc3c, "z")


@settings(max_examples=25)
@given(st.integers(1, 7), st.integers(0, 13), st.integers(0, 2**5 - 1))
def test_mixture_is_linear_in_seed_weights(num, bit, msg):
    w = Fraction(num, 8)
    a = parse_tamper("x = identity")
    b = parse_tamper(f"x = bitflip:{bit}")
    mixed = parse_tamper(f"[seed {w}]\nx = identity\n[seed {1 - w}]\nx = bitflip:{bit}\n")
    codec = array_codec("nmc3c", XS)
    m = msg % (1 << codec.msg_len)
    da, db, dm = (tamper_distribution(codec, t, m) for t in (a, b, mixed))
    for v in set(da.support) | set(db.support) | set(dm.support):
        assert dm[v] == w * da[v] + (1 - w) * db[v]


@pytest.mark.parametrize("scheme,text", [
    ("nmc3c", "x = bitflip:0"),
    ("nmc3c", "y = xor:3:a"),
    ("nmc2a", "x = bitflip:5"),
    ("nmre", "y = bitflip:1"),
])
def test_fit_never_worse_than_naive(scheme, text):
    codec = array_codec(scheme, XS)
    joint = joint_distribution(codec, parse_tamper(text))
    per = {}
    for (m, mp), pr in joint.items():
        per.setdefault(m, {})
        per[m][mp] = per[m].get(mp, 0) + pr * (1 << codec.msg_len)
    dists = {m: Distribution(d) for m, d in per.items()}
    assert fit_simulator(dists).epsilon_star <= naive_fit_epsilon(dists) + 1e-9


@settings(max_examples=20)
@given(st.integers(0, 2**14 - 1), st.integers(0, 2**5 - 1), st.sampled_from(["x", "yz", "both"]))
def test_nmc2a_constant_overwrites_are_simulable(cx, cyz, which):
    codec = array_codec("nmc2a", XS)
    lines = []
    if which in ("x", "both"):
        lines.append(f"x = constant:14:{cx << 2:04x}")
    if which in ("yz", "both"):
        lines.append(f"yz = constant:5:{cyz << 3:02x}")
    assert tamper_report(codec, parse_tamper("\n".join(lines))).epsilon_star <= 1e-9


def test_changed_distance_only_reported_for_nmre(nmc3c):
    rep = tamper_report(nmc3c, parse_tamper("x = bitflip:0"))
    assert rep.p_unchanged is None
    assert "p_unchanged" not in rep.render()
    assert "p_unchanged: 0" in tamper_report(array_codec("nmre", XS), parse_tamper("x = bitflip:0")).render()
