import dataclasses
from fractions import Fraction

import pytest
import sympy as sp

from nmcodex import get_profile, load_profiles
from nmcodex.profiles import ParameterProfile, ProfileError, format_profile, parse_registry, profile_from_fields
from nmcodex.rates import delta, limiting_rates, symbolic_rates


def test_registry_has_three_sizes():
    assert list(load_profiles()) == ["XS", "S", "M"]


def test_unknown_profile():
    with pytest.raises(KeyError):
        get_profile("nope")


@pytest.mark.parametrize("name", ["XS", "S", "M"])
def test_registered_profiles_are_valid(name):
    p = get_profile(name)
    assert p.violations() == []
    assert p.a == 6 * p.k + 2 * p.log_q
    assert p.h == 10 * p.s
    assert p.delta < Fraction(1, 2)


@pytest.mark.parametrize("name", ["XS", "S", "M"])
def test_nmre_rate_matches_formula(name):
    # out_len is exactly (1/2 - delta) n for every registered profile
    p = get_profile(name)
    formula = (sp.Rational(1, 2) - delta) / (1 + delta)
    assert sp.Rational(p.rates()["nmre"]) == formula.subs(delta, sp.Rational(p.delta))


def test_published_rates():
    assert get_profile("XS").rates() == {"nmre": Fraction(4, 17), "nmc3c": Fraction(1, 10), "nmc2a": Fraction(2, 19)}
    assert get_profile("S").rates() == {"nmre": Fraction(5, 19), "nmc3c": Fraction(1, 22), "qnmc": Fraction(1, 20)}
    assert get_profile("M").schemes == ["nmre", "nmc3c", "nmc2a", "qnmc"]


def test_limiting_rates():
    assert limiting_rates() == {"nmre": sp.Rational(1, 2), "nmc3c": sp.Rational(1, 3),
                                "nmc2a": sp.Rational(1, 5), "qnmc": sp.Rational(1, 11)}


@pytest.mark.parametrize("scheme,base", [("nmc3c", 3), ("nmc2a", 5), ("qnmc", 11)])
def test_rates_have_reciprocal_form(scheme, base):
    rate = symbolic_rates()[scheme]
    dprime = sp.simplify(1 / rate - base)
    assert sp.simplify(rate - 1 / (base + dprime)) == 0
    assert sp.limit(dprime, delta, 0, "+") == 0


def _fields(p):
    return {f.name: getattr(p, f.name) for f in dataclasses.fields(p) if f.name != "published"}


@pytest.mark.parametrize("change", [
    {"a": 13},            # advice length
    {"h": 11},            # h = 10 s
    {"out_len": 3},       # output length
    {"v": 4, "k": 1},     # log v must divide 3k / code rate mismatch
    {"y_len": 7},         # delta below 1/2
    {"q": 12},            # power of two
    {"mac_tag_len": 2},   # leaves no message bit at XS
])
def test_validator_rejects(change):
    fields = _fields(get_profile("XS")) | change
    with pytest.raises(ProfileError):
        ParameterProfile(**fields)


def test_published_rate_mismatch_rejected():
    text = format_profile(get_profile("XS")).replace("rate_nmre = 4/17", "rate_nmre = 1/4")
    (name, fields), = parse_registry(text).items()
    with pytest.raises(ProfileError):
        profile_from_fields(name, fields)


def test_format_round_trip():
    p = get_profile("S")
    (name, fields), = parse_registry(format_profile(p)).items()
    assert profile_from_fields(name, fields) == p


def test_registry_directory_override(tmp_path, monkeypatch):
    (tmp_path / "extra.txt").write_text(format_profile(get_profile("XS")).replace("[XS]", "[XS2]"))
    monkeypatch.setenv("NMCODEX_PROFILE_DIR", str(tmp_path))
    assert list(load_profiles()) == ["XS2"]


def test_registry_syntax_errors():
    with pytest.raises(ProfileError):
        parse_registry("n = 3")
    with pytest.raises(ProfileError):
        parse_registry("[A]\n[A]\n")
    with pytest.raises(ProfileError):
        profile_from_fields("A", {"bogus": "1"})
