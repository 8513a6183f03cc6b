"""Rates of the four schemes: exact per profile and symbolic in delta.

Rate is message size (bits, or qubits for the quantum code) divided by total
codeword size. In the symbolic forms ``n`` cancels; ``delta`` is |Y|/n.
"""

from __future__ import annotations

from fractions import Fraction

import sympy as sp

delta = sp.Symbol("delta", positive=True)


def message_len(p, scheme: str) -> int:
    if scheme == "nmre":
        return p.out_len
    if scheme == "nmc3c":
        return p.out_len - 2 * p.mac_tag_len
    if scheme == "nmc2a":
        return p.out_len // 2
    if scheme == "qnmc":
        return p.out_len // 5
    raise ValueError(f"unknown scheme {scheme!r}")


def z_len(p, scheme: str) -> int:
    """Size of the third register (bits, or qubits for the quantum code)."""
    m = message_len(p, scheme)
    if scheme == "nmre":
        return 0
    if scheme == "nmc3c":
        return m + p.mac_tag_len
    return m


def profile_rates(p) -> dict[str, Fraction]:
    out = {}
    for scheme in p.schemes:
        m = message_len(p, scheme)
        out[scheme] = Fraction(m, p.n + p.y_len + z_len(p, scheme))
    return out


def symbolic_rates() -> dict[str, sp.Expr]:
    """Rates as functions of delta with the lower-order MAC and rounding terms kept.

    The 3-split classical code spends 0.1 delta n bits on the MAC key, so
    |M| = (1/2 - 1.1 delta) n and |Z| = |M| + 0.05 delta n.
    """
    half = sp.Rational(1, 2)
    out_len = half - delta
    m3 = half - sp.Rational(11, 10) * delta
    z3 = m3 + sp.Rational(1, 20) * delta
    m2 = out_len / 2
    mq = out_len / 5
    return {
        "nmre": sp.simplify(out_len / (1 + delta)),
        "nmc3c": sp.simplify(m3 / (1 + delta + z3)),
        "nmc2a": sp.simplify(m2 / (1 + delta + m2)),
        "qnmc": sp.simplify(mq / (1 + delta + mq)),
    }


def limiting_rates() -> dict[str, sp.Expr]:
    return {k: sp.limit(v, delta, 0, "+") for k, v in symbolic_rates().items()}
