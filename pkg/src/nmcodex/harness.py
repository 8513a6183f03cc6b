"""Exhaustive split-state tampering experiments and simulator fitting.

Every experiment runs the encoder over the whole randomness space, so all
reported probabilities are exact rationals (integer counts over 2^r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping, Sequence

import numpy as np
from scipy.optimize import linprog

from .bits import BitString, from_hex
from .codecs import BOT, BOT_CODE, ArrayCodec, Nmc3cCodec, NmreCodec
from .extractors import parity

MAX_RAND_BITS = 22


# --- distributions ------------------------------------------------------------------


class DistributionError(ValueError):
    pass


@dataclass(frozen=True)
class Distribution:
    """Finite distribution; probabilities are Fractions (exact) or floats."""

    probs: Mapping[Hashable, Fraction | float]

    def __post_init__(self):
        if not self.probs:
            raise DistributionError("empty distribution")
        if any(v < 0 for v in self.probs.values()):
            raise DistributionError("negative probability")
        total = sum(self.probs.values())
        if abs(float(total) - 1.0) > 1e-12:
            raise DistributionError(f"probabilities sum to {float(total)}, not 1")

    @classmethod
    def point(cls, v) -> "Distribution":
        return cls({v: Fraction(1)})

    @classmethod
    def uniform(cls, support) -> "Distribution":
        support = list(support)
        return cls({v: Fraction(1, len(support)) for v in support})

    @classmethod
    def from_counts(cls, counts: Mapping[Hashable, int]) -> "Distribution":
        total = sum(counts.values())
        return cls({v: Fraction(int(c), total) for v, c in counts.items() if c})

    @property
    def support(self) -> list:
        return [v for v, p in self.probs.items() if p > 0]

    def __getitem__(self, v) -> Fraction | float:
        return self.probs.get(v, 0)

    def items(self):
        return self.probs.items()

    def is_exact(self) -> bool:
        return all(isinstance(p, (int, Fraction)) for p in self.probs.values())

    def mix(self, other: "Distribution", w) -> "Distribution":
        keys = set(self.probs) | set(other.probs)
        return Distribution({k: w * self[k] + (1 - w) * other[k] for k in keys})

    def __str__(self) -> str:
        return " ".join(f"{_label(v)}={p}" for v, p in sorted(self.probs.items(), key=lambda kv: _sort_key(kv[0])))


def _sort_key(v):
    return (1, 0) if v is BOT else (0, v)


def _label(v) -> str:
    return "BOT" if v is BOT else str(v)


def statistical_distance(d1: Distribution, d2: Distribution):
    keys = set(d1.probs) | set(d2.probs)
    return sum(abs(d1[k] - d2[k]) for k in keys) / 2


def min_entropy(d: Distribution) -> float:
    return -math.log2(max(d.probs.values()))


def prefix_distribution(d: Distribution, length: int, d_bits: int) -> Distribution:
    """Law of the first ``d_bits`` bits of a ``length``-bit random string."""
    out: dict = {}
    for v, p in d.items():
        key = v >> (length - d_bits)
        out[key] = out.get(key, 0) + p
    return Distribution(out)


# --- tampering functions ------------------------------------------------------------


@dataclass(frozen=True)
class SplitFunction:
    """A function on one split, described by a primitive for reports."""

    kind: str
    arg: object = None

    def apply(self, v: np.ndarray, length: int) -> np.ndarray:
        v = np.asarray(v, dtype=np.uint64)
        kind, arg = self.kind, self.arg
        if kind == "identity":
            return v
        if kind == "constant":
            _fit(arg, length)
            return np.full(v.shape, arg.value, dtype=np.uint64)
        if kind == "xor":
            _fit(arg, length)
            return v ^ np.uint64(arg.value)
        if kind == "bitflip":
            if not 0 <= arg < length:
                raise ValueError(f"bit index {arg} outside a {length}-bit split")
            return v ^ np.uint64(1 << (length - 1 - arg))
        if kind == "permute":
            if sorted(arg) != list(range(length)):
                raise ValueError(f"{arg} is not a permutation of {length} bit positions")
            out = np.zeros_like(v)
            for j, src in enumerate(arg):
                bit = (v >> np.uint64(length - 1 - src)) & np.uint64(1)
                out |= bit << np.uint64(length - 1 - j)
            return out
        if kind == "table":
            table = np.asarray(arg, dtype=np.uint64)
            if table.size != 1 << length:
                raise ValueError(f"table has {table.size} entries, split domain has {1 << length}")
            if table.size and int(table.max()) >> length:
                raise ValueError("table value wider than the split")
            return table[v]
        if kind == "parity_fold":
            # the bit at position arg is replaced by the parity of the whole split
            out = v & ~np.uint64(1 << (length - 1 - arg))
            return out | (parity(v) << np.uint64(length - 1 - arg))
        raise ValueError(f"unknown tamper primitive {kind!r}")

    def __str__(self) -> str:
        if self.kind == "identity":
            return "identity"
        if self.kind in ("constant", "xor"):
            return f"{self.kind}:{self.arg.to_hex()}"
        if self.kind in ("bitflip", "parity_fold"):
            return f"{self.kind}:{self.arg}"
        if self.kind == "permute":
            return "permute:" + ",".join(map(str, self.arg))
        return "table:" + ",".join(str(int(t)) for t in self.arg)


def _fit(b: BitString, length: int):
    if b.length != length:
        raise ValueError(f"{b.length}-bit constant for a {length}-bit split")


IDENTITY = SplitFunction("identity")


def parse_primitive(text: str) -> SplitFunction:
    text = text.strip()
    kind, _, arg = text.partition(":")
    if kind == "identity" and not arg:
        return IDENTITY
    if kind in ("constant", "xor"):
        return SplitFunction(kind, from_hex(arg))
    if kind in ("bitflip", "parity_fold"):
        return SplitFunction(kind, int(arg))
    if kind == "permute":
        return SplitFunction(kind, tuple(int(i) for i in arg.split(",")))
    if kind == "table":
        return SplitFunction(kind, tuple(int(t, 0) for t in arg.split(",")))
    raise ValueError(f"unknown tamper primitive {text!r}")


@dataclass(frozen=True)
class ClassicalTamper:
    """Per-split functions, optionally mixed over a shared random seed.

    ``branches`` is a list of (probability, {split name: SplitFunction}); splits
    missing from a branch are left untouched.
    """

    branches: tuple[tuple[Fraction, dict], ...]
    name: str = ""

    def __post_init__(self):
        if not self.branches:
            raise ValueError("tamper needs at least one branch")
        if sum(w for w, _ in self.branches) != 1:
            raise ValueError("shared-randomness probabilities do not sum to 1")
        if any(w < 0 for w, _ in self.branches):
            raise ValueError("negative shared-randomness probability")

    @classmethod
    def single(cls, name: str = "", **funcs: SplitFunction) -> "ClassicalTamper":
        return cls(((Fraction(1), dict(funcs)),), name)

    @classmethod
    def identity(cls) -> "ClassicalTamper":
        return cls.single("identity")

    @property
    def is_identity(self) -> bool:
        return all(f.kind == "identity" for _, fs in self.branches for f in fs.values())

    def __str__(self) -> str:
        lines = []
        for w, fs in self.branches:
            if len(self.branches) > 1:
                lines.append(f"[seed {w}]")
            lines.extend(f"{k} = {f}" for k, f in sorted(fs.items()))
        return "\n".join(lines)


def parse_tamper(text: str, name: str = "") -> ClassicalTamper:
    """Tamper spec text.

    Either a single primitive applied to every split (``identity``,
    ``bitflip:0``) or ``split = primitive`` lines, optionally grouped in
    ``[seed <probability>]`` sections for shared randomness.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if len(lines) == 1 and "=" not in lines[0] and not lines[0].startswith("["):
        return ClassicalTamper(((Fraction(1), {"*": parse_primitive(lines[0])}),), name or lines[0])
    branches: list[tuple[Fraction, dict]] = []
    current: dict | None = None
    for ln in lines:
        if ln.startswith("[") and ln.endswith("]"):
            head = ln[1:-1].split()
            if len(head) != 2 or head[0] != "seed":
                raise ValueError(f"bad section header {ln!r}")
            current = {}
            branches.append((Fraction(head[1]), current))
            continue
        if "=" not in ln:
            raise ValueError(f"expected split = primitive, got {ln!r}")
        if current is None:
            current = {}
            branches.append((Fraction(1), current))
        split, prim = (s.strip() for s in ln.split("=", 1))
        current[split] = parse_primitive(prim)
    return ClassicalTamper(tuple(branches), name)


def _funcs_for(codec: ArrayCodec, funcs: dict) -> list[SplitFunction]:
    unknown = set(funcs) - set(codec.split_names) - {"*"}
    if unknown:
        raise ValueError(f"splits {sorted(unknown)} not in {codec.split_names}")
    default = funcs.get("*", IDENTITY)
    return [funcs.get(name, default) for name in codec.split_names]


def _apply(codec: ArrayCodec, funcs: dict, splits) -> tuple[np.ndarray, ...]:
    return tuple(f.apply(s, n) for f, s, n in zip(_funcs_for(codec, funcs), splits, codec.split_lens))


# --- experiments -----------------------------------------------------------------


def _rand_space(codec: ArrayCodec) -> np.ndarray:
    if codec.rand_len > MAX_RAND_BITS:
        raise ValueError(f"{codec.rand_len}-bit randomness space exceeds 2^{MAX_RAND_BITS}")
    return np.arange(1 << codec.rand_len, dtype=np.uint64)


def _counts_to_dist(weights: Sequence[Fraction], per_branch: list[np.ndarray]) -> Distribution:
    out: dict = {}
    for w, vals in zip(weights, per_branch):
        keys, counts = np.unique(vals, return_counts=True)
        n = vals.size
        for k, c in zip(keys.tolist(), counts.tolist()):
            key = BOT if k == BOT_CODE else k
            out[key] = out.get(key, 0) + w * Fraction(c, n)
    return Distribution(out)


def tampered_outputs(codec: ArrayCodec, funcs: dict, msg: int, r: np.ndarray) -> np.ndarray:
    return codec.decode(_apply(codec, funcs, codec.encode(msg, r)))


def tamper_distribution(codec: ArrayCodec, tamper: ClassicalTamper, message: int) -> Distribution:
    """Exact law of Dec(tamper(Enc(message, r))) over uniform r and the tamper seed."""
    r = _rand_space(codec)
    outs = [tampered_outputs(codec, fs, message, r) for _, fs in tamper.branches]
    return _counts_to_dist([w for w, _ in tamper.branches], outs)


def joint_distribution(codec: ArrayCodec, tamper: ClassicalTamper, messages: Sequence[int] | None = None):
    """Exact joint law of (M, M') as a dict keyed by (m, m').

    For the NMRE the message is the untampered decoding of uniform randomness;
    for codes it is uniform over ``messages`` (all messages by default).
    """
    r = _rand_space(codec)
    out: dict = {}
    if isinstance(codec, NmreCodec):
        splits = codec.encode(0, r)
        m = codec.decode(splits)
        for w, fs in tamper.branches:
            mp = codec.decode(_apply(codec, fs, splits))
            _accumulate(out, m, mp, w / r.size)
        return out
    messages = range(1 << codec.msg_len) if messages is None else list(messages)
    for msg in messages:
        for w, fs in tamper.branches:
            mp = tampered_outputs(codec, fs, msg, r)
            _accumulate(out, np.full(r.shape, msg), mp, w / (r.size * len(messages)))
    return out


def _accumulate(out: dict, m: np.ndarray, mp: np.ndarray, unit: Fraction):
    pairs = np.stack([m.astype(np.int64), mp.astype(np.int64)], axis=1)
    keys, counts = np.unique(pairs, axis=0, return_counts=True)
    for (a, b), c in zip(keys.tolist(), counts.tolist()):
        key = (a, BOT if b == BOT_CODE else b)
        out[key] = out.get(key, 0) + c * unit


# --- simulator fitting ------------------------------------------------------------


@dataclass(frozen=True)
class SimulatorFit:
    """epsilon_star = min over (p, gamma) of the worst-message distance to p*same + (1-p)*gamma."""

    epsilon_star: float | Fraction
    p_star: float | Fraction
    gamma_star: Distribution
    exact: bool = False

    def report(self) -> str:
        return "\n".join([
            f"epsilon_star: {float(self.epsilon_star):.12g}",
            f"p_star: {float(self.p_star):.12g}",
            f"exact: {str(self.exact).lower()}",
            f"gamma_star: {self.gamma_star}",
        ])


def _universe(dists: Sequence[Distribution], extra=()) -> list:
    keys = set(extra)
    for d in dists:
        keys |= set(d.probs)
    return sorted(keys, key=_sort_key)


def _clean_gamma(universe: list, w: np.ndarray, p: float) -> Distribution:
    w = np.clip(w, 0, None)
    if 1 - p < 1e-12 or w.sum() <= 0:
        return Distribution.point(universe[0])
    w = w / w.sum()
    return Distribution({u: float(x) for u, x in zip(universe, w) if x > 0})


def _minimax_lp(targets: list[np.ndarray], same: list[np.ndarray]):
    """min_{p, w >= 0, sum w = 1 - p} max_i 0.5 * || T_i - p S_i - w ||_1.

    T_i, S_i are vectors over a shared universe of size U. Returns (t, p, w).
    """
    k = len(targets)
    U = targets[0].size
    # variables: t, p, w[U], e[k*U]
    nv = 2 + U + k * U
    c = np.zeros(nv)
    c[0] = 1.0
    A, b = [], []
    for i in range(k):
        for u in range(U):
            e = 2 + U + i * U + u
            # +-(T - p S - s w) <= e
            for sign in (1, -1):
                row = np.zeros(nv)
                row[1] = sign * same[i][u]
                row[2 + u] = sign
                row[e] = -1.0
                A.append(row)
                b.append(sign * targets[i][u])
        row = np.zeros(nv)
        row[2 + U + i * U: 2 + U + (i + 1) * U] = 0.5
        row[0] = -1.0
        A.append(row)
        b.append(0.0)
    eq = np.zeros((1, nv))
    eq[0, 1] = 1.0
    eq[0, 2:2 + U] = 1.0
    bounds = [(0, None), (0, 1)] + [(0, None)] * (U + k * U)
    res = linprog(c, A_ub=np.array(A), b_ub=np.array(b), A_eq=eq, b_eq=[1.0], bounds=bounds, method="highs")
    if not res.success:  # pragma: no cover - the LP is always feasible and bounded
        raise RuntimeError(f"simulator LP failed: {res.message}")
    return float(res.x[0]), float(res.x[1]), res.x[2:2 + U]


def fit_simulator(per_message: Mapping[Hashable, Distribution]) -> SimulatorFit:
    """Best (p, gamma) with D_m close to p * delta_m + (1 - p) * gamma for every m.

    Exact decompositions (all D_m equal to delta_m, or all D_m equal) are
    detected with rational arithmetic and reported with epsilon_star = 0.
    """
    if not per_message:
        raise ValueError("no message distributions to fit")
    msgs = list(per_message)
    dists = [per_message[m] for m in msgs]
    if all(d[m] == 1 for m, d in zip(msgs, dists)):
        return SimulatorFit(Fraction(0), Fraction(1), Distribution.point(msgs[0]), exact=True)
    if all(statistical_distance(d, dists[0]) == 0 for d in dists[1:]):
        return SimulatorFit(Fraction(0), Fraction(0), dists[0], exact=True)
    universe = _universe(dists, msgs)
    pos = {u: i for i, u in enumerate(universe)}
    targets = [np.array([float(d[u]) for u in universe]) for d in dists]
    same = []
    for m in msgs:
        s = np.zeros(len(universe))
        s[pos[m]] = 1.0
        same.append(s)
    eps, p, w = _minimax_lp(targets, same)
    return SimulatorFit(max(eps, 0.0), p, _clean_gamma(universe, w, p))


def naive_fit_epsilon(per_message: Mapping[Hashable, Distribution]) -> float:
    """Distance achieved by p = 0 and gamma = the average of the D_m."""
    dists = list(per_message.values())
    keys = _universe(dists)
    avg = Distribution({k: sum(float(d[k]) for d in dists) / len(dists) for k in keys})
    return max(float(statistical_distance(d, avg)) for d in dists)


def fit_joint(joint: Mapping[tuple, Fraction | float]) -> SimulatorFit:
    """Best (p, eta) with the law of (M, M') close to p * (M, M) + (1 - p) * (M x eta) in total variation."""
    msgs = sorted({m for m, _ in joint})
    pm = {m: sum(v for (a, _), v in joint.items() if a == m) for m in msgs}
    outs = sorted({b for _, b in joint} | set(msgs), key=_sort_key)
    if all(a == b for (a, b), v in joint.items() if v):
        return SimulatorFit(Fraction(0), Fraction(1), Distribution.point(msgs[0]), exact=True)
    cond = {m: {b: joint.get((m, b), 0) / pm[m] for b in outs} for m in msgs}
    if all(cond[m] == cond[msgs[0]] for m in msgs):
        eta = Distribution({b: v for b, v in cond[msgs[0]].items() if v})
        return SimulatorFit(Fraction(0), Fraction(0), eta, exact=True)
    U = len(outs)
    # one block per message m: row vector over outcomes of J(m, .); the model is
    # p * P(m) * delta_m + P(m) * w, and the distance sums (not maxes) over m
    targets = [np.array([float(joint.get((m, b), 0)) for b in outs]) for m in msgs]
    same = [np.array([float(pm[m]) if b == m else 0.0 for b in outs]) for m in msgs]
    scale = [float(pm[m]) for m in msgs]
    eps, p, w = _sum_lp(targets, same, scale, U)
    return SimulatorFit(max(eps, 0.0), p, _clean_gamma(outs, w, p))


def _sum_lp(targets, same, scale, U):
    """min 0.5 * sum_i || T_i - p S_i - scale_i w ||_1 subject to w >= 0, sum w = 1 - p."""
    k = len(targets)
    nv = 1 + U + k * U
    c = np.zeros(nv)
    c[1 + U:] = 0.5
    A, b = [], []
    for i in range(k):
        for u in range(U):
            for sign in (1, -1):
                row = np.zeros(nv)
                row[0] = sign * same[i][u]
                row[1 + u] = sign * scale[i]
                row[1 + U + i * U + u] = -1.0
                A.append(row)
                b.append(sign * targets[i][u])
    eq = np.zeros((1, nv))
    eq[0, 0] = 1.0
    eq[0, 1:1 + U] = 1.0
    bounds = [(0, 1)] + [(0, None)] * (U + k * U)
    res = linprog(c, A_ub=np.array(A), b_ub=np.array(b), A_eq=eq, b_eq=[1.0], bounds=bounds, method="highs")
    if not res.success:  # pragma: no cover
        raise RuntimeError(f"joint simulator LP failed: {res.message}")
    return float(res.fun), float(res.x[0]), res.x[1:1 + U]


# --- reports ----------------------------------------------------------------------


@dataclass
class TamperReport:
    scheme: str
    profile: str
    tamper: str
    advice: bool
    joint_fit: SimulatorFit
    per_message_fit: SimulatorFit
    p_unchanged: Fraction | None
    conditional_distance: float | None
    per_message: dict = field(default_factory=dict)

    @property
    def epsilon_star(self):
        return self.joint_fit.epsilon_star

    def render(self) -> str:
        lines = [
            "[report]",
            f"scheme: {self.scheme}",
            f"profile: {self.profile}",
            f"advice: {str(self.advice).lower()}",
            f"tamper: {self.tamper.replace(chr(10), '; ')}",
        ]
        if self.p_unchanged is not None:
            # only computed for the extractor-based encoder
            lines += [
                f"p_unchanged: {float(self.p_unchanged):.12g}",
                f"changed_output_distance: {self.conditional_distance:.12g}",
            ]
        lines += [
            "[joint_fit]",
            self.joint_fit.report(),
            "[per_message_fit]",
            self.per_message_fit.report(),
            "[distributions]",
        ]
        lines += [f"{_label(m)}: {d}" for m, d in sorted(self.per_message.items(), key=lambda kv: _sort_key(kv[0]))]
        return "\n".join(lines) + "\n"


def _per_message(joint: Mapping[tuple, Fraction]) -> dict:
    msgs = sorted({m for m, _ in joint})
    out = {}
    for m in msgs:
        row = {b: v for (a, b), v in joint.items() if a == m and v}
        total = sum(row.values())
        out[m] = Distribution({b: v / total for b, v in row.items()})
    return out


def _changed_distance(codec: ArrayCodec, tamper: ClassicalTamper) -> tuple[Fraction, float]:
    """Pr[tampered splits equal the originals] and, conditioned on a change,
    the distance of (M, M') from uniform(M) x law(M')."""
    r = _rand_space(codec)
    m_bits = codec.msg_len
    unchanged = Fraction(0)
    pairs_all = []
    weights = []
    for w, fs in tamper.branches:
        if isinstance(codec, NmreCodec):
            splits = codec.encode(0, r)
            m = codec.decode(splits)
            tampered = _apply(codec, fs, splits)
            mp = codec.decode(tampered)
            same = np.ones(r.shape, dtype=bool)
            for a, b in zip(splits, tampered):
                same &= a == b
            unchanged += w * Fraction(int(same.sum()), r.size)
            pairs_all.append((m[~same], mp[~same]))
            weights.append(w / r.size)
    if not pairs_all or unchanged == 1:
        return unchanged, 0.0
    n_out = 1 << m_bits
    hist = np.zeros((n_out, n_out + 1))
    for (m, mp), w in zip(pairs_all, weights):
        idx = m * (n_out + 1) + np.where(mp == BOT_CODE, n_out, mp)
        hist += float(w) * np.bincount(idx, minlength=n_out * (n_out + 1)).reshape(n_out, n_out + 1)
    hist /= hist.sum()
    prod = np.full(n_out, 1.0 / n_out)[:, None] * hist.sum(axis=0)[None, :]
    return unchanged, 0.5 * float(np.abs(hist - prod).sum())


def tamper_report(codec: ArrayCodec, tamper: ClassicalTamper) -> TamperReport:
    joint = joint_distribution(codec, tamper)
    per = _per_message(joint)
    if isinstance(codec, NmreCodec):
        unchanged, cond = _changed_distance(codec, tamper)
    else:
        unchanged, cond = None, None
    return TamperReport(
        scheme=codec.scheme,
        profile=codec.profile.name,
        tamper=str(tamper) or tamper.name,
        advice=codec.advice,
        joint_fit=fit_joint(joint),
        per_message_fit=fit_simulator(per),
        p_unchanged=unchanged,
        conditional_distance=cond,
        per_message=per,
    )


def nmre_tamper_report(profile, tamper: ClassicalTamper, advice: bool = True) -> TamperReport:
    return tamper_report(NmreCodec(profile, advice), tamper)


# --- privacy ----------------------------------------------------------------------


def share_distribution(codec: ArrayCodec, subset: Sequence[str], message: int) -> np.ndarray:
    """Counts of the joint values of the chosen shares over all randomness."""
    r = _rand_space(codec)
    splits = dict(zip(codec.split_names, codec.encode(message, r)))
    lens = dict(zip(codec.split_names, codec.split_lens))
    key = np.zeros(r.shape, dtype=np.uint64)
    width = 0
    for name in subset:
        key = (key << np.uint64(lens[name])) | splits[name]
        width += lens[name]
    if width > 26:
        raise ValueError("share subset too wide to histogram")
    return np.bincount(key.astype(np.int64), minlength=1 << width)


def privacy_distance(codec: ArrayCodec, subset: Sequence[str]) -> Fraction:
    """Max over message pairs of the exact distance between the subset's share laws."""
    unknown = set(subset) - set(codec.split_names)
    if unknown:
        raise ValueError(f"unknown shares {sorted(unknown)}")
    msgs = range(1 << codec.msg_len)
    hists = [share_distribution(codec, subset, m) for m in msgs]
    total = 1 << codec.rand_len
    worst = 0
    for i in range(len(hists)):
        for j in range(i + 1, len(hists)):
            worst = max(worst, int(np.abs(hists[i] - hists[j]).sum()))
    return Fraction(worst, 2 * total)


def extractor_distance(codec: ArrayCodec, given: str | None = None) -> Fraction:
    """Exact distance of the extractor output R from uniform, jointly with x or y if named."""
    p = codec.profile
    r = _rand_space(codec)
    x, y = codec.split_rand(r)
    out = codec.nmext(x, y).astype(np.int64)
    n_out = 1 << p.out_len
    if given is None:
        side, side_len = np.zeros_like(out), 0
    elif given == "x":
        side, side_len = x.astype(np.int64), p.n
    elif given == "y":
        side, side_len = y.astype(np.int64), p.y_len
    else:
        raise ValueError(f"side information must be x or y, got {given!r}")
    hist = np.bincount(side * n_out + out, minlength=n_out << side_len).reshape(-1, n_out)
    # uniform output, same side marginal: hist.sum(1) / n_out per cell, all in units of 1/2^r
    ideal_num = hist.sum(axis=1, keepdims=True)
    return Fraction(int(np.abs(hist * n_out - ideal_num).sum()), 2 * n_out * r.size)


def privacy_bound(codec: Nmc3cCodec, subset: Sequence[str]) -> Fraction:
    """Upper bound on privacy_distance implied by the extractor's measured distance.

    With R exactly uniform (given the other shares in the subset) the z share
    is independent of the message, so each message's share law is within
    the extractor distance of the same ideal law.
    """
    s = set(subset)
    if s == set(codec.split_names):
        return Fraction(1)
    if "z" not in s:
        return Fraction(0)
    side = next((v for v in ("x", "y") if v in s), None)
    return 2 * extractor_distance(codec, side)
