"""Parameter profiles for the non-malleable extractor and the codes built on it.

A profile fixes every constant of the extractor pipeline. Profiles live in a
plain-text registry (``[NAME]`` headers followed by ``key = value`` lines);
the directory holding ``*.txt`` registry files can be overridden with the
``NMCODEX_PROFILE_DIR`` environment variable.
"""

from __future__ import annotations

import functools
import hashlib
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .codes import EccParams
from .extractors import IpSpec, SeededExtractorSpec
from .fields import MAX_FIELD_SIZE, gf

PROFILE_DIR_ENV = "NMCODEX_PROFILE_DIR"
DEFAULT_REGISTRY_DIR = Path(__file__).parent / "data"

_INT_KEYS = ("n", "y_len", "k", "q", "v", "a", "s", "b", "h", "cb_len", "out_len", "mac_tag_len")
_RATIONAL_KEYS = ("ecc_rate", "eps_prime", "delta1")
_RATE_KEYS = ("rate_nmre", "rate_nmc3c", "rate_nmc2a", "rate_qnmc")


class ProfileError(ValueError):
    pass


def _log2_exact(x: int, what: str) -> int:
    if x < 1 or x & (x - 1):
        raise ProfileError(f"{what} = {x} is not a power of two")
    return x.bit_length() - 1


def _role_offset(role: str, width: int) -> int:
    digest = hashlib.sha256(f"nmcodex-role:{role}".encode()).digest()
    return int.from_bytes(digest, "big") & ((1 << width) - 1)


@dataclass(frozen=True)
class ParameterProfile:
    """Constants of one instantiation.

    ``y_len`` is the second source length (delta * n), ``ecc_rate`` the rate of
    the advice code, ``cb_len`` the correlation-breaker output length
    (n ** delta2), and ``mac_tag_len`` the tag length used by the 3-split
    classical code.
    """

    name: str
    n: int
    y_len: int
    k: int
    ecc_rate: Fraction
    q: int
    v: int
    a: int
    s: int
    b: int
    h: int
    cb_len: int
    out_len: int
    mac_tag_len: int = 1
    eps_prime: Fraction = Fraction(1, 2)
    delta1: Fraction = Fraction(1, 2)
    published: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        for problem in self.violations():
            raise ProfileError(f"profile {self.name}: {problem}")

    # derived quantities

    @property
    def delta(self) -> Fraction:
        return Fraction(self.y_len, self.n)

    @property
    def delta2(self) -> float:
        return math.log(self.cb_len) / math.log(self.n)

    @property
    def log_q(self) -> int:
        return self.q.bit_length() - 1

    @property
    def log_v(self) -> int:
        return self.v.bit_length() - 1

    @property
    def x1_len(self) -> int:
        return 3 * self.k

    @property
    def x2_len(self) -> int:
        return 3 * self.k**3

    @property
    def rand_len(self) -> int:
        return self.n + self.y_len

    def violations(self) -> list[str]:
        out = []
        n, k = self.n, self.k
        if not 0 < self.y_len < n:
            out.append(f"y_len {self.y_len} must lie strictly between 0 and n")
            return out
        if self.delta >= Fraction(1, 2):
            out.append("delta must be below 1/2")
        if self.out_len != math.floor((Fraction(1, 2) - self.delta) * n) or self.out_len < 1:
            out.append(f"out_len {self.out_len} != floor((1/2 - delta) n)")
        try:
            lq = _log2_exact(self.q, "q")
            lv = _log2_exact(self.v, "v")
        except ProfileError as e:
            return out + [str(e)]
        if self.q > MAX_FIELD_SIZE:
            out.append(f"q = {self.q} exceeds the field size limit")
        if self.a != 6 * k + 2 * lq:
            out.append(f"a = {self.a} != 6k + 2 log q = {6 * k + 2 * lq}")
        if self.h != 10 * self.s:
            out.append(f"h = {self.h} != 10 s")
        if (1 << self.h) > MAX_FIELD_SIZE:
            out.append(f"GF(2^{self.h}) exceeds the field size limit")
        if not 0 < self.ecc_rate <= 1:
            out.append("ecc_rate must lie in (0, 1]")
        elif self.v != math.ceil(Fraction(n) / (self.ecc_rate * lq)):
            out.append(f"v = {self.v} != ceil(n / (eps log q))")
        if self.v > self.q:
            out.append(f"v = {self.v} exceeds q = {self.q} (Reed-Solomon length limit)")
        if math.ceil(n / lq) > self.v:
            out.append("advice code message longer than its block length")
        if self.x1_len > self.y_len or self.x2_len > self.y_len:
            out.append(f"prefixes 3k = {self.x1_len}, 3k^3 = {self.x2_len} must fit in y_len = {self.y_len}")
        if lv == 0 or self.x1_len % lv:
            out.append(f"log v = {lv} must divide 3k = {self.x1_len}")
        if not self.b <= self.y_len:
            out.append("Ext1 output b exceeds its source length")
        if not self.s <= self.h:
            out.append("Ext2 output s exceeds its source length h")
        if not self.h <= n:
            out.append("Ext3 output h exceeds n")
        if not 1 <= self.cb_len <= self.y_len:
            out.append("Ext4 output n^delta2 must lie in [1, y_len]")
        if not 1 <= self.mac_tag_len or 2 * self.mac_tag_len >= self.out_len:
            out.append("mac key 2t must leave at least one message bit")
        return out

    # role bindings

    @property
    def ip1(self) -> IpSpec:
        return IpSpec(gf(2, self.log_v), self.x1_len // self.log_v)

    @property
    def ip2(self) -> IpSpec:
        return IpSpec(gf(2, self.h), -(-self.x2_len // self.h))

    @property
    def ecc(self) -> EccParams:
        return EccParams(gf(2, self.log_q), -(-self.n // self.log_q), self.v)

    def _ext(self, role: str, n: int, d: int, m: int, k_extra: float, err: float) -> SeededExtractorSpec:
        width = n + m - 1
        return SeededExtractorSpec(n, d, m, min_entropy=m + k_extra, error=err,
                                   offset=_role_offset(role, width))

    @property
    def extractors(self) -> dict[str, SeededExtractorSpec]:
        e1 = float(self.eps_prime)
        extra1 = 5 * math.log2(1 / e1)
        e2 = float(self.ecc_rate) ** 2
        extra2 = 5 * math.log2(1 / e2)
        return {
            "ext1": self._ext("ext1", self.y_len, self.s, self.b, extra1, e1),
            "ext2": self._ext("ext2", self.h, self.b, self.s, extra1, e1),
            "ext3": self._ext("ext3", self.n, self.b, self.h, extra1, e1),
            "ext4": self._ext("ext4", self.y_len, self.h, self.cb_len, extra2, e2),
            "ext6": self._ext("ext6", self.n, self.cb_len, self.out_len, extra2, e2),
        }

    # schemes

    def supports(self, scheme: str) -> bool:
        if scheme in ("nmre", "nmext", "nmc3c"):
            return True
        if scheme == "nmc2a":
            return self.out_len % 2 == 0
        if scheme == "qnmc":
            return self.out_len % 5 == 0 and 1 <= self.out_len // 5 <= 2
        raise ValueError(f"unknown scheme {scheme!r}")

    @property
    def schemes(self) -> list[str]:
        return [s for s in ("nmre", "nmc3c", "nmc2a", "qnmc") if self.supports(s)]

    def rates(self) -> dict[str, Fraction]:
        """Exact rate (message bits or qubits over total codeword size) of each supported scheme."""
        from .rates import profile_rates

        return profile_rates(self)


def parse_registry(text: str) -> dict[str, dict[str, str]]:
    profiles: dict[str, dict[str, str]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current in profiles:
                raise ProfileError(f"line {lineno}: duplicate profile {current}")
            profiles[current] = {}
            continue
        if current is None or "=" not in line:
            raise ProfileError(f"line {lineno}: expected a [NAME] header or key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        profiles[current][key] = value
    return profiles


def profile_from_fields(name: str, fields: dict[str, str]) -> ParameterProfile:
    known = set(_INT_KEYS) | set(_RATIONAL_KEYS) | set(_RATE_KEYS)
    unknown = set(fields) - known
    if unknown:
        raise ProfileError(f"profile {name}: unknown keys {sorted(unknown)}")
    kwargs = {}
    try:
        for key in _INT_KEYS:
            if key in fields:
                kwargs[key] = int(fields[key])
        for key in _RATIONAL_KEYS:
            if key in fields:
                kwargs[key] = Fraction(fields[key])
        published = {key: Fraction(fields[key]) for key in _RATE_KEYS if key in fields}
    except ValueError as e:
        raise ProfileError(f"profile {name}: {e}") from None
    p = ParameterProfile(name=name, published=published, **kwargs)
    rates = p.rates()
    for key, value in published.items():
        scheme = key.removeprefix("rate_")
        if rates.get(scheme) != value:
            raise ProfileError(f"profile {name}: published {key} = {value} but computed {rates.get(scheme)}")
    return p


def registry_dir() -> Path:
    return Path(os.environ.get(PROFILE_DIR_ENV, DEFAULT_REGISTRY_DIR))


@functools.lru_cache(maxsize=8)
def _load(directory: str) -> dict[str, ParameterProfile]:
    out = {}
    for path in sorted(Path(directory).glob("*.txt")):
        for name, fields in parse_registry(path.read_text()).items():
            if name in out:
                raise ProfileError(f"profile {name} defined twice")
            out[name] = profile_from_fields(name, fields)
    return out


def load_profiles() -> dict[str, ParameterProfile]:
    return _load(str(registry_dir()))


def get_profile(name: str) -> ParameterProfile:
    profiles = load_profiles()
    if name not in profiles:
        raise KeyError(f"unknown profile {name!r}; registered: {', '.join(profiles)}")
    return profiles[name]


def format_profile(p: ParameterProfile) -> str:
    lines = [f"[{p.name}]"]
    for key in _INT_KEYS:
        lines.append(f"{key} = {getattr(p, key)}")
    for key in _RATIONAL_KEYS:
        lines.append(f"{key} = {getattr(p, key)}")
    for scheme, rate in p.rates().items():
        lines.append(f"rate_{scheme} = {rate}")
    return "\n".join(lines) + "\n"
