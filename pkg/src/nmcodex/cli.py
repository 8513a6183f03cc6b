"""Command-line front end.

    nmcodex <scheme> <command> [--profile P] [--seed S] [--spec FILE] [--x HEX] [--y HEX]

Exit codes: 0 ok, 1 failed audit or other error, 2 unknown profile,
3 malformed hex, 4 incompatible scheme/command.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bits import BitString, from_hex, to_hex
from .codecs import (
    BOT,
    CodecError,
    Codeword2,
    Codeword3,
    SeededEncoder,
    array_codec,
    nmc2a_decode,
    nmc2a_encode,
    nmc3c_decode,
    nmc3c_encode,
    nmre_decode,
    nmre_encode,
    parse_codeword,
    serialize_codeword,
)
from .profiles import ParameterProfile, ProfileError, get_profile

EXIT_FAIL = 1
EXIT_UNKNOWN_PROFILE = 2
EXIT_BAD_HEX = 3
EXIT_INCOMPATIBLE = 4

COMMANDS = {
    "nmext": {"eval", "bench", "audit"},
    "nmre": {"encode", "decode", "tamper", "audit", "bench"},
    "nmc3c": {"encode", "decode", "tamper", "audit", "bench"},
    "nmc2a": {"encode", "decode", "tamper", "audit", "bench"},
    "qnmc": {"encode", "decode", "tamper", "audit", "bench"},
}


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    scheme: str
    command: str
    profile: str
    seed: int = 0
    spec: str | None = None
    x: str | None = None
    y: str | None = None

    def validate(self):
        if self.scheme not in COMMANDS:
            raise CliError(EXIT_INCOMPATIBLE, f"unknown scheme {self.scheme!r}")
        if self.command not in COMMANDS[self.scheme]:
            raise CliError(EXIT_INCOMPATIBLE, f"command {self.command!r} is not available for {self.scheme}")


def _hex(s: str, what: str) -> BitString:
    try:
        return from_hex(s)
    except ValueError as e:
        raise CliError(EXIT_BAD_HEX, f"malformed hex for {what}: {e}") from None


def _profile(cfg: RunConfig) -> ParameterProfile:
    try:
        p = get_profile(cfg.profile)
    except KeyError as e:
        raise CliError(EXIT_UNKNOWN_PROFILE, str(e.args[0])) from None
    scheme = "nmext" if cfg.scheme == "nmext" else cfg.scheme
    if not p.supports(scheme):
        raise CliError(EXIT_INCOMPATIBLE, f"profile {p.name} does not support {cfg.scheme}")
    return p


def _stdin_tokens(stdin) -> list[str]:
    return stdin.read().split()


# --- commands ------------------------------------------------------------------------


def _eval(cfg: RunConfig, p: ParameterProfile, out):
    from .nmext import two_nmext_trace

    if cfg.x is None or cfg.y is None:
        raise CliError(EXIT_INCOMPATIBLE, "nmext eval needs --x and --y")
    x, y = _hex(cfg.x, "--x"), _hex(cfg.y, "--y")
    if x.length != p.n or y.length != p.y_len:
        raise CliError(EXIT_BAD_HEX, f"profile {p.name} needs {p.n}-bit x and {p.y_len}-bit y")
    tr = two_nmext_trace(x, y, p)
    out.write(f"profile: {p.name}\nr: {tr.r}\nadvice: {to_hex(tr.g)}\n")
    out.write(f"z0: {to_hex(tr.z[0])}\nz_final: {to_hex(tr.z[-1])}\ns: {to_hex(tr.s)}\n")
    out.write(f"output: {to_hex(tr.out)}\n")


def _encode(cfg: RunConfig, p: ParameterProfile, stdin, out):
    enc = SeededEncoder(p, cfg.seed)
    if cfg.scheme == "nmre":
        res = nmre_encode(enc.randomness(), p)
        out.write(f"message: {to_hex(res.message)}\n")
        out.write(f"codeword: {serialize_codeword((res.x, res.y))}\n")
        return
    if cfg.scheme == "qnmc":
        from .quantum import qnmc_encode, state_from_json, state_to_json

        state = state_from_json(stdin.read())
        z, y, x = qnmc_encode(state, enc.randomness(), p)
        out.write(json.dumps({"z_state": json.loads(state_to_json(z)), "y": to_hex(y), "x": to_hex(x)}) + "\n")
        return
    for tok in _stdin_tokens(stdin):
        msg = _hex(tok, "message")
        try:
            c = nmc3c_encode(msg, enc.randomness(), p) if cfg.scheme == "nmc3c" else nmc2a_encode(msg, enc.randomness(), p)
        except CodecError as e:
            raise CliError(EXIT_BAD_HEX, str(e)) from None
        out.write(serialize_codeword(c) + "\n")


def _decode(cfg: RunConfig, p: ParameterProfile, stdin, out):
    if cfg.scheme == "qnmc":
        from .quantum import qnmc_decode, state_from_json, state_to_json

        obj = json.loads(stdin.read())
        z = state_from_json(json.dumps(obj["z_state"]))
        res = qnmc_decode(z, _hex(obj["y"], "y"), _hex(obj["x"], "x"), p)
        out.write(state_to_json(res) + "\n")
        return
    if (cfg.x is None) != (cfg.y is None):
        raise CliError(EXIT_FAIL, "--x and --y must be given together")
    if cfg.scheme == "nmre" and cfg.x is not None:
        tokens = [serialize_codeword((_hex(cfg.x, "--x"), _hex(cfg.y, "--y")))]
    else:
        tokens = _stdin_tokens(stdin)
    for tok in tokens:
        try:
            c = parse_codeword(tok)
        except ValueError as e:
            raise CliError(EXIT_BAD_HEX, str(e)) from None
        try:
            if cfg.scheme == "nmre":
                res = nmre_decode(c.x, c.yz, p) if isinstance(c, Codeword2) else None
                if res is None:
                    raise CodecError("NMRE codewords have two splits")
            elif cfg.scheme == "nmc3c":
                if not isinstance(c, Codeword3):
                    raise CodecError("3-split codewords have three splits")
                res = nmc3c_decode(c, p)
            else:
                if not isinstance(c, Codeword2):
                    raise CodecError("2-split codewords have two splits")
                res = nmc2a_decode(c, p)
        except CodecError as e:
            raise CliError(EXIT_BAD_HEX, str(e)) from None
        out.write(("BOT" if res is BOT else to_hex(res)) + "\n")


def _spec_text(cfg: RunConfig) -> str:
    if cfg.spec is None:
        return "identity"
    path = Path(cfg.spec)
    return path.read_text() if path.is_file() else cfg.spec


def _tamper(cfg: RunConfig, p: ParameterProfile, out):
    text = _spec_text(cfg)
    if cfg.scheme == "qnmc":
        from .quantum import PauliOp, max_entangled, pauli_tamper_experiment

        label = text.strip()
        label = "I" * (p.out_len // 5) if label == "identity" else label
        res = pauli_tamper_experiment(max_entangled(p.out_len // 5), PauliOp.from_label(label), p)
        out.write("[report]\nscheme: qnmc\n")
        out.write(f"profile: {p.name}\ntamper: pauli {label}\np: {res.p:.12g}\n")
        out.write(f"deviation: {res.deviation:.12g}\nsampling_bias: {res.bias:.12g}\n")
        return
    from .harness import tamper_report, parse_tamper

    try:
        tamper = parse_tamper(text)
        report = tamper_report(array_codec(cfg.scheme, p), tamper)
    except ValueError as e:
        raise CliError(EXIT_BAD_HEX if "hex" in str(e) else EXIT_FAIL, f"bad tamper spec: {e}") from None
    out.write(report.render())


def _bench(cfg: RunConfig, p: ParameterProfile, out):
    from .nmext import two_nmext_words

    rng = np.random.default_rng(cfg.seed)
    count = 1 << 14
    x = rng.integers(0, 1 << p.n, count, dtype=np.uint64)
    y = rng.integers(0, 1 << p.y_len, count, dtype=np.uint64)
    start = time.perf_counter()
    two_nmext_words(x, y, p)
    elapsed = time.perf_counter() - start
    out.write(f"profile: {p.name}\nevaluations: {count}\nseconds: {elapsed:.4f}\n")
    out.write(f"evaluations_per_second: {count / elapsed:.1f}\n")


def audit_checks(scheme: str, p: ParameterProfile) -> list[tuple[str, bool, str]]:
    """Property checks for one scheme at one profile: (name, ok, detail).

    ``ok`` is None for informational lines.
    """
    from . import harness
    from .authenticators import mac_forgery_probability
    from .nmext import MAX_TABLE_BITS, nmext_table, two_nmext, two_nmext_words

    checks = []
    rates = p.rates()
    for key, value in p.published.items():
        s = key.removeprefix("rate_")
        checks.append((f"published {key}", rates.get(s) == value, f"{value}"))
    exhaustive = p.rand_len <= MAX_TABLE_BITS
    if scheme == "nmext" or scheme == "nmre":
        rng = np.random.default_rng(0)
        x = rng.integers(0, 1 << p.n, 256, dtype=np.uint64)
        y = rng.integers(0, 1 << p.y_len, 256, dtype=np.uint64)
        a, b = two_nmext_words(x, y, p), two_nmext_words(x, y, p)
        checks.append(("deterministic output", bool((a == b).all()), "256 random inputs"))
        if exhaustive:
            t = nmext_table(p)
            counts = np.bincount(t.astype(np.int64), minlength=1 << p.out_len)
            dist = Fraction(int(np.abs(counts * (1 << p.out_len) - t.size).sum()), 2 * t.size << p.out_len)
            checks.append(("output distance from uniform", None, f"{float(dist):.6g}"))
    if scheme in ("nmre", "nmc3c", "nmc2a") and exhaustive:
        codec = array_codec(scheme, p)
        r = np.arange(1 << codec.rand_len, dtype=np.uint64)
        msgs = [0] if scheme == "nmre" else range(1 << codec.msg_len)
        ok = True
        for m in msgs:
            splits = codec.encode(m, r)
            dec = codec.decode(splits)
            if scheme == "nmre":
                # table lookups must agree with the bit-level pipeline
                for i in np.random.default_rng(2).integers(0, r.size, 64):
                    x, y = (BitString(int(s[i]), n) for s, n in zip(splits, codec.split_lens))
                    ok &= int(dec[i]) == two_nmext(x, y, p).value
            else:
                ok &= bool((dec == m).all())
        checks.append(("exhaustive correctness", ok, f"{len(msgs)} messages x 2^{codec.rand_len}"))
        ident = harness.tamper_report(codec, harness.ClassicalTamper.identity())
        checks.append(("identity tamper epsilon = 0", ident.epsilon_star == 0, str(ident.epsilon_star)))
        const = {name: harness.SplitFunction("constant", BitString(0, n)) for name, n in zip(codec.split_names, codec.split_lens)}
        crep = harness.tamper_report(codec, harness.ClassicalTamper.single("constant", **const))
        checks.append(("constant tamper epsilon = 0", crep.epsilon_star == 0, str(crep.epsilon_star)))
    if scheme == "nmc3c" and exhaustive:
        codec = array_codec(scheme, p)
        priv = harness.privacy_distance(codec, ["x", "y"])
        checks.append(("privacy of {x, y} is exact", priv == 0, str(priv)))
        if codec.mac.key_len + codec.mac.msg_len <= 16:
            forge = mac_forgery_probability(codec.mac)
            checks.append(("MAC forgery within bound", forge <= codec.mac.forgery_bound, f"{forge} <= {codec.mac.forgery_bound}"))
    if scheme == "qnmc":
        from .bits import BitString as B
        from .quantum import max_entangled, qnmc_decode, qnmc_encode, sc_enumerate

        m = p.out_len // 5
        checks.append(("SC order", len(sc_enumerate(m)) == 2 ** (5 * m) - 2 ** (3 * m), str(2 ** (5 * m) - 2 ** (3 * m))))
        st = max_entangled(m)
        rng = np.random.default_rng(1)
        worst = 1.0
        for _ in range(16):
            r = B(int(rng.integers(0, 1 << p.rand_len)), p.rand_len)
            worst = min(worst, qnmc_decode(*qnmc_encode(st, r, p), p).fidelity(st))
        checks.append(("round-trip fidelity", worst >= 1 - 1e-9, f"{worst:.15f}"))
    return checks


def _audit(cfg: RunConfig, p: ParameterProfile, out) -> int:
    checks = audit_checks(cfg.scheme, p)
    out.write(f"[audit]\nscheme: {cfg.scheme}\nprofile: {p.name}\n[checks]\n")
    for name, ok, detail in checks:
        status = "info" if ok is None else "pass" if ok else "FAIL"
        out.write(f"{name}: {status} ({detail})\n")
    failed = sum(ok is False for _, ok, _ in checks)
    out.write(f"[summary]\nchecks: {len(checks)}\nfailed: {failed}\n")
    return EXIT_FAIL if failed else 0


def run(cfg: RunConfig, stdin=None, out=None) -> int:
    stdin = stdin or sys.stdin
    out = out or sys.stdout
    cfg.validate()
    p = _profile(cfg)
    if cfg.command == "eval":
        _eval(cfg, p, out)
    elif cfg.command == "encode":
        _encode(cfg, p, stdin, out)
    elif cfg.command == "decode":
        _decode(cfg, p, stdin, out)
    elif cfg.command == "tamper":
        _tamper(cfg, p, out)
    elif cfg.command == "bench":
        _bench(cfg, p, out)
    elif cfg.command == "audit":
        return _audit(cfg, p, out)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FAIL, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="nmcodex", description="Split-state non-malleable codes at toy parameters.")
    ap.add_argument("scheme", help="nmre, nmc3c, nmc2a, qnmc or nmext")
    ap.add_argument("command", help="encode, decode, tamper, audit, bench or eval")
    ap.add_argument("--profile", default=None, help="registered profile name (default XS, S for qnmc)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--spec", default=None, help="tamper spec file or inline spec")
    ap.add_argument("--x", default=None, help="x split as <bits>:<hex>")
    ap.add_argument("--y", default=None, help="y split as <bits>:<hex>")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    profile = args.profile or ("S" if args.scheme == "qnmc" else "XS")
    cfg = RunConfig(args.scheme, args.command, profile, args.seed, args.spec, args.x, args.y)
    try:
        return run(cfg)
    except CliError as e:
        print(f"nmcodex: {e}", file=sys.stderr)
        return e.code
    except (ProfileError, ValueError) as e:
        print(f"nmcodex: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
