import io
import json
import subprocess
import sys

import pytest

from nmcodex.cli import main
from nmcodex.quantum import max_entangled, state_to_json


def run(args, stdin="", monkeypatch=None, capsys=None):
    monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def _kv(text):
    return dict(line.split(": ", 1) for line in text.splitlines() if ": " in line)


def test_nmext_eval(monkeypatch, capsys):
    code, out, _ = run(["nmext", "eval", "--profile", "XS", "--x", "14:aacc", "--y", "3:a"], "", monkeypatch, capsys)
    kv = _kv(out)
    assert code == 0
    assert kv["output"] == "4:3"
    assert kv["r"] == "7"


def test_encode_decode_pipeline(monkeypatch, capsys):
    code, out, _ = run(["nmc3c", "encode", "--seed", "5"], "2:0 2:4 2:8 2:c", monkeypatch, capsys)
    assert code == 0
    code, dec, _ = run(["nmc3c", "decode"], out, monkeypatch, capsys)
    assert dec.split() == ["2:0", "2:4", "2:8", "2:c"]


def test_encode_is_deterministic(monkeypatch, capsys):
    a = run(["nmc2a", "encode", "--seed", "9"], "2:4", monkeypatch, capsys)[1]
    b = run(["nmc2a", "encode", "--seed", "9"], "2:4", monkeypatch, capsys)[1]
    assert a == b
    assert run(["nmc2a", "decode"], a, monkeypatch, capsys)[1].strip() == "2:4"


def test_tampered_codeword_rejected(monkeypatch, capsys):
    out = run(["nmc3c", "encode"], "2:8", monkeypatch, capsys)[1].strip()
    parts = out.split(":")
    parts[-1] = format(int(parts[-1], 16) ^ 2, "x")  # flip the tag bit
    assert run(["nmc3c", "decode"], ":".join(parts), monkeypatch, capsys)[1].strip() == "BOT"


def test_nmre_encode_decode(monkeypatch, capsys):
    kv = _kv(run(["nmre", "encode", "--seed", "1"], "", monkeypatch, capsys)[1])
    _, x, xhex, y, yhex = kv["codeword"].split(":")
    out = run(["nmre", "decode", "--x", f"{x}:{xhex}", "--y", f"{y}:{yhex}"], "", monkeypatch, capsys)[1]
    assert out.strip() == kv["message"]


def test_tamper_report(monkeypatch, capsys, tmp_path):
    spec = tmp_path / "t.txt"
    spec.write_text("# overwrite y\ny = constant:3:2\n")
    code, out, _ = run(["nmre", "tamper", "--spec", str(spec)], "", monkeypatch, capsys)
    assert code == 0
    assert "[joint_fit]" in out and "[distributions]" in out
    code, out, _ = run(["nmc3c", "tamper", "--spec", "identity"], "", monkeypatch, capsys)
    assert _kv(out)["epsilon_star"] == "0"


def test_qnmc_round_trip(monkeypatch, capsys):
    state = state_to_json(max_entangled(1))
    enc = run(["qnmc", "encode", "--seed", "3"], state, monkeypatch, capsys)[1]
    assert set(json.loads(enc)) == {"z_state", "y", "x"}
    dec = run(["qnmc", "decode"], enc, monkeypatch, capsys)[1]
    from nmcodex.quantum import state_from_json
    assert state_from_json(dec).fidelity(max_entangled(1)) > 1 - 1e-9


def test_qnmc_tamper(monkeypatch, capsys):
    kv = _kv(run(["qnmc", "tamper", "--spec", "Z"], "", monkeypatch, capsys)[1])
    assert float(kv["p"]) == 0
    assert float(kv["deviation"]) <= float(kv["sampling_bias"]) + 1e-8


@pytest.mark.parametrize("scheme", ["nmre", "nmc3c", "nmc2a", "qnmc", "nmext"])
def test_audit_passes(scheme, monkeypatch, capsys):
    code, out, _ = run([scheme, "audit"], "", monkeypatch, capsys)
    assert code == 0, out
    assert _kv(out)["failed"] == "0"


def test_bench(monkeypatch, capsys):
    kv = _kv(run(["nmext", "bench"], "", monkeypatch, capsys)[1])
    assert int(kv["evaluations"]) > 0 and float(kv["evaluations_per_second"]) > 0


@pytest.mark.parametrize("args,code", [
    (["nmre", "encode", "--profile", "ZZ"], 2),
    (["nmext", "eval", "--x", "14:zz", "--y", "3:a"], 3),
    (["nmext", "eval", "--x", "14:abcd", "--y", "3:a"], 3),
    (["nmre", "eval"], 4),
    (["nmext", "encode"], 4),
    (["qnmc", "encode", "--profile", "XS"], 4),
    (["nmc2a", "encode", "--profile", "S"], 4),
    (["foo", "audit"], 4),
    (["nmre", "decode", "--x", "14:fe18"], 1),
])
def test_exit_codes(args, code, monkeypatch, capsys):
    assert run(args, "", monkeypatch, capsys)[0] == code


def test_malformed_message_hex(monkeypatch, capsys):
    assert run(["nmc3c", "encode"], "2:zz", monkeypatch, capsys)[0] == 3
    assert run(["nmc3c", "decode"], "3:1:0", monkeypatch, capsys)[0] == 3


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "nmcodex.cli", "nmext", "eval", "--x", "14:0000", "--y", "3:0"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "output: 4:" in res.stdout
