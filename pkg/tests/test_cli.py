import io
import json

import numpy as np
import pytest

from mulspace import msgf, sample, make_grid
from mulspace.cli import read_config, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def ok(*argv):
    code, out, err = call(*argv)
    assert code == 0, err
    return json.loads(out)


def test_check_one():
    d = ok("check", "--symbol", "one", "--s", "1", "--jmin", "-4", "--jmax", "4")
    assert len(d["per_j"]) == 9
    for c in ("sobolev_s", "besov_n2_11", "modulation_s", "herz_s", "modulation_p1"):
        assert len({row[c] for row in d["per_j"]}) == 1
    assert d["config"]["j_range"] == [-4, 4] and d["command"] == "check"


def test_verify_embed110():
    d = ok("verify", "--mode", "embed110", "--count", "10", "--seed", "1", "--N", "1024", "--L", "16")
    assert d["mode"] == "embed110" and len(d["per_input"]) == 10 and d["violations"] == 0


def test_missing_input(tmp_path):
    code, out, err = call("norm", "--spec", '{"family":"Besov","p":2,"q":1,"s":0.5}',
                          "--input", str(tmp_path / "missing.msgf"))
    assert code == 74 and out == ""
    assert json.loads(err)["field"] == "input"


def test_corrupt_input(tmp_path):
    bad = tmp_path / "bad.msgf"
    bad.write_bytes(b"not a grid function")
    code, _, _ = call("norm", "--spec", '{"family":"Besov","p":2,"q":1,"s":0.5}', "--input", str(bad))
    assert code == 74


def test_unknown_command():
    code, out, err = call("frobnicate")
    assert code == 64 and "frobnicate" in json.loads(err)["error"]


@pytest.mark.parametrize("argv, field", [
    (["check", "--symbol", "riesz:0"], "symbol"),
    (["check", "--symbol", "one", "--s", "abc"], "s"),
    (["check", "--symbol", "one", "--p", "0.5"], "p"),
    (["check", "--symbol", "one", "--jmin", "3", "--jmax", "1"], "jmin"),
    (["check", "--symbol", "one", "--N", "100"], "N"),
    (["check", "--symbol", "one", "--transition-sharpness", "0.5"], "transition_sharpness"),
    (["norm", "--spec", "[1]", "--input", "x"], "spec"),
    (["norm", "--spec", '{"family":"Besov","r":1}', "--input", "x"], "spec"),
    (["hormander", "--symbol", "one", "--y-steps", "0"], "y"),
    (["kernel", "--symbol", "one", "--radii", "2,a"], "radii"),
    (["verify", "--mode", "prop32", "--band-radius", "1000"], "band"),
])
def test_validation_errors(argv, field):
    code, out, err = call(*argv)
    assert code == 2 and out == ""
    payload = json.loads(err)
    assert set(payload) == {"error", "field"} and payload["field"] == field


def test_norm_roundtrip(tmp_path):
    g = make_grid(1, 1024, 16 * np.pi)
    f = sample(g, lambda x: np.exp(-x[..., 0] ** 2))
    msgf.write(tmp_path / "g.msgf", f)
    d = ok("norm", "--spec", '{"family":"Sobolev","s":0}', "--input", str(tmp_path / "g.msgf"))
    assert d["value"] == pytest.approx((np.pi / 2) ** 0.25, rel=1e-10)
    assert d["warnings"] == []
    d = ok("norm", "--spec", '{"family":"FLq","q":"inf"}', "--input", str(tmp_path / "g.msgf"))
    assert d["value"] == pytest.approx(np.sqrt(np.pi), rel=1e-10)


def test_boundary_warning(tmp_path):
    g = make_grid(1, 256, 4.0)
    msgf.write(tmp_path / "w.msgf", sample(g, lambda x: np.exp(-x[..., 0] ** 2 / 4)))
    d = ok("norm", "--spec", '{"family":"Sobolev","s":0}', "--input", str(tmp_path / "w.msgf"))
    assert any("boundary" in w for w in d["warnings"])


def test_gen_and_norm(tmp_path):
    d = ok("gen", "--kind", "band_limited", "--count", "3", "--seed", "4", "--out", str(tmp_path),
           "--N", "1024", "--L", "32")
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["files"] == d["files"] and len(d["files"]) == 3
    assert manifest["ensemble"]["seed"] == 4
    code, out, _ = call("norm", "--spec", '{"family":"Modulation","p":2,"q":2,"s":0}',
                        "--input", str(tmp_path / d["files"][0]))
    assert code == 0 and json.loads(out)["value"] > 0


def test_config_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# grid\nN = 1024\nL = 25.0\njmin = -2\njmax = 2\nthreads = 2\n")
    assert read_config(cfg)["N"] == 1024
    d = ok("check", "--symbol", "one", "--config", str(cfg), "--jmax", "1")
    assert d["config"]["grid"] == {"dim": 1, "N": 1024, "L": 25.0}
    assert d["config"]["j_range"] == [-2, 1] and d["config"]["threads"] == 2
    monkeypatch.setenv("MULSPACE_THREADS", "3")
    assert ok("check", "--symbol", "one", "--jmin", "0", "--jmax", "0")["config"]["threads"] == 3
    cfg.write_text("colour = blue\n")
    assert call("check", "--symbol", "one", "--config", str(cfg))[0] == 2


def test_csv_output():
    code, out, _ = call("check", "--symbol", "sign", "--jmin", "-1", "--jmax", "1", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 4 and lines[0].startswith("j,")


@pytest.mark.parametrize("argv", [
    ["partition-check", "--samples", "500"],
    ["partition-check", "--family", "uniform", "--samples", "200", "--dim", "2", "--N", "64", "--L", "8"],
    ["kernel", "--symbol", "mihlin_poly:1", "--jmin", "-2", "--jmax", "2", "--radii", "2,4,8,16"],
    ["hormander", "--symbol", "sign", "--jmin", "-4", "--jmax", "3"],
    ["opnorm", "--symbol", "mihlin_poly:1", "--N", "512", "--L", "8"],
    ["verify", "--mode", "prop32", "--count", "4", "--seed", "9", "--N", "1024", "--L", "32"],
    ["verify", "--mode", "atom_transfer", "--symbol", "riesz:1", "--count", "3", "--atom-scale", "2"],
])
def test_byte_identical_reruns(argv):
    a = call(*argv, "--threads", "1")
    b = call(*argv, "--threads", "1")
    assert a[0] == 0, a[2]
    assert a == b


def test_threads_do_not_change_results():
    argv = ["verify", "--mode", "toft_chain", "--count", "6", "--seed", "2", "--N", "1024", "--L", "32"]
    a = json.loads(call(*argv, "--threads", "1")[1])
    b = json.loads(call(*argv, "--threads", "4")[1])
    assert a["per_input"] == b["per_input"]


def test_opnorm_matches_node_max():
    d = ok("opnorm", "--symbol", "imag_power:2", "--N", "512", "--L", "8")
    assert d["estimate"] == pytest.approx(d["node_max"], rel=1e-6)


def test_non_finite_values_are_strings():
    d = ok("verify", "--mode", "prop32", "--p", "inf", "--count", "2", "--N", "1024", "--L", "32")
    assert d["params"]["p"] == "inf"
