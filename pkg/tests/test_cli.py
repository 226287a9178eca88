import json
import subprocess
import sys

import pytest

from decaykit.cli import canonical, main, run

from conftest import PRESENTATIONS


def call(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_cable_decayed(capsys):
    code, rep = call(capsys, "cable", "--p", "2", "--q", "11", "--of", "torus:2,3")
    assert code == 0 and rep["verdict"] == "DECAYED"
    d = rep["details"]
    assert d["decay"] == "22" and (d["u"], d["v"]) == (6, 1)
    assert d["lo_window"] == {"left_orderable_below": "9", "unknown": ["9", "22"], "not_left_orderable_from": "22"}
    assert set(rep) == {"command", "inputs", "verdict", "details", "version", "timing"}


def test_cable_inapplicable(capsys):
    code, rep = call(capsys, "cable", "--p", "2", "--q", "7", "--of", "torus:2,3")
    assert code == 0 and rep["verdict"] == "INAPPLICABLE"
    assert rep["details"]["message"] == "cabling criterion inapplicable: 7/2 <= 5"


@pytest.mark.parametrize(
    "argv",
    [
        ["cable", "--p", "2", "--q", "4", "--of", "torus:2,3"],
        ["cable", "--p", "2", "--q", "11", "--of", "torus:2,9"],
        ["cable", "--p", "2", "--q", "11", "--of", "torus:2,7"],
        ["verify-cert", "/nonexistent.json"],
        ["search", "/nonexistent.json"],
        ["quotient", "--p", "2", "--q", "3", "--word", "m^"],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    code, rep = call(capsys, *argv)
    assert code == 2 and rep["verdict"] == "ERROR"


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["cable", "--p", "two"])
    assert exc.value.code == 2


def test_gen_and_verify(capsys, tmp_path):
    path = str(tmp_path / "c.json")
    code, rep = call(capsys, "gen-cert", "--p", "2", "--q", "11", "--r", "5", "--out", path)
    assert code == 0
    code, rep = call(capsys, "verify-cert", path, "--grid", "2")
    assert code == 0 and rep["verdict"] == "ACCEPT"
    assert rep["details"]["conclusion"]["statement"] == "cable(2,11) of a 5-decayed companion is 22-decayed"
    code, rep = call(capsys, "verify-cert", path, "--grid", "0")
    assert code == 0 and rep["details"]["grid_limited"] is True

    data = json.loads(open(path).read())
    j = next(j for j in data["judgments"] if j["id"] == "b4_decay")
    j["word"] = j["word"].replace("l^2", "l^3")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code, rep = call(capsys, "verify-cert", str(bad), "--grid", "2")
    assert code == 1 and rep["verdict"] == "REJECT"
    failure = rep["details"]["failures"][0]
    assert failure["judgment"] and "grid_point" in failure

    bad.write_text("{not json")
    code, rep = call(capsys, "verify-cert", str(bad))
    assert code == 2


def test_gen_inapplicable(capsys):
    code, rep = call(capsys, "gen-cert", "--p", "2", "--q", "7", "--r", "5")
    assert code == 0 and rep["verdict"] == "INAPPLICABLE"


def test_registry_commands(capsys, tmp_path, monkeypatch):
    code, rep = call(capsys, "registry", "list")
    assert code == 0 and any(r["id"] == "torus:2,3" for r in rep["details"]["records"])
    code, rep = call(capsys, "registry", "lookup", "pretzel:-2,3,7")
    assert code == 0 and rep["details"]["decay"] == "17"
    reg = tmp_path / "reg.json"
    reg.write_text("[]")
    code, rep = call(capsys, "--registry", str(reg), "registry", "lookup", "torus:2,3")
    assert code == 1 and rep["verdict"] == "NOT_FOUND"
    monkeypatch.setenv("DECAYKIT_REGISTRY", str(reg))
    code, rep = call(capsys, "registry", "add", "torus:2,7")
    assert code == 0 and rep["details"]["decay"] == "13"
    assert json.loads(reg.read_text())[0]["id"] == "torus:2,7"


@pytest.mark.parametrize("r,verdict", [("8", "LEFT_ORDERABLE"), ("15", "UNKNOWN"), ("22", "NOT_LEFT_ORDERABLE"), ("17/2", "LEFT_ORDERABLE")])
def test_lo_window(capsys, r, verdict):
    code, rep = call(capsys, "lo-window", "--p", "2", "--q", "11", "--r", r, "--of", "torus:2,3")
    assert code == 0 and rep["verdict"] == verdict


@pytest.mark.parametrize(
    "name,radius,code,verdict",
    [
        ("z2_star_z3.json", 3, 3, "CONTRADICTION"),
        ("klein_bottle.json", 4, 0, "ASSIGNMENT"),
        ("trefoil.json", 3, 0, "ASSIGNMENT"),
    ],
)
def test_search(capsys, name, radius, code, verdict):
    got, rep = call(capsys, "search", str(PRESENTATIONS / name), "--radius", str(radius))
    assert got == code and rep["verdict"] == verdict
    if verdict == "CONTRADICTION":
        assert rep["details"]["trace_replayed"] is True


def test_quotient(capsys):
    code, rep = call(capsys, "quotient", "--p", "2", "--q", "3", "--word", "m^2 l t^-1")
    assert code == 0 and rep["details"]["image"] == "m^2 t^-1" and rep["details"]["homology"] == 1
    code, rep = call(capsys, "quotient", "--p", "2", "--q", "11", "--word", "x y^-1 l", "--of", "torus:2,3")
    assert code == 0 and rep["details"]["image"] == "m"


def test_canonical_bytes_stable():
    argv = ["search", str(PRESENTATIONS / "z2_star_z3.json"), "--radius", "3"]
    a, _ = run(argv)
    b, _ = run(argv)
    assert canonical(a) == canonical(b)
    assert "timing" not in json.loads(canonical(a))


def test_console_entry_point_byte_stable():
    argv = [sys.executable, "-m", "decaykit.cli", "cable", "--p", "2", "--q", "11", "--of", "torus:2,3"]
    outs = [subprocess.run(argv, capture_output=True, text=True, check=True).stdout for _ in range(2)]
    assert canonical(json.loads(outs[0])) == canonical(json.loads(outs[1]))


def test_verbose_summary(capsys):
    main(["--verbose", "cable", "--p", "2", "--q", "11", "--of", "torus:2,3"])
    err = capsys.readouterr().err
    assert "decayed 22" in err
