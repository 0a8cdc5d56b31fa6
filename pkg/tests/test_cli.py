import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from morava_kit.cli import main
from morava_kit.quadric import quadric_model
from morava_kit.series import TruncatedSeries


def _schema(name):
    return json.loads(resources.files("morava_kit").joinpath("schemas", name).read_text())


REPORT = _schema("report.schema.json")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert err == "", err
    data = json.loads(out)
    jsonschema.validate(data, REPORT)
    return code, data


# -- documented examples -----------------------------------------------------------


def test_fgl_check_example(capsys):
    code, data = run_json(capsys, "fgl", "check", "--p", "2", "--n", "1", "--order", "8")
    assert code == 0 and data["ok"]
    assert {c["name"] for c in data["result"]["checks"]} == {"unit_left", "unit_right", "commutativity", "associativity"}
    assert all(c["passed"] for c in data["result"]["checks"])


def test_quadric_euler_example(capsys):
    code, out, _ = run(capsys, "quadric", "euler", "--l", "2", "--theory", "k0", "--format", "text")
    assert code == 0
    assert out.strip() == "v1^2"


def test_witt_sigma_example(capsys):
    code, out, _ = run(capsys, "witt", "sigma", "--p", "2", "--n", "1", "--count", "2", "--format", "text")
    assert code == 0
    assert out.splitlines()[1] == "S2 = x2 + y2 - x1*y1"


# -- every command validates against the shipped schema ----------------------------

COMMANDS = [
    ["fgl", "show", "--p", "3", "--order", "6"],
    ["fgl", "show", "--theory", "bp", "--order", "5"],
    ["fgl", "phi", "--p", "2", "--n", "2"],
    ["fgl", "check", "--theory", "k0"],
    ["witt", "ghost", "--count", "3"],
    ["witt", "sigma", "--theory", "k0", "--count", "3"],
    ["witt", "add", "--a", "[1, 2]", "--b", "[3, 1/2]"],
    ["rr", "todd", "--p", "3", "--order", "5"],
    ["rr", "transport", "--class", "x*y + x^2", "--vars", "x,y"],
    ["rr", "c-op", "--class", "x*y", "--vars", "x,y", "--n", "2"],
    ["gkm", "integrate", "--theory", "k0"],
    ["gkm", "euler", "--theory", "chow"],
    ["gkm", "milnor", "--l", "3"],
    ["quadric", "euler", "--theory", "morava", "--n", "2"],
    ["quadric", "decompose", "--theory", "chow"],
    ["quadric", "decompose", "--theory", "k0"],
    ["quadric", "neza-rank", "--theory", "chow"],
]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: "-".join(a[:2]) + ("-" + a[3] if len(a) > 3 else ""))
def test_command_schema(capsys, argv):
    code, data = run_json(capsys, *argv)
    assert code == 0 and data["ok"]
    assert data["command"] == " ".join(argv[:2])


def test_acceptance_batch(capsys):
    code, data = run_json(capsys, "acceptance", "run")
    rows = {r["criterion"]: r["passed"] for r in data["result"]["criteria"]}
    assert len(rows) == 12
    # only the exact (2,1) clause of AC2 fails, so the batch exits nonzero
    assert [k for k, ok in rows.items() if not ok] == ["AC2"]
    assert code == 1 and not data["ok"]


def test_acceptance_text_lines(capsys):
    code, out, _ = run(capsys, "acceptance", "run", "--format", "text")
    lines = out.splitlines()
    assert len(lines) == 12
    assert all(line.split()[1] in ("PASS", "FAIL") for line in lines)


# -- values -------------------------------------------------------------------------


def test_series_json_roundtrip(capsys):
    _, data = run_json(capsys, "fgl", "show", "--theory", "k0", "--order", "4")
    s = dict(data["result"]["series"])
    s.pop("text")
    jsonschema.validate(s, _schema("series.schema.json"))
    F = TruncatedSeries.from_dict(s)
    assert str(F) == "x + y - v1*x*y + O(deg 4)"


def test_witt_add_values(capsys):
    # S1 = x1 + y1, S2 = x2 + y2 - x1 y1 at (2,1) with v1 -> 1
    _, data = run_json(capsys, "witt", "add", "--a", "1,2", "--b", '["3", "1/2"]')
    assert data["result"]["sum"] == ["4", "-1/2"]


def test_quadric_decompose_summary(capsys):
    _, data = run_json(capsys, "quadric", "decompose", "--l", "3", "--theory", "chow")
    r = data["result"]
    assert r["summary"] == "Z(0) + Z(1) + Z(2)^2 + Z(3) + Z(4)"
    assert r["count"] == 6 and r["complete"]
    assert sorted(i["twist"] for i in r["idempotents"]) == [0, 1, 2, 2, 3, 4]


def test_neza_rank(capsys):
    _, data = run_json(capsys, "quadric", "neza-rank", "--theory", "k0")
    assert data["result"]["rank"] == 16
    assert data["result"]["determinant"]["text"] == "1"
    assert data["result"]["unit"]


def test_gkm_model_file(capsys, tmp_path):
    path = tmp_path / "q.json"
    path.write_text(json.dumps(quadric_model(2).to_dict()))
    jsonschema.validate(json.loads(path.read_text()), _schema("model.schema.json"))
    _, data = run_json(capsys, "gkm", "integrate", "--theory", "k0", "--model", str(path))
    assert data["result"]["value"]["text"] == "v1^2"


# -- determinism, --out, environment ------------------------------------------------


def test_byte_identical_repeats(capsys):
    argv = ["quadric", "decompose", "--theory", "k0", "--seed", "7"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_out_file(capsys, tmp_path):
    path = tmp_path / "report.json"
    _, out, _ = run(capsys, "fgl", "phi", "--out", str(path))
    assert path.read_text() == out


def test_order_environment(capsys, monkeypatch):
    monkeypatch.setenv("MORAVA_KIT_ORDER", "5")
    _, data = run_json(capsys, "fgl", "show", "--theory", "k0")
    assert data["order"] == 5 and data["result"]["series"]["order"] == 5
    _, data = run_json(capsys, "fgl", "show", "--theory", "k0", "--order", "3")
    assert data["result"]["series"]["order"] == 3


# -- errors --------------------------------------------------------------------------


def test_truncation_hint(capsys):
    code, out, err = run(capsys, "quadric", "euler", "--l", "3", "--order", "4")
    assert code == 2 and out == ""
    assert "raise --order" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["fgl", "show", "--p", "4"],
        ["fgl", "show", "--order", "1"],
        ["quadric", "euler", "--l", "1"],
        ["rr", "transport", "--theory", "k0"],
        ["rr", "transport", "--class", "x +* y"],
        ["witt", "add", "--a", "[1, 2]", "--b", "[1]"],
        ["witt", "add", "--a", "[1, x]", "--b", "[1, 2]"],
        ["gkm", "milnor", "--model", "/nonexistent.json"],
        ["quadric", "neza-rank", "--l", "3", "--theory", "chow"],
    ],
)
def test_invalid_input(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert err.startswith("error: ")


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["fgl", "show", "--theory", "nope"])
    assert exc.value.code == 2


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "morava_kit.cli", "fgl", "check", "--format", "text"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines() == ["unit_left: ok", "unit_right: ok", "commutativity: ok", "associativity: ok"]
