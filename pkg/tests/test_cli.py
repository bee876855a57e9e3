from __future__ import annotations

import io
import json
import sys

import pytest

from flowcat.cli import example_names, main


@pytest.fixture
def run(capsys, monkeypatch):
    def _run(argv, stdin=None):
        if stdin is not None:
            monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
        code = main(argv)
        out, err = capsys.readouterr()
        return code, out, err

    return _run


def test_example_names():
    names = example_names()
    for n in ("c2-handle-slide", "s1-height", "s2-height", "ms-chain", "chain-param", "random-category"):
        assert n in names


def test_validate_exit_codes(run, tmp_path):
    code, doc, _ = run(["example", "c2-handle-slide"])
    assert code == 0
    assert run(["validate"], doc)[0] == 0
    code, _, err = run(["validate"], "{not json")
    assert code == 2 and "error" in err
    _, rc, _ = run(["example", "random-category", "--seed", "3"])
    data = json.loads(rc)
    abar = data["payload"]["skeleton"]["abar"]
    orbit = data["payload"]["skeleton"]["action"][-1]
    abar[orbit[1]] += 1
    code, out, _ = run(["validate"], json.dumps(data))
    assert code == 1 and "abar-equivariance" in out and orbit[1] in out
    path = tmp_path / "c2.json"
    path.write_text(doc)
    assert run(["validate", str(path)])[0] == 0
    assert run(["validate", str(tmp_path / "missing.json")])[0] == 2
    assert run(["no-such-command"])[0] == 2


def test_homology_tables(run):
    _, s1, _ = run(["example", "s1-height"])
    code, out, _ = run(["homology"], s1)
    assert code == 0 and "H_0 = Z" in out and "H_1 = Z" in out
    _, c2, _ = run(["example", "c2-handle-slide"])
    code, out, _ = run(["homology", "--ring", "Z2"], c2)
    assert "H_0 = 0" in out and "H_1 = Z2" in out
    # dx = z shows up as the nonzero entry of d_1
    assert "  z 1 0" in out
    code, out, _ = run(["homology", "--fixed", "2", "--output", "json"], c2)
    data = json.loads(out)
    assert data["homology"]["0"]["rank"] == 1 and data["homology"]["1"]["rank"] == 0
    assert "z" in data["complex"]["gens"]["0"]
    _, s2, _ = run(["example", "s2-height"])
    code, out, _ = run(["homology", "--filtration", "mu"], s2)
    assert "H_1 = 0" in out and "E1 page" in out


def test_shift_space_and_degree(run):
    _, param, _ = run(["example", "chain-param"])
    code, out, _ = run(["shift-space"], param)
    assert code == 0 and out.strip() == "triv ⊕ sgn"
    _, chart, _ = run(["example", "chart-quadratic"])
    code, out, _ = run(["pt-degree"], chart)
    assert code == 0 and out.strip() == "0"
    _, lin, _ = run(["example", "chart-linear"])
    assert run(["pt-degree"], lin)[1].strip() == "1"


def test_param_iso(run, tmp_path):
    _, a, _ = run(["example", "chain-param"])
    pa = tmp_path / "a.json"
    pa.write_text(a)
    code, out, _ = run(["param-iso", str(pa), str(pa), "--output", "json"])
    assert code == 0 and json.loads(out)["error"] < 1e-9


def test_pipeline_commands(run, tmp_path):
    _, c2, _ = run(["example", "c2-handle-slide"])
    code, fixed, _ = run(["fixed-points", "--fixed", "2"], c2)
    assert code == 0 and json.loads(fixed)["kind"] == "flow_category"
    code, out, _ = run(["restratify", "--levels", "1,3,5", "--top", "6", "--shift", "1", "--output", "table"], c2)
    assert code == 0 and "grading shift: 1" in out
    _, param, _ = run(["example", "chain-param"])
    pp = tmp_path / "p.json"
    pp.write_text(param)
    code, stab, _ = run(["stabilize", "--param", str(pp)], c2)
    assert code == 0
    assert run(["homology", "--output", "json"], stab)[1] != ""
    code, out, _ = run(["split", "--sub", "z"], c2)
    assert code == 0 and "exact" in out
    assert run(["split", "--sub", "x"], c2)[0] == 1


def test_determinism(run):
    a = run(["example", "random-category", "--seed", "11"])[1]
    b = run(["example", "random-category", "--seed", "11"])[1]
    assert a == b
    assert run(["homology", "--output", "json"], a)[1] == run(["homology", "--output", "json"], b)[1]


def test_property_suite_small(run):
    code, out, _ = run(["property-suite", "--count", "2", "--seed", "1"])
    assert code == 0 and out.count("PASS") == 7
