from __future__ import annotations

import json
import subprocess
import sys
from importlib import resources
from pathlib import Path

import pytest

from enrichedsoa.cli import EXIT_FAILED, EXIT_INPUT, EXIT_NONCONVERGED, EXIT_OK, REPORT_SCHEMA, load_instance, main
from enrichedsoa.finkernel import compose
from enrichedsoa.lifting import decode_certificate, decode_map, replay_certificate

CORPUS = Path(str(resources.files("enrichedsoa").joinpath("corpus")))
INSTANCES = sorted(CORPUS.glob("*.json"))


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out else None), err


def _write(tmp_path: Path, doc: dict, name="inst.json") -> Path:
    p = tmp_path / name
    p.write_text(json.dumps(doc, indent=2), encoding="utf-8")
    return p


def _load(path: Path) -> dict:
    return json.loads(path.read_text("utf-8"))


def test_corpus_is_present():
    assert len(INSTANCES) == 12


@pytest.mark.parametrize("path", INSTANCES, ids=lambda p: p.stem)
def test_corpus_factorizes(path, capsys):
    code, report, _ = run(["factorize", path], capsys)
    assert code == EXIT_OK and report["exit_code"] == EXIT_OK
    res = report["result"]
    assert res["converged"] and all(res["verification"][k] for k in ("composite", "right_class", "certificate", "spot_check"))
    e, m = decode_map(res["e"]), decode_map(res["m"])
    assert replay_certificate(decode_certificate(report["certificate"])) == e
    f = load_instance(path).maps[_load(path)["f"]]
    assert compose(m, e).table == f.table and e.dom.elements == f.dom.elements


def test_empty_to_point_instance_gives_one_point(capsys):
    code, report, _ = run(["factorize", CORPUS / "01-empty-to-point-weak.json"], capsys)
    assert code == EXIT_OK and len(decode_map(report["result"]["m"]).dom) == 1


def test_non_convergence_exit_code(tmp_path, capsys):
    # without skipping solved squares this instance keeps attaching cells
    doc = _load(CORPUS / "12-two-into-three-skip.json")
    doc["config"]["skip_solved"] = False
    code, report, _ = run(["factorize", _write(tmp_path, doc)], capsys)
    assert code == EXIT_NONCONVERGED
    assert not report["result"]["converged"] and report["result"]["diagnostics"]


def test_stage_cap_flag_truncates(capsys):
    code, report, _ = run(["factorize", CORPUS / "01-empty-to-point-weak.json", "--stage-cap", "1"], capsys)
    assert code == EXIT_OK
    code, report, _ = run(["factorize", CORPUS / "04-point-into-two-weak.json", "--stage-cap", "1", "--skip-solved"], capsys)
    assert code in (EXIT_OK, EXIT_NONCONVERGED)
    assert report["result"]["stats"]["stages"] <= 1


def test_stage_cap_zero_is_invalid_input(capsys):
    code, report, err = run(["factorize", CORPUS / "01-empty-to-point-weak.json", "--stage-cap", "0"], capsys)
    assert code == EXIT_INPUT and report is None
    assert "stage_cap" in err


def test_errors_are_line_located(tmp_path, capsys):
    doc = _load(CORPUS / "01-empty-to-point-weak.json")
    doc["maps"]["g0"]["cod"] = "Q"
    path = _write(tmp_path, doc)
    code, _, err = run(["factorize", path], capsys)
    assert code == EXIT_INPUT
    lines = path.read_text().splitlines()
    n = int(err.split("line ")[1].split(":")[0])
    assert '"cod": "Q"' in lines[n - 1]


def test_non_total_map_is_reported(tmp_path, capsys):
    doc = _load(CORPUS / "06-three-onto-two-weak.json")
    name = doc["f"]
    doc["maps"][name]["table"] = doc["maps"][name]["table"][:-1]
    code, _, err = run(["factorize", _write(tmp_path, doc)], capsys)
    assert code == EXIT_INPUT and "not total" in err and "line" in err


def test_schema_violation_and_bad_json(tmp_path, capsys):
    doc = _load(CORPUS / "01-empty-to-point-weak.json")
    doc["base"] = 7
    code, _, err = run(["factorize", _write(tmp_path, doc)], capsys)
    assert code == EXIT_INPUT and "schema" in err
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "schema": \n}', encoding="utf-8")
    code, _, err = run(["factorize", bad], capsys)
    assert code == EXIT_INPUT and "line" in err
    code, _, err = run(["factorize", tmp_path / "missing.json"], capsys)
    assert code == EXIT_INPUT


def test_reports_are_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        code = main(["factorize", str(CORPUS / "11-point-into-two-both-ortho.json"), "--seed", "5", "--out", str(out)])
        assert code == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    report = json.loads(a.read_text("utf-8"))
    assert report["schema"] == REPORT_SCHEMA and "timing" not in report
    main(["factorize", str(CORPUS / "01-empty-to-point-weak.json"), "--timing"])
    assert "timing" in json.loads(capsys.readouterr().out)


def _lift_doc(f_table, f_dom, f_cod, k_table, k_dom, k_cod, profile="set-weak"):
    sets = {"A": list(range(f_dom)), "B": list(range(f_cod)), "C": list(range(k_dom)), "D": list(range(k_cod))}
    return {
        "schema": "enrichedsoa/instance@1",
        "base": "set",
        "profile": profile,
        "sets": sets,
        "maps": {
            "f": {"dom": "A", "cod": "B", "table": list(f_table)},
            "k": {"dom": "C", "cod": "D", "table": list(k_table)},
        },
        "f": "f",
        "k": "k",
    }


def test_lift_command_with_witnesses(tmp_path, capsys):
    # 1 -> 2 against 2 -> 1: every square has two diagonals
    path = _write(tmp_path, _lift_doc((0,), 1, 2, (0, 0), 2, 1))
    code, report, _ = run(["lift", path, "--witnesses"], capsys)
    res = report["result"]
    assert code == EXIT_OK
    assert res["f_lift"] is True and res["ordinary_lift"] is True and res["unique_lift"] is False
    assert [w["count"] for w in res["witnesses"]] == [2, 2]
    code, report, _ = run(["lift", path, "--profile", "set-ortho"], capsys)
    assert report["result"]["f_lift"] is False and "witnesses" not in report["result"]
    # fold against 2 -> 1: the off-diagonal squares have no diagonal
    path = _write(tmp_path, _lift_doc((0, 0), 2, 1, (0, 0), 2, 1))
    code, report, _ = run(["lift", path, "--witnesses"], capsys)
    ws = report["result"]["witnesses"]
    assert report["result"]["f_lift"] is False
    assert len(ws) == 4 and sum(w["diagonal"] is None for w in ws) == 2


def test_twocat_lift_command(tmp_path, capsys):
    doc = {"schema": "enrichedsoa/instance@1", "base": "twocat", "twocat": {"kind": "chain-twist", "n": 4, "twisted": [1, 2]}, "f": "0->1", "k": "2->3"}
    code, report, _ = run(["twocat-lift", _write(tmp_path, doc), "--witnesses"], capsys)
    res = report["result"]
    assert code == EXIT_OK and res["consistent"]
    assert res["f_lift2"] is False and res["faithful"] is False
    assert res["squares"]
    doc["k"] = "2->2"
    code, report, _ = run(["twocat-lift", _write(tmp_path, doc)], capsys)
    assert report["result"]["f_lift2"] is True
    doc["k"] = "3->2"
    code, _, err = run(["twocat-lift", _write(tmp_path, doc)], capsys)
    assert code == EXIT_INPUT and "unknown 1-cell" in err


def test_twocat_lift_on_discrete_sets(tmp_path, capsys):
    doc = {
        "schema": "enrichedsoa/instance@1",
        "base": "twocat",
        "twocat": {"kind": "discrete", "sets": {"X": [0, 1], "Y": [0]}},
        "f": {"dom": "X", "cod": "Y", "table": [0, 0]},
        "k": {"dom": "X", "cod": "Y", "table": [0, 0]},
    }
    code, report, _ = run(["lift", _write(tmp_path, doc)], capsys)
    assert code == EXIT_OK and report["result"]["f_lift2"] is False


def test_laws_command(capsys):
    code, report, _ = run(["laws", "--cases", "4", "--max-size", "2", "--seed", "1"], capsys)
    assert code == EXIT_OK
    res = report["result"]
    assert set(res) == {"trivial", "arrow-min", "arrow-specialization"}
    assert res["arrow-min"]["assoc"]["passed"] == 4
    code, report, _ = run(["laws", "--unit", "--index", "nope"], capsys)
    assert code == EXIT_INPUT


def test_stability_command(capsys):
    code, report, _ = run(["stability", "--cases", "0", "--exhaustive-size", "1", "--max-size", "1", "--profile", "set-ortho"], capsys)
    assert code == EXIT_OK
    reports = report["result"]["set-ortho"]
    assert [r["check"] for r in reports] == ["pushout", "transfinite", "corner", "lemma-corners", "adjlift"]
    assert all(r["ok"] for r in reports)
    code, _, _ = run(["stability", "--checks", "nope", "--cases", "0"], capsys)
    assert code == EXIT_INPUT


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "enrichedsoa.cli", "factorize", str(CORPUS / "03-identity-weak.json")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == EXIT_OK
    assert json.loads(proc.stdout)["result"]["stats"]["stages"] == 0


def test_exit_code_constants():
    assert (EXIT_OK, EXIT_INPUT, EXIT_NONCONVERGED, EXIT_FAILED) == (0, 1, 2, 3)
