import json

import pytest

from dwfinsler.cli import main
from dwfinsler.errors import UnknownSuiteError
from dwfinsler.runspec import fixture_document, fixture_runspec
from dwfinsler.suites import (emit_report, report_document,
                              report_from_document, run_suites)


@pytest.fixture(scope="module")
def small_p_report():
    return run_suites(fixture_runspec("FIX-P", seed=3, count=4))


def test_all_suites_pass_on_product(small_p_report):
    rep = small_p_report
    assert rep.ok
    for s in rep.suites:
        assert s.as_expected, s.name
        for e in s.entries:
            if e.tolerance is not None:
                assert e.residual <= e.tolerance, (s.name, e.name)


def test_suite_independence():
    together = run_suites(fixture_runspec("FIX-E", seed=5, count=3,
                                          suites=("lemma41", "yF=G")))
    alone = run_suites(fixture_runspec("FIX-E", seed=5, count=3,
                                       suites=("lemma41",)))
    combined = {(s.name, e.name): e.residual
                for s in together.suites for e in s.entries}
    for s in alone.suites:
        for e in s.entries:
            assert combined[(s.name, e.name)] == e.residual


def test_expected_failure_is_success():
    spec = fixture_runspec("FIX-R", seed=9, count=4)
    assert "reinhart" in spec.expected_failures
    rep = run_suites(spec)
    assert rep.ok
    reinhart = next(s for s in rep.suites if s.name == "reinhart")
    assert not reinhart.passed and reinhart.expected_failure and reinhart.as_expected
    witness = next(e for e in reinhart.entries if not e.passed)
    assert witness.point is not None
    assert "vertical" in witness.note


def test_unexpected_pass_flags_failure():
    spec = fixture_runspec("FIX-P", seed=3, count=2, suites=("lemma41",))
    spec = type(spec)(spec.label, spec.config, spec.sampling, spec.suites,
                      ("lemma41",), spec.tolerances)
    rep = run_suites(spec)
    assert not rep.ok  # the declared failure did not happen


def test_empty_suite_list_passes():
    rep = run_suites(fixture_runspec("FIX-P", seed=3, count=1, suites=()))
    assert rep.ok
    assert rep.suites == ()


def test_unknown_suite_errors_before_computation():
    spec = fixture_runspec("FIX-P", seed=3, count=1)
    bad = type(spec)(spec.label, spec.config, spec.sampling,
                     ("homogeneity", "nope"), (), {})
    with pytest.raises(UnknownSuiteError):
        run_suites(bad)


def test_report_json_round_trip(small_p_report):
    doc = report_document(small_p_report)
    clone = report_from_document(json.loads(json.dumps(doc, sort_keys=True)))
    assert report_document(clone) == doc
    emitted = emit_report(small_p_report, "json")
    assert report_document(report_from_document(json.loads(emitted))) == doc
    with pytest.raises(ValueError):
        emit_report(small_p_report, "html")


def test_report_text_shape(small_p_report):
    text = emit_report(small_p_report, "text")
    lines = text.splitlines()
    for s in small_p_report.suites:
        assert sum(line.startswith(s.name) for line in lines) == 1
    assert "result: OK" in text


def test_report_text_carries_witness():
    rep = run_suites(fixture_runspec("FIX-R", seed=9, count=4,
                                     suites=("reinhart",)))
    text = emit_report(rep, "text")
    assert "transversal-parallelism" in text
    assert "at point" in text


def test_end_to_end_determinism(tmp_path):
    docs = []
    for i in (1, 2):
        path = tmp_path / f"report{i}.json"
        code = main(["verify", "--fixture", "FIX-1D", "--seed", "42",
                     "--points", "4", "--json", str(path)])
        assert code == 0
        docs.append(json.load(open(path)))
    assert json.dumps(docs[0]["report"], sort_keys=True) == \
        json.dumps(docs[1]["report"], sort_keys=True)


def test_cli_eval_and_fixtures(capsys):
    assert main(["fixtures"]) == 0
    out = capsys.readouterr().out
    assert "FIX-R" in out and "doubly-warped" in out
    code = main(["eval", "--fixture", "FIX-1D",
                 "--point", "x=0;u=1;y=1;v=1", "--tensor", "spray",
                 "--tensor", "F2"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    ev = doc["evaluations"][0]["tensors"]
    assert ev["spray"] == [0.5, -0.5]
    assert ev["F2"] == 3.0


def test_cli_report_rerender(tmp_path, capsys):
    path = tmp_path / "rep.json"
    assert main(["verify", "--fixture", "FIX-P", "--points", "2",
                 "--suite", "yF=G", "--json", str(path)]) == 0
    capsys.readouterr()
    assert main(["report", "--json", str(path)]) == 0
    assert "yF=G" in capsys.readouterr().out


def test_cli_tolerance_override_can_fail(capsys):
    code = main(["verify", "--fixture", "FIX-E", "--points", "2",
                 "--suite", "lemma41", "--tol", "lemma41=1e-30"])
    assert code == 1
    assert "FAIL" in capsys.readouterr().out


def test_cli_custom_spec_document(tmp_path, capsys):
    # quadratic first factor (entries 1 + x0^2/2 and 1), exponential warp
    one = [[1.0, [0, 0]]]
    bumped = [[1.0, [0, 0]], [0.5, [2, 0]]]
    doc = {
        "label": "quad-exp",
        "factors": [
            {"kind": "riemannian_quadratic", "dim": 2,
             "parameters": {"entries": [[bumped, []], [[], one]]}},
            {"kind": "euclidean", "dim": 2},
        ],
        "warps": {
            "f1": {"kind": "constant", "parameters": {"value": 1.5}},
            "f2": {"kind": "exponential", "parameters": {"rate": 0.25}},
        },
        "sampling": {"seed": 11, "count": 4},
        "suites": ["homogeneity", "block-structure", "yF=G", "lemma41",
                   "vaisman-axioms", "con1"],
    }
    path = tmp_path / "quad.json"
    path.write_text(json.dumps(doc))
    assert main(["verify", "--spec", str(path)]) == 0
    out = capsys.readouterr().out
    assert "quad-exp" in out and "result: OK" in out


def test_cli_usage_errors(capsys, tmp_path):
    assert main(["verify"]) == 2  # neither --spec nor --fixture
    assert main(["verify", "--fixture", "NOPE"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"factors": []}))
    assert main(["verify", "--spec", str(bad)]) == 2
    doc = fixture_document("FIX-P")
    doc["sampling"]["seed"] = "not-an-int"
    bad.write_text(json.dumps(doc))
    assert main(["verify", "--spec", str(bad)]) == 2
    assert main(["eval", "--fixture", "FIX-1D", "--point", "x=0;u=1;y=1"]) == 2
    capsys.readouterr()
