"""CLI surface: exit codes, report shape, thin-adapter equality, figures."""

import json
from fractions import Fraction
from pathlib import Path

import pytest

import ccc
from ccc.cli import Report, emit_report, parse_report, run
from ccc.errors import InvalidArgument
from ccc.fm import fm_case1, fm_line_bundle_case2
from ccc.stackyfan import parse_contraction, parse_same_base, parse_stacky_fan
from ccc.thetapos import format_theta, hom_constructible, parse_theta

DATA = Path(ccc.__file__).parent / "data"


def invoke(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, parse_report(out)


def test_validate_ok(capsys):
    code, rep = invoke(capsys, "validate", str(DATA / "p13.json"))
    assert code == 0
    assert rep.status == "ok"
    assert rep.payload == {"dim": 1, "rays": 2, "max_cones": 2, "complete": True}


def test_validate_surface(capsys):
    code, rep = invoke(capsys, "validate", str(DATA / "p112.json"))
    assert code == 0
    assert rep.payload["dim"] == 2
    assert rep.payload["complete"] is True


def test_missing_file_is_invalid_input(capsys):
    code, rep = invoke(capsys, "validate", str(DATA / "no_such_fan.json"))
    assert code == 1
    assert rep.status == "invalid-input"
    assert "error" in rep.payload


def test_malformed_json_is_invalid_input(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    code, rep = invoke(capsys, "validate", str(bad))
    assert code == 1
    assert rep.status == "invalid-input"


def test_unknown_verb_is_invalid_input(capsys):
    code, rep = invoke(capsys, "frobnicate")
    assert code == 1
    assert rep.status == "invalid-input"


def test_same_base_bundle_shift(capsys):
    code, rep = invoke(
        capsys, "fm", "same-base", str(DATA / "samebase_p12_p13.json"), "--bundle", "3,0"
    )
    assert code == 0
    assert rep.payload == {"bundle": [4, 0]}


def test_same_base_theta_matches_library(capsys):
    path = DATA / "samebase_p12_p13.json"
    code, rep = invoke(capsys, "fm", "same-base", str(path), "--theta", "cone=0;t=2")
    assert code == 0
    setup = parse_same_base(json.loads(path.read_text()))
    direct = fm_case1(setup, parse_theta(setup.fan_s, "cone=0;t=2"))
    assert rep.payload == {"theta": format_theta(direct)}


def test_hom_matches_library(capsys):
    path = DATA / "p13.json"
    code, rep = invoke(
        capsys, "hom", str(path), "--theta1", "cone=0;t=0", "--theta2", "cone=0;t=1"
    )
    assert code == 0
    fan = parse_stacky_fan(json.loads(path.read_text()))
    direct = hom_constructible(parse_theta(fan, "cone=0;t=0"), parse_theta(fan, "cone=0;t=1"))
    assert rep.payload == {"value": direct.value, "reason": direct.reason}


def test_hom_oracle_agrees(capsys):
    code, rep = invoke(
        capsys,
        "hom",
        str(DATA / "p13.json"),
        "--theta1",
        "cone=0;t=1",
        "--theta2",
        "cone=0;t=0",
        "--oracle",
    )
    assert code == 0
    assert rep.payload["oracle"]["value"] == rep.payload["value"]


def test_hom_oracle_box_guard(capsys):
    code, rep = invoke(
        capsys,
        "hom",
        str(DATA / "p13.json"),
        "--theta1",
        "cone=1;t=3",
        "--theta2",
        "cone=1;t=0",
        "--oracle",
        "--box",
        "2",
    )
    assert code == 1
    assert "box" in rep.payload["error"]


def test_contract_push_bundle_matches_library(capsys):
    path = DATA / "contract_crepant_a1.json"
    code, rep = invoke(capsys, "fm", "contract-push", str(path), "--bundle", "1,1")
    assert code == 0
    setup = parse_contraction(json.loads(path.read_text()))
    assert rep.payload == {"bundle": list(fm_line_bundle_case2(setup, (1, 1)))}


def test_contract_pull_reports_rationals_as_strings(capsys):
    code, rep = invoke(
        capsys,
        "fm",
        "contract-pull",
        str(DATA / "contract_crepant_a1.json"),
        "--J",
        "1,2",
        "--phi",
        "0,0",
    )
    assert code == 0
    assert rep.payload["s1"] == "3/4"
    text = emit_report(Report(**rep.__dict__))
    assert "0.75" not in text


def test_negative_phi_equals_form(capsys):
    code, rep = invoke(
        capsys,
        "fm",
        "contract-pull",
        str(DATA / "contract_crepant_a1.json"),
        "--J",
        "1,2",
        "--phi=-1,0",
    )
    assert code == 0
    assert rep.payload["J"] == [1, 2]


def test_check_poset_embedding_ok(capsys):
    code, rep = invoke(
        capsys,
        "check",
        "poset-embedding",
        str(DATA / "samebase_p12_p13.json"),
        "--window",
        "2",
    )
    assert code == 0
    assert rep.payload["verdict"] == "embedding"
    assert rep.witnesses == []


def test_check_poset_reversed_fails_with_sorted_witnesses(capsys, tmp_path):
    doc = json.loads((DATA / "samebase_p12_p13.json").read_text())
    doc["r"], doc["s"] = doc["s"], doc["r"]
    path = tmp_path / "reversed.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    code, rep = invoke(capsys, "check", "poset-embedding", str(path), "--window", "2")
    assert code == 2
    assert rep.status == "check-failed"
    assert rep.witnesses
    assert rep.witnesses == sorted(rep.witnesses)


def test_check_contractibility_quick_sweep(capsys):
    code, rep = invoke(
        capsys,
        "check",
        "contractibility-2d",
        str(DATA / "contract_crepant_a1.json"),
        "--window",
        "0",
        "--box",
        "6",
        "--step",
        "1/4",
    )
    assert code == 0
    assert rep.payload["confirmed"] == rep.payload["pairs"] > 0


def test_check_contractibility_needs_dim_2(capsys, tmp_path):
    doc = {
        "fan": {"dim": 1, "rays": [{"v": [1]}, {"v": [-1]}], "max_cones": [[0], [1]]},
        "extra": {"v": [1]},
    }
    path = tmp_path / "thin.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    code, rep = invoke(capsys, "check", "contractibility-2d", str(path))
    assert code == 1


def test_reports_are_deterministic(capsys):
    args = ("validate", str(DATA / "p112.json"))
    run(list(args))
    first = capsys.readouterr().out
    run(list(args))
    second = capsys.readouterr().out
    assert first == second
    assert first.count("\n") == 1  # one line per report


def test_pretty_report_parses_to_same_document(capsys):
    args = ["hom", str(DATA / "p13.json"), "--theta1", "cone=0;t=1", "--theta2", "cone=0;t=0"]
    _, plain = invoke(capsys, *args)
    _, pretty = invoke(capsys, "--pretty", *args)
    assert plain == pretty


def test_emit_parse_roundtrip():
    rep = Report(status="ok", payload={"x": Fraction(1, 3), "y": [1, "a"]}, witnesses=[])
    text = emit_report(rep)
    back = parse_report(text)
    assert back.payload == {"x": "1/3", "y": [1, "a"]}
    assert emit_report(back) == text
    with pytest.raises(InvalidArgument):
        emit_report(rep, format="yaml")
    with pytest.raises(InvalidArgument):
        parse_report('{"status": "ok"}')


def test_plot_lagrangian_is_deterministic(capsys, tmp_path):
    out1 = tmp_path / "a.svg"
    out2 = tmp_path / "b.svg"
    for out in (out1, out2):
        code, rep = invoke(
            capsys, "plot", "lagrangian", str(DATA / "p13.json"), "-o", str(out)
        )
        assert code == 0
        assert rep.payload["pieces"] > 0
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_text().startswith("<svg")


def test_plot_region_staircase(capsys, tmp_path):
    out = tmp_path / "region.svg"
    code, rep = invoke(
        capsys,
        "plot",
        "region",
        str(DATA / "contract_crepant_a1.json"),
        "--J",
        "1,2",
        "--phi",
        "0,0",
        "-o",
        str(out),
    )
    assert code == 0
    assert rep.payload == {"scene": "region-2d", "regions": 2, "out": str(out)}
    text = out.read_text()
    assert "stroke-dasharray" in text  # strict faces drawn dashed


def test_plot_region_needs_a_subject(capsys, tmp_path):
    code, rep = invoke(
        capsys,
        "plot",
        "region",
        str(DATA / "contract_crepant_a1.json"),
        "-o",
        str(tmp_path / "x.svg"),
    )
    assert code == 1
