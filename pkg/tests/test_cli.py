import json

import pytest

from erjw import cli
from erjw.scalar2 import ModuleStructure


def run(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_page_text_happy_path(capsys):
    code, out, err = run(["page", "--n", "1", "--r", "8",
                          "--window", "-8..8"], capsys)
    assert code == 0 and err == ""
    assert out.startswith("page 8, n=1, engine=all, t in -8..8, rows 0..3")
    assert "all engines agree on the window" in out
    assert "m=  0 t=" in out


def test_page_empty_window_is_an_input_error(capsys):
    code, out, err = run(["page", "--n", "5", "--r", "3",
                          "--window", "0..0", "--caps", "0"], capsys)
    assert code == 2 and out == ""
    assert err.startswith("error:")
    assert "nothing to chart" in err


def test_page_rejects_nonpositive_page_index(capsys):
    code, _, err = run(["page", "--n", "1", "--r", "0",
                        "--window", "-8..8"], capsys)
    assert code == 2
    assert "page index" in err


def test_usage_errors_exit_two(capsys):
    # malformed windows and missing subcommands die in the parser
    for argv in (["page", "--n", "1", "--r", "2", "--window", "0..x"],
                 ["page", "--n", "1", "--r", "2", "--window", "8..-8"],
                 ["page", "--n", "1", "--r", "2", "--window", "17"],
                 []):
        with pytest.raises(SystemExit) as exc:
            cli.main(argv)
        assert exc.value.code == 2
        capsys.readouterr()


def test_window_flag_accepts_leading_dash(capsys):
    # "-8..8" looks like an option to argparse until main glues it on
    code, out, _ = run(["page", "--n", "1", "--r", "8", "--engine", "closed",
                        "--window", "-8..8"], capsys)
    assert code == 0
    assert "t in -8..8" in out


def test_json_envelope_shape(capsys):
    code, out, err = run(["coeff", "--n", "1", "--format", "json"], capsys)
    assert code == 0 and err == ""
    envelope = json.loads(out)
    assert set(envelope) == {"version", "command", "config", "result"}
    assert envelope["command"] == "coeff"
    assert envelope["config"]["n"] == 1
    assert envelope["config"]["relation"] is None
    assert envelope["config"]["format"] == "json"
    assert envelope["version"]
    assert envelope["result"]["period"] == 8


def test_json_config_echoes_window_as_list(capsys):
    code, out, _ = run(["page", "--n", "1", "--r", "8", "--window", "-8..8",
                        "--engine", "closed", "--format", "json"], capsys)
    assert code == 0
    envelope = json.loads(out)
    assert envelope["config"]["window"] == [-8, 8]
    assert envelope["config"]["engine"] == "closed"
    assert envelope["result"]["rows_shown"] == 3
    assert all(cell["m"] <= 3 for cell in envelope["result"]["cells"])


def test_engine_disagreement_trips_invariant_exit(monkeypatch, capsys):
    def skewed(n, r, window, caps):
        return {(0, 0): ModuleStructure(5, ())}

    monkeypatch.setitem(cli.ENGINES, "step", skewed)
    code, out, err = run(["page", "--n", "1", "--r", "8",
                          "--window", "-8..8"], capsys)
    assert code == 1 and out == ""
    assert err.startswith("invariant failure: engines disagree")
    assert "closed=" in err and "step=" in err


def test_svg_bytes_are_stable(capsys):
    argv = ["page", "--n", "1", "--r", "3", "--window", "-8..8",
            "--format", "svg", "--engine", "closed"]
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    assert first == second
    assert first.startswith("<svg")
    assert "page 3, n=1" in first
    # a permanent-cycle chart on an acting page draws its arrows
    assert "marker-end" in first
    assert "<circle" in first and "<title>" in first


def test_svg_skips_arrows_off_acting_pages(capsys):
    _, out, _ = run(["page", "--n", "1", "--r", "2", "--window", "-8..8",
                     "--format", "svg", "--engine", "closed"], capsys)
    assert "marker-end" not in out.split("</defs>", 1)[1]


def test_page_oracle_reports_flags(capsys):
    code, out, _ = run(["page", "--n", "1", "--r", "4", "--window", "-8..8",
                        "--engine", "oracle"], capsys)
    assert code == 0
    assert "oracle flagged cells:" in out


def test_bo_reduce_normal_form(capsys):
    code, out, _ = run(["bo", "--n", "1", "--q", "2", "--weight", "4",
                        "--reduce", "2*c1 + c1^2"], capsys)
    assert code == 0
    assert "reduce(2*c1 + c1^2) =" in out
    assert "r1 = " in out and "r2 = " in out


def test_bo_expression_guardrails(capsys):
    base = ["bo", "--n", "1", "--q", "2", "--weight", "4", "--reduce"]
    for expr in ("c9", "c1/c2", "c1**c2", "__import__('os')", "(2*"):
        code, _, err = run(base + [expr], capsys)
        assert code == 2, expr
        assert err.startswith("error:")


def test_bo_q_defaults_to_weight(capsys):
    code, out, _ = run(["bo", "--n", "1", "--weight", "3",
                        "--format", "json"], capsys)
    assert code == 0
    envelope = json.loads(out)
    assert envelope["config"]["q"] is None
    assert envelope["result"]["q"] == 3
    assert len(envelope["result"]["generator_degrees"]) == 3


def test_coeff_relation_line(capsys):
    code, out, _ = run(["coeff", "--n", "2", "--relation",
                        "alpha*alpha_2 = 2*w"], capsys)
    assert code == 0
    assert "'alpha*alpha_2 = 2*w' holds" in out

    code, _, err = run(["coeff", "--n", "2", "--relation", "alpha*beta = 0"],
                       capsys)
    assert code == 2
    assert err.startswith("error:")


def test_fgl_text_sections(capsys):
    code, out, _ = run(["fgl", "--n", "1", "--terms", "4"], capsys)
    assert code == 0
    assert "[-1](u):" in out and "[2](u):" in out
    assert "u^1: 2" in out  # doubling starts at 2u


def test_chern_text_lists_conjugates(capsys):
    code, out, _ = run(["chern", "--n", "1", "--q", "2", "--weight", "4"],
                       capsys)
    assert code == 0
    assert "c1* =" in out and "c2* =" in out
    assert "mod-2 defect at weights" in out


def test_orient_text_certificate(capsys):
    code, out, _ = run(["orient", "--n", "1"], capsys)
    assert code == 0
    assert "\ncertified" in out
    assert "conjugation-fixed: ok" in out
    assert "degree-gap: ok" in out
    assert "external:" in out and "note:" in out


def test_orient_json_round_trip(capsys):
    code, out, _ = run(["orient", "--n", "2", "--format", "json"], capsys)
    assert code == 0
    envelope = json.loads(out)
    assert envelope["result"]["certified"] is True
    assert len(envelope["result"]["steps"]) == 14
    methods = {s["method"] for s in envelope["result"]["steps"]}
    assert methods == {"conjugation-fixed", "swap-doubling", "degree-gap"}
