import json
import xml.etree.ElementTree as ET

import pytest

from artifact import cli, report
from artifact.qec_codes import HAMMING_7_4
from artifact.sampling import SurvivalCurve, SurvivalPoint


def write_spec(tmp_path, text, name="spec.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


RB_SPEC = """
[experiment]
type = rb
name = small
seed = 3

[rb]
k = 2
model = depolarizing
p = 0.2
m_values = 2..8
n_sequences = 40
"""


def test_parse_values():
    assert cli.parse_values("2..5", int) == [2, 3, 4, 5]
    assert cli.parse_values("0..0.2/0.05") == [0.0, 0.05, 0.1, 0.15, 0.2]
    assert cli.parse_values("1, 3, 7..8", int) == [1, 3, 7, 8]
    with pytest.raises(cli.ConfigError):
        cli.parse_values("5..2", int)
    with pytest.raises(cli.ConfigError):
        cli.parse_values(" , ")


def test_list_bundled_specs(capsys):
    assert cli.main(["list"]) == 0
    names = capsys.readouterr().out.split()
    for want in ("fig2", "fig3", "fig4", "fig5", "fig6", "baseline-exp"):
        assert want in names


def test_fig2_alternates_and_plots(tmp_path):
    assert cli.main(["run", "fig2", "--out", str(tmp_path), "--plot"]) == 0
    curve = report.read_csv(tmp_path / "fig2.csv")
    assert curve.p_hat.tolist() == [1.0 - (m % 2) for m in range(2, 13)]
    svg = (tmp_path / "fig2.svg").read_text()
    ET.fromstring(svg)


def test_csv_format(tmp_path):
    assert cli.main(["rb", write_spec(tmp_path, RB_SPEC), "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "small.csv").read_text().splitlines()
    assert lines[0] == "m,p_hat,stderr,n_sequences,seed"
    assert len(lines) == 8
    m, p, se, n, seed = lines[1].split(",")
    assert (m, n, seed) == ("2", "40", "3")
    assert len(p.replace(".", "").lstrip("0")) >= 12


def test_malformed_spec_exits_2_without_output(tmp_path, capsys):
    out = tmp_path / "out"
    bad = write_spec(tmp_path, RB_SPEC.replace("n_sequences = 40", "n_sequences = many"))
    assert cli.main(["run", bad, "--out", str(out)]) == 2
    assert "config error" in capsys.readouterr().err
    assert not out.exists()
    assert cli.main(["run", write_spec(tmp_path, "not an ini", "x.ini"), "--out", str(out)]) == 2
    missing = RB_SPEC.replace("model = depolarizing", "model = telepathy")
    assert cli.main(["run", write_spec(tmp_path, missing, "y.ini"), "--out", str(out)]) == 2
    assert cli.main(["run", "no-such-spec", "--out", str(out)]) == 2
    assert not out.exists()


def test_alias_must_match_experiment_type(tmp_path):
    spec = write_spec(tmp_path, RB_SPEC)
    assert cli.main(["lrb", spec, "--out", str(tmp_path / "o")]) == 2
    assert not (tmp_path / "o").exists()


def test_reruns_are_byte_identical(tmp_path):
    spec = write_spec(tmp_path, RB_SPEC)
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert cli.main(["run", spec, "--out", str(a), "--plot"]) == 0
    assert cli.main(["run", spec, "--out", str(b), "--plot"]) == 0
    assert cli.main(["run", spec, "--out", str(c), "--plot", "--threads", "3"]) == 0
    for name in ("small.csv", "small.svg"):
        assert (a / name).read_bytes() == (b / name).read_bytes() == (c / name).read_bytes()


def test_seed_override_changes_output(tmp_path):
    spec = write_spec(tmp_path, RB_SPEC)
    assert cli.main(["run", spec, "--out", str(tmp_path / "a")]) == 0
    assert cli.main(["run", spec, "--out", str(tmp_path / "b"), "--seed", "99"]) == 0
    a = (tmp_path / "a" / "small.csv").read_text()
    b = (tmp_path / "b" / "small.csv").read_text()
    assert a != b and b.splitlines()[1].endswith(",99")


def test_lrb_sweep_spec(tmp_path):
    spec = write_spec(tmp_path, """
[experiment]
type = lrb
name = sweep
seed = 0

[lrb]
k = 2
reset_prob = 0
sweep = reset_prob
sweep_values = 0..0.4/0.2
m_values = 2
n_sequences = 50
""")
    assert cli.main(["lrb", spec, "--out", str(tmp_path), "--plot"]) == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == "reset_prob,m,p_hat,stderr,n_sequences,seed"
    assert len(lines) == 4
    assert lines[1].split(",")[2] == "1.00000000000"
    assert lines[2].split(",")[0] == "0.200000000000"
    ET.fromstring((tmp_path / "sweep.svg").read_text())


def test_parity_check_file_code(tmp_path):
    rows = "\n".join("".join(map(str, r)) for r in HAMMING_7_4)
    (tmp_path / "steane.txt").write_text(f"7 1\n{rows}\n\n{rows}\n")
    spec = write_spec(tmp_path, """
[experiment]
type = surjectivity
name = sj

[surjectivity]
code = steane.txt
""")
    assert cli.main(["surjectivity", spec, "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "sj.json").read_text())
    assert summary["surjective"] and summary["n"] == 7
    table = (tmp_path / "sj.csv").read_text().splitlines()
    assert "0,+X,000001" in table
    bad = write_spec(tmp_path, "[experiment]\ntype = surjectivity\n[surjectivity]\ncode = gone.txt\n", "b.ini")
    assert cli.main(["run", bad, "--out", str(tmp_path / "none")]) == 2


def test_twirl_spec(tmp_path):
    assert cli.main(["twirl", "twirl", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "twirl.json").read_text())
    assert summary["commutation_residual"] < 1e-10
    assert summary["witness"]["standard"]["scalar_action"]
    assert not summary["witness"]["hidden_register"]["scalar_action"]


def test_fit_from_csv(tmp_path):
    curve = SurvivalCurve([SurvivalPoint(m, 0.5 + 0.5 * 0.9**m, 0.0, 100) for m in range(2, 20)])
    report.emit_csv(curve, tmp_path / "curve.csv")
    spec = write_spec(tmp_path, """
[experiment]
type = fit
name = f

[fit]
source = csv
input = curve.csv
components = 2
""")
    assert cli.main(["fit", spec, "--out", str(tmp_path / "o"), "--plot"]) == 0
    fit = json.loads((tmp_path / "o" / "f_fit.json").read_text())
    lams = sorted(c["lambda"] for c in fit["components"])
    assert lams == pytest.approx([0.9, 1.0], abs=1e-6)


def test_invariant_violation_exit_code(tmp_path, monkeypatch):
    def broken(curve, what):
        raise cli.InvariantViolation("forced")

    monkeypatch.setattr(cli, "_check_alternating", broken)
    assert cli.main(["run", "fig2", "--out", str(tmp_path)]) == 3


def test_single_point_plot_and_empty_curve(tmp_path):
    one = SurvivalCurve([SurvivalPoint(2, 1.0, 0.0, 10)], {"seed": 0})
    path = report.emit_plot(one, tmp_path / "one.svg")
    root = ET.fromstring(path.read_text())
    assert root.tag.endswith("svg")
    assert report.emit_csv(one, tmp_path / "one.csv").read_text().count("\n") == 2
    empty = SurvivalCurve([])
    with pytest.raises(ValueError):
        report.emit_csv(empty, tmp_path / "e.csv")
    with pytest.raises(ValueError):
        report.emit_plot(empty, tmp_path / "e.svg")


def test_csv_round_trip(tmp_path):
    curve = SurvivalCurve([SurvivalPoint(2, 0.25, 0.1, 4), SurvivalPoint(3, 1 / 3, 0.2, 6)], {"seed": 5})
    back = report.read_csv(report.emit_csv(curve, tmp_path / "c.csv"))
    assert back.m.tolist() == [2, 3]
    assert back.p_hat.tolist() == pytest.approx([0.25, 1 / 3], rel=1e-11)
