import csv
import io
import math
import subprocess
import sys

import pytest

from riceie import cli
from riceie.bounds import lower_bound, upper_bound
from riceie.cli import (
    CSV_COLUMNS,
    EXIT_DOMAIN,
    EXIT_OK,
    EXIT_VALIDATION,
    FigureId,
    SweepSpec,
    cmd_eval,
    cmd_figure,
    cmd_sweep,
    cmd_validate,
    figure_grid,
    main,
)
from riceie.errors import DomainError
from riceie.ie import EvalPoint, ie_eq1
from riceie.validate import BRACKET_SLACK, CALIBRATION, run_suites


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_eval_closed_form(capsys):
    assert main(["eval", "--k", "0", "--x", "3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "closed" in out
    value = float(next(line.split()[1] for line in out.splitlines() if line.startswith("value")))
    assert value == pytest.approx(1 - math.exp(-3.0), rel=1e-15)


def test_eval_named_method():
    buf = io.StringIO()
    assert cmd_eval(0.5, 7.0, "eq5", out=buf) == EXIT_OK
    value = float(next(line.split()[1] for line in buf.getvalue().splitlines() if line.startswith("value")))
    assert value == pytest.approx(1.142768166385401242037, rel=1e-9)


def test_eval_domain_error(capsys):
    assert main(["eval", "--k", "1.2", "--x", "1"]) == EXIT_DOMAIN
    assert "domain" in capsys.readouterr().err


def test_usage_error_exit_code(capsys):
    assert main(["eval", "--k", "0.5"]) == EXIT_DOMAIN
    assert main(["nonsense"]) == EXIT_DOMAIN


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "riceie", "eval", "--k", "0.5", "--x", "1.2", "--method", "eq3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "eq3" in proc.stdout


def test_sweep_single_point_matches_eval(tmp_path):
    out = tmp_path / "s.csv"
    assert cmd_sweep(SweepSpec([0.5], [7.0]), out) == EXIT_OK
    rows = read_csv(out)
    assert len(rows) == 1
    row = rows[0]
    assert list(row) == CSV_COLUMNS
    assert row["status"] == "ok"
    assert float(row["oracle"]) == ie_eq1(EvalPoint(0.5, 7.0)).value
    assert float(row["upper"]) == upper_bound(EvalPoint(0.5, 7.0))
    assert float(row["lower"]) == lower_bound(EvalPoint(0.5, 7.0))
    for tag in ["eq2", "eq3", "eq4", "eq5", "eq6"]:
        assert float(row[tag]) == pytest.approx(float(row["oracle"]), rel=1e-8)


def test_sweep_flags_k_one_and_continues(tmp_path):
    out = tmp_path / "s.csv"
    code = main(["sweep", "--k", "0.5,1.0", "--x", "2", "--method", "eq5", "--out", str(out)])
    assert code == EXIT_OK
    rows = read_csv(out)
    assert len(rows) == 2
    assert rows[0]["status"] == "ok"
    assert "invalid-domain:eq5" in rows[1]["status"]
    assert "lower-invalid" in rows[1]["status"]
    assert rows[1]["eq5"] == "" and rows[1]["lower"] == ""
    assert rows[1]["oracle"] != ""


def test_sweep_default_grid_disagreement(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--out", str(out)]) == EXIT_OK
    rows = read_csv(out)
    assert len(rows) == 81
    worst = max(float(r["disagreement"]) for r in rows)
    assert worst <= 1e-8


def test_sweep_range_syntax(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--k", "0.2:0.6:3", "--x", "1:100:3", "--spacing", "log",
                 "--method", "eq1", "--out", str(out)]) == EXIT_OK
    rows = read_csv(out)
    assert [float(r["k"]) for r in rows[::3]] == pytest.approx([0.2, math.sqrt(0.12), 0.6])
    assert [float(r["x"]) for r in rows[:3]] == pytest.approx([1.0, 10.0, 100.0])


def test_sweep_spec_validation():
    with pytest.raises(DomainError):
        SweepSpec([], [1.0])
    with pytest.raises(DomainError):
        SweepSpec([0.5], [1.0], methods=["eq9"])
    assert main(["sweep", "--k", "1.5", "--x", "1"]) == EXIT_DOMAIN


def test_figure_grids():
    assert len(figure_grid(FigureId.FIG3)) == 200
    for fig in (FigureId.FIG4, FigureId.FIG5, FigureId.FIG6):
        grid = figure_grid(fig)
        assert len(grid) == 97
        assert grid[0][0] == 0.02 and grid[-1][0] == 0.98


@pytest.fixture(scope="module")
def figures(tmp_path_factory):
    d = tmp_path_factory.mktemp("fig")
    paths = {}
    for n in (3, 4, 5, 6):
        p = d / f"fig{n}.csv"
        assert cmd_figure(FigureId(n), p) == EXIT_OK
        paths[n] = p
    return paths


def test_figure_row_counts(figures):
    assert [len(read_csv(figures[n])) for n in (3, 4, 5, 6)] == [200, 97, 97, 97]


def test_fig3_bracketing(figures):
    for r in read_csv(figures[3]):
        assert float(r["lower"]) < float(r["oracle"]) < float(r["upper"])


def test_fig4_bracketing(figures):
    for r in read_csv(figures[4]):
        assert float(r["lower"]) < float(r["oracle"]) < float(r["upper"])


def test_fig5_lower_close_below(figures):
    # at small k the true gap is below double resolution, so allow the
    # declared bracketing slack
    for r in read_csv(figures[5]):
        o, lo = float(r["oracle"]), float(r["lower"])
        assert lo <= o + BRACKET_SLACK
        if float(r["k"]) <= 0.95:
            assert (o - lo) / o < CALIBRATION["eps_lower_ceiling_x40"]


def test_fig6_eps_nonnegative(figures):
    rows = read_csv(figures[6])
    assert list(rows[0]) == ["k", "x", "eps_ar_lower", "status"]
    for r in rows:
        e = float(r["eps_ar_lower"])
        assert math.isfinite(e) and e >= 0.0
        if float(r["k"]) <= 0.95:
            assert e < CALIBRATION["eps_lower_ceiling_x80"]


def test_figure_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["figure", "--fig", "6", "--out", str(a)]) == EXIT_OK
    assert main(["figure", "--fig", "6", "--out", str(b)]) == EXIT_OK
    data = a.read_bytes()
    assert data == b.read_bytes()
    assert b"\r" not in data


def test_validate_quick():
    buf = io.StringIO()
    assert cmd_validate("quick", out=buf) == EXIT_OK
    assert "[FAIL]" not in buf.getvalue()


def test_mutation_swapped_bounds_is_caught(monkeypatch):
    swapped = {"bracketing": {"lower": upper_bound, "upper": lower_bound}}
    reports = run_suites("quick", overrides=swapped)
    by_name = {r.name: r for r in reports}
    assert not by_name["bracketing"].passed

    real = cli.run_suites
    monkeypatch.setattr(cli, "run_suites", lambda level: real(level, overrides=swapped))
    buf = io.StringIO()
    assert cmd_validate("quick", out=buf) == EXIT_VALIDATION
    assert "[FAIL] bracketing" in buf.getvalue()
