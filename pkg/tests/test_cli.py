from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from nahmforge import cli, suites
from nahmforge.nahm import build_capparelli, eval_nahm
from nahmforge.series import format_series


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def test_eval_capparelli(runner):
    res = runner.invoke(cli.main, ["eval", "--builtin", "capparelli", "--order", "13"])
    assert res.exit_code == 0
    line = res.output.strip()
    assert line.startswith("1 + q^2 + q^3 + q^4 + q^5 + 2*q^6")
    assert line.endswith("4*q^13")
    # inclusive order, no remainder term
    assert line == format_series(eval_nahm(build_capparelli(), 14), order_term=False)


def test_eval_order_zero_prints_one(runner, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"A": [["1"]], "b": ["0"], "c": "0", "d": [1]}))
    res = runner.invoke(cli.main, ["eval", "--spec", str(spec), "--order", "0"])
    assert res.exit_code == 0 and res.output.strip() == "1"


def test_eval_family_and_json(runner, tmp_path):
    out = tmp_path / "series.json"
    res = runner.invoke(cli.main, ["eval", "--builtin", "T1.2:r=2:j=1", "--order", "5", "--json", str(out)])
    assert res.exit_code == 0
    assert res.output.strip().startswith("1 + q^(1/2)")
    assert json.loads(out.read_text())["include_c"] is False


@pytest.mark.parametrize(
    "args",
    [
        ["eval", "--builtin", "bogus"],
        ["eval"],
        ["eval", "--builtin", "capparelli", "--spec", "x.json"],
        ["eval", "--spec", "/nonexistent.json"],
        ["eval", "--builtin", "capparelli", "--order", "-1"],
    ],
)
def test_eval_usage_errors(runner, args):
    assert runner.invoke(cli.main, args).exit_code == 2


def test_modularity_levels(runner):
    res = runner.invoke(cli.main, ["modularity", "--theorem", "4.2", "--r", "2"])
    assert res.exit_code == 0
    assert "[PASS] theorem 4.2 r=2: level 6272 (closed form 6272)" in res.output
    res = runner.invoke(cli.main, ["modularity", "--theorem", "4.4"])
    assert res.exit_code == 0
    for level in (1600, 5184, 10816, 18496):
        assert f"level {level}" in res.output


@pytest.mark.parametrize("args", [["--theorem", "4.9"], ["--r", "1..3"], ["--r", "x"]])
def test_modularity_usage_errors(runner, args):
    assert runner.invoke(cli.main, ["modularity", *args]).exit_code == 2


def test_verify_passes(runner):
    res = runner.invoke(cli.main, ["verify", "--suite", "identities", "--r", "2", "--order", "20"])
    assert res.exit_code == 0, res.output
    assert res.output.strip().endswith("checks passed")
    assert "[FAIL]" not in res.output


def test_verify_failure_exits_one(runner, monkeypatch):
    real = suites.rhs_builder
    monkeypatch.setattr(suites, "rhs_builder", lambda *a, **k: real(*a, **k).shift(1))
    res = runner.invoke(cli.main, ["verify", "--suite", "identities", "--r", "2", "--order", "10"])
    assert res.exit_code == 1
    assert "[FAIL]" in res.output


@pytest.mark.parametrize(
    "args", [["--order", "5"], ["--r", "1..3"], ["--r", "3..2"], ["--tol", "0.1"], ["--suite", "nope"], ["--terms", "0"]]
)
def test_verify_usage_errors(runner, args):
    assert runner.invoke(cli.main, ["verify", *args]).exit_code == 2


def test_json_report_round_trip(runner, tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    args = ["verify", "--suite", "bailey", "--r", "2", "--order", "12", "--json", str(first)]
    assert runner.invoke(cli.main, args).exit_code == 0
    report = json.loads(first.read_text())
    assert set(report) == {"config", "results", "summary"}
    assert report["summary"]["failed"] == 0
    res = runner.invoke(cli.main, ["verify", "--config", str(first), "--json", str(second)])
    assert res.exit_code == 0
    again = json.loads(second.read_text())
    assert json.dumps(again["results"], sort_keys=True) == json.dumps(report["results"], sort_keys=True)


def test_flags_override_config(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"r_min": 2, "r_max": 4, "order": 30, "suites": ["bailey"]}))
    cfg = cli.build_config(cli.load_config(path), {"order": 15, "tolerance": None})
    assert (cfg.r_min, cfg.r_max, cfg.order, cfg.suites) == (2, 4, 15, ["bailey"])


def test_config_rejects_unknown_keys(tmp_path, runner):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"rank": 3}))
    with pytest.raises(cli.ConfigError):
        cli.load_config(path)
    assert runner.invoke(cli.main, ["verify", "--config", str(path)]).exit_code == 2


def test_parse_r_range():
    assert cli.parse_r_range("2..5") == (2, 5)
    assert cli.parse_r_range("3") == (3, 3)
    with pytest.raises(cli.ConfigError):
        cli.parse_r_range("a..b")
