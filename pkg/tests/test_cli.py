"""Command-line interface: flags, config files, formats, exit codes."""

import json

import pytest
from click.testing import CliRunner

from fdtr import cli


@pytest.fixture
def runner():
    return CliRunner()


def test_optimize_json_headline_numbers(runner):
    result = runner.invoke(
        cli.main,
        ["optimize", "--bor", "8", "--snr-eve-db", "inf",
         "--target-sr", "0.75", "--target-sr", "2.2", "--format", "json"],
    )
    assert result.exit_code == 0
    payload = json.loads(result.output)
    by_target = {
        (item["decoder"], item["target_sr"]): item for item in payload["guaranteed"]
    }
    assert by_target[("mf", 0.75)]["required_snr_db"] == pytest.approx(5.086, abs=0.05)
    assert by_target[("mf", 2.2)]["required_snr_db"] == pytest.approx(9.954, abs=0.05)
    assert by_target[("sds", 0.75)]["required_snr_db"] == by_target[("oc", 0.75)][
        "required_snr_db"
    ]


def test_optimize_text_table(runner):
    result = runner.invoke(cli.main, ["optimize", "--bor", "4"])
    assert result.exit_code == 0
    assert "alpha_opt" in result.output
    assert "required_snr_db" in result.output


def test_simulate_csv_output(runner):
    result = runner.invoke(
        cli.main,
        ["simulate", "--n-symbols", "16", "--bor", "4", "--alpha", "0.5",
         "--snr-bob-db", "10", "--snr-eve-db", "10", "--decoder", "mf",
         "--trials", "150", "--seed", "3"],
    )
    assert result.exit_code == 0
    lines = result.output.strip().split("\n")
    header = lines[0].split(",")
    assert "sr_emp" in header and "sinr_eve_emp" in header
    row = dict(zip(header, lines[1].split(",")))
    assert row["decoder"] == "mf"
    assert row["n_trials"] == "150"


def test_simulate_accepts_infinite_eve_snr(runner):
    result = runner.invoke(
        cli.main,
        ["simulate", "--n-symbols", "8", "--bor", "4", "--snr-eve-db", "inf",
         "--trials", "50", "--seed", "4", "--format", "json"],
    )
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload[0]["sinr_eve_analytic"] > 0


def test_simulate_reads_scenario_file(runner, tmp_path):
    path = tmp_path / "scenario.toml"
    path.write_text('n_symbols = 8\nbor = 4\nn_trials = 40\ndecoder = "oc"\n')
    result = runner.invoke(
        cli.main, ["simulate", "--config", str(path), "--alpha", "0.3"]
    )
    assert result.exit_code == 0
    assert '"oc"' in result.output or ",oc," in result.output


def test_sweep_from_toml(runner, tmp_path):
    spec = tmp_path / "sweep.toml"
    spec.write_text(
        'variable = "alpha"\ngrid = [0.2, 0.8]\ndecoders = ["sds"]\n'
        "[fixed]\nn_symbols = 8\nbor = 4\nn_trials = 40\n"
    )
    out = tmp_path / "rows.csv"
    result = runner.invoke(
        cli.main, ["sweep", "--config", str(spec), "--out", str(out), "--trials", "30"]
    )
    assert result.exit_code == 0
    lines = out.read_text().strip().split("\n")
    assert len(lines) == 3
    assert lines[1].split(",")[header_index(lines[0], "n_trials")] == "30"


def header_index(header, name):
    return header.split(",").index(name)


def test_reproduce_figure_four_cli(runner, tmp_path):
    out = tmp_path / "fig4.json"
    result = runner.invoke(
        cli.main, ["reproduce-figure", "4", "--format", "json", "--out", str(out)]
    )
    assert result.exit_code == 0
    payload = json.loads(out.read_text())
    assert any(r["bor"] == 8 and r["sweep_value"] == 0.75 for r in payload)


def test_parameter_error_exit_code(runner, monkeypatch, capsys):
    import sys

    monkeypatch.setattr(
        sys, "argv",
        ["fdtr", "simulate", "--alpha", "1.5", "--trials", "10", "--n-symbols", "4"],
    )
    with pytest.raises(SystemExit) as exc:
        cli.entry()
    assert exc.value.code == 1
    assert "parameter error" in capsys.readouterr().err


def test_unknown_figure_exit_code(runner):
    result = runner.invoke(cli.main, ["reproduce-figure", "7"])
    assert result.exit_code != 0


def test_numerical_failure_exit_code(monkeypatch, capsys):
    import sys

    from fdtr.exceptions import ConvergenceError

    def explode(standalone_mode=False):
        raise ConvergenceError("solver stalled")

    monkeypatch.setattr(cli, "main", explode)
    monkeypatch.setattr(sys, "argv", ["fdtr", "simulate"])
    with pytest.raises(SystemExit) as exc:
        cli.entry()
    assert exc.value.code == 2
    assert "numerical failure" in capsys.readouterr().err


def test_selftest_passes(runner):
    result = runner.invoke(cli.main, ["selftest", "--trials", "600"])
    assert result.exit_code == 0, result.output
    assert "[PASS]" in result.output
    assert "[FAIL]" not in result.output
    assert "backend:" in result.output
