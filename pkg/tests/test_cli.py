import json

import pytest
from click.testing import CliRunner

from crawlgait.cli.main import cli
from crawlgait.utils.output import MANIFEST_FILE, REPORT_FILE, TRAJECTORY_FILE


@pytest.fixture
def runner():
    return CliRunner()


def read_report(out_dir):
    return json.loads((out_dir / REPORT_FILE).read_text())


class TestCommands:
    def test_scenarios(self, runner):
        result = runner.invoke(cli, ["scenarios"])
        assert result.exit_code == 0
        for name in ("ex-dry", "ex-comp", "slope-dry"):
            assert name in result.output

    def test_simulate_writes_artifacts(self, runner, tmp_path):
        out = tmp_path / "run"
        result = runner.invoke(cli, ["simulate", "-s", "ex-dry", "--v0", "3", "--steps", "256", "-o", str(out)])
        assert result.exit_code == 0, result.output
        report = read_report(out)
        assert report["final_velocity"] == pytest.approx(1.0, abs=1e-6)
        assert report["final_displacement"] == pytest.approx(2.0, abs=1e-3)
        header = (out / TRAJECTORY_FILE).read_text().splitlines()[0]
        assert header == "t,v,x,stick"
        manifest = json.loads((out / MANIFEST_FILE).read_text())
        assert [p["y"] for p in manifest["plots"]] == [["v"], ["x"]]

    def test_default_output_dir(self, runner, tmp_path):
        result = runner.invoke(cli, ["poincare", "-s", "ex-dry", "--v0", "3", "--periods", "2", "--steps", "64"])
        assert result.exit_code == 0, result.output
        assert read_report(tmp_path / "out")["iterates"] == pytest.approx([1.0, 1.0], abs=1e-6)

    def test_params(self, runner, tmp_path):
        out = tmp_path / "run"
        result = runner.invoke(cli, ["attractor", "-s", "ex-dry", "-p", "alpha=0.5", "--steps", "256", "-o", str(out)])
        assert result.exit_code == 0, result.output
        report = read_report(out)
        assert report["alpha"] == pytest.approx(-0.5, abs=1e-6)
        assert report["beta"] == pytest.approx(0.5, abs=1e-6)

    def test_limit_cycle_settles_first(self, runner, tmp_path):
        out = tmp_path / "run"
        result = runner.invoke(cli, ["limit-cycle", "-s", "ex-dry", "--v0", "3", "--steps", "256", "-o", str(out)])
        assert result.exit_code == 0, result.output
        report = read_report(out)
        assert report["settled_from"] == 3.0
        assert report["v_star"] == pytest.approx(1.0, abs=1e-6)
        assert (out / TRAJECTORY_FILE).exists()

    def test_gamma_stats(self, runner, tmp_path):
        out = tmp_path / "run"
        result = runner.invoke(cli, ["gamma-stats", "-s", "ex-dry", "-o", str(out)])
        assert result.exit_code == 0, result.output
        assert read_report(out)["min_gaps"] == pytest.approx([2.0])
        assert (out / "gamma.csv").read_text().startswith("t,gamma_1,gamma_2")

    def test_gamma_stats_needs_discrete_model(self, runner, tmp_path):
        result = runner.invoke(cli, ["gamma-stats", "-s", "cont-dry", "-o", str(tmp_path / "run")])
        assert result.exit_code == 1

    def test_check_passes(self, runner, tmp_path):
        out = tmp_path / "run"
        result = runner.invoke(cli, ["check", "-s", "ex-strib", "-o", str(out)])
        assert result.exit_code == 0, result.output
        report = read_report(out)
        assert report["classification"]["theorem"] == "generic-attractor"
        assert report["bounds"]["v_plus"] > 1.0

    def test_check_fails_dissipativity(self, runner, tmp_path):
        out = tmp_path / "run"
        result = runner.invoke(cli, ["check", "-s", "slope-dry", "-p", "load=3", "-o", str(out)])
        assert result.exit_code == 2
        # The report is written before the failure is signalled
        assert read_report(out)["dissipativity"]["pass"] is False

    def test_config_file(self, runner, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({
            "scenario": "ex-drystar",
            "solver": {"steps_per_period": 256},
            "run": {"v0": -1.0},
        }))
        out = tmp_path / "run"
        result = runner.invoke(cli, ["limit-cycle", "-c", str(path), "-o", str(out)])
        assert result.exit_code == 0, result.output
        assert read_report(out)["avg_velocity"] == pytest.approx(-0.5, abs=1e-9)


class TestErrors:
    def test_missing_config(self, runner, tmp_path):
        result = runner.invoke(cli, ["simulate", "-c", str(tmp_path / "absent.json")])
        assert result.exit_code == 1

    def test_no_model(self, runner):
        assert runner.invoke(cli, ["simulate"]).exit_code == 1

    def test_unknown_scenario(self, runner):
        assert runner.invoke(cli, ["check", "-s", "ex-wet"]).exit_code == 1

    def test_unknown_parameter(self, runner):
        assert runner.invoke(cli, ["check", "-s", "ex-comp", "-p", "alpha=1"]).exit_code == 1

    def test_malformed_param(self, runner):
        result = runner.invoke(cli, ["check", "-s", "ex-dry", "-p", "alpha"])
        assert result.exit_code == 2

    def test_steps_floor(self, runner):
        result = runner.invoke(cli, ["simulate", "-s", "ex-dry", "--steps", "4"])
        assert result.exit_code == 2


class TestSweep:
    def test_threads(self, runner, tmp_path):
        out = tmp_path / "sweep"
        result = runner.invoke(cli, ["sweep", "check", "-s", "ex-dry", "-s", "ex-comp",
                                     "--threads", "-w", "2", "-o", str(out)])
        assert result.exit_code == 0, result.output
        assert read_report(out / "ex-dry")["flag"] == "monotone"
        assert read_report(out / "ex-comp")["flag"] == "strictly-monotone"

    def test_nothing_to_run(self, runner):
        result = runner.invoke(cli, ["sweep", "check"])
        assert result.exit_code == 0
