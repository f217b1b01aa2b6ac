"""Tests for experiment configs, the runner, reports and the command line."""

import json

import pytest
from pydantic import ValidationError

from fracchain.cli import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, SUBCOMMAND_KINDS, main
from fracchain.config import Config
from fracchain.exceptions import ConfigError
from fracchain.experiments import (
    SuiteRunner,
    available_kinds,
    format_table,
    get_kind,
    load_config,
    register,
    report,
    run,
    run_suite,
    write_csv,
)
from fracchain.experiments.io import (
    RESOLVED_CONFIG,
    RESULTS_CSV,
    RESULTS_JSON,
    SUMMARY_JSON,
    read_results,
    write_json,
)
from fracchain.experiments.registry import param
from fracchain.experiments.report import REPORT_CSV
from fracchain.experiments.runner import PROGRESS_FILE, SUITE_JSON
from fracchain.models import ExperimentConfig, ResultRecord
from fracchain.progress_tracker import ProgressTracker


def record(**kwargs):
    return ResultRecord(experiment="demo", metric="m", **kwargs)


class TestResultRecord:
    """Test suite for pass/fail evaluation of a metric."""

    def test_inside_bounds(self):
        """Test a value inside [lower, upper] passes."""
        assert record(value=1.5, lower=1.0, upper=2.0).passed
        assert not record(value=2.5, lower=1.0, upper=2.0).passed

    def test_error_multiplier_widens(self):
        """Test value - k * error may reach the interval."""
        assert record(value=2.5, error=0.3, upper=2.0, error_multiplier=2.0).passed
        assert not record(value=2.5, error=0.3, upper=2.0, error_multiplier=1.0).passed

    def test_passed_is_derived(self):
        """Test a supplied verdict is overridden by the bounds."""
        assert not record(value=5.0, upper=1.0, passed=True).passed

    def test_non_finite_fails(self):
        """Test NaN values never pass, even without bounds."""
        assert not record(value=float("nan")).passed


class TestExperimentConfig:
    """Test suite for config validation."""

    def test_defaults(self, passing_config):
        """Test optional fields take their defaults."""
        config = ExperimentConfig.model_validate(passing_config)
        assert config.seed == 0
        assert config.n_batches == Config.MIN_BATCHES
        assert config.tolerance("exponent", 0.1) == 0.1

    @pytest.mark.parametrize("update", [
        {"id": "two words"},
        {"n_batches": 10},
        {"sweeps": 100, "burn_in": 100},
        {"unexpected": 1},
    ])
    def test_invalid_configs(self, passing_config, update):
        """Test bad ids, batch counts, run lengths and unknown keys are rejected."""
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate({**passing_config, **update})

    def test_load_config_errors(self, tmp_path, write_config, passing_config):
        """Test missing files, bad JSON and schema violations become ConfigError."""
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "absent.json")
        broken = tmp_path / "broken.json"
        broken.write_text("{not json")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(broken)
        with pytest.raises(ConfigError, match="schema"):
            load_config(write_config({**passing_config, "n_batches": 3}))
        assert load_config(write_config(passing_config)).id == "power_tail"


class TestRegistry:
    """Test suite for experiment kinds."""

    def test_subcommand_kinds_registered(self):
        """Test every kind a subcommand accepts has an implementation."""
        kinds = set(available_kinds())
        for allowed in SUBCOMMAND_KINDS.values():
            assert allowed <= kinds

    def test_unknown_kind(self):
        """Test looking up an unknown kind is a config error."""
        with pytest.raises(ConfigError, match="Unknown experiment kind"):
            get_kind("teleport")

    def test_duplicate_registration(self):
        """Test a kind cannot be registered twice."""
        with pytest.raises(ValueError, match="registered twice"):
            register("couplings")(lambda config: None)

    def test_required_param(self, passing_config):
        """Test missing required params raise and optional ones default."""
        config = ExperimentConfig.model_validate(passing_config)
        assert param(config, "alpha") == 2.5
        assert param(config, "horizon", 64) == 64
        with pytest.raises(ConfigError, match="params.horizon"):
            param(config, "horizon", required=True)

    def test_fourier_exponent_candidates(self):
        """Test a Fourier tail fit sits closer to 2u+1 than to 2u+2."""
        config = ExperimentConfig.model_validate({
            "id": "fourier_tail",
            "kind": "couplings",
            "params": {"source": "fourier", "u": 0.75, "R": 512, "fit_window": [16, 256]},
        })
        output = get_kind("couplings")(config)
        candidates = output.summary["exponent_candidates"]
        assert candidates["2u+1"] < candidates["2u+2"]
        assert output.passed

    def test_log_asymptotics_off_centre(self):
        """Test the box Green function matches the log prediction at the centre and at w = (0, 1/2)."""
        config = ExperimentConfig.model_validate({
            "id": "box_log",
            "kind": "gff_log_asymptotics",
            "params": {"n_values": [32, 64], "resolution": 64},
        })
        output = get_kind("gff_log_asymptotics")(config)
        metrics = {r.metric: r for r in output.records}
        assert metrics["conformal_radius_error"].passed
        assert metrics["off_centre_constant_error[n=64]"].passed
        assert output.summary["r_D_off_centre"] < output.summary["r_D"]

    def test_correlation_inequalities_kind(self):
        """Test the enumeration experiment runs on a five-site chain with non-negative slacks."""
        config = ExperimentConfig.model_validate({
            "id": "sandwich",
            "kind": "correlation_inequalities",
            "params": {
                "half_width": 2, "K": 5, "regev_K": 5,
                "cases": [{"alpha": 2.5, "beta": 1.0, "spacing": 1.0, "lam": 1.0, "shift": 0.5}],
            },
        })
        output = get_kind("correlation_inequalities")(config)
        assert [r.metric for r in output.records] == [
            "sandwich_min_slack[case=0]", "monotonicity_min_slack[case=0]",
        ]
        assert output.passed


class TestArtifacts:
    """Test suite for run-directory files."""

    def test_csv_is_deterministic(self, tmp_path):
        """Test rewriting the same rows gives identical bytes."""
        rows = [{"r": 1, "J": 0.1, "stderr": None}, {"r": 2, "J": 1.0 / 3.0}]
        first = write_csv(tmp_path / "a.csv", rows).read_bytes()
        second = write_csv(tmp_path / "a.csv", rows).read_bytes()
        assert first == second
        assert first.decode().splitlines() == ["r,J,stderr", "1,0.1,", "2,0.3333333333333333,"]

    def test_run_writes_directory(self, tmp_path, passing_config):
        """Test a passing run writes results, config, summary and artifacts."""
        out = tmp_path / "run"
        records, code = run(ExperimentConfig.model_validate(passing_config), out)
        assert code == 0
        assert records[0].metric == "tail_exponent"
        for name in (RESULTS_CSV, RESULTS_JSON, RESOLVED_CONFIG, SUMMARY_JSON, "couplings.csv", "couplings.svg"):
            assert (out / name).exists()
        data = json.loads((out / RESULTS_JSON).read_text())
        assert data["passed"] is True
        assert json.loads((out / SUMMARY_JSON).read_text())["alpha"] == 2.5

    def test_failing_run(self, tmp_path, failing_config):
        """Test a tolerance tighter than the fit gives exit code 1."""
        records, code = run(ExperimentConfig.model_validate(failing_config), tmp_path / "run")
        assert code == 1
        assert not records[0].passed


class TestReport:
    """Test suite for PASS/FAIL/MISSING tables."""

    def test_pass_fail_missing(self, tmp_path, passing_config, failing_config):
        """Test criteria are grouped and ordered numerically."""
        suite = tmp_path / "suite"
        run(ExperimentConfig.model_validate(passing_config), suite / "power_tail")
        run(ExperimentConfig.model_validate(failing_config), suite / "spitzer_tight")
        write_json(suite / "ghost" / RESOLVED_CONFIG, {"id": "ghost", "criterion": 12})

        rows, code = report(suite)
        assert code == 1
        assert [(row["criterion"], row["status"]) for row in rows] == [
            ("3", "PASS"), ("4", "FAIL"), ("12", "MISSING"),
        ]
        assert (suite / REPORT_CSV).exists()
        assert "MISSING" in format_table(rows)

    def test_rows_carry_anchors(self, tmp_path, passing_config, failing_config):
        """Test each criterion row names the result it checks, missing runs included."""
        suite = tmp_path / "suite"
        run(ExperimentConfig.model_validate({**passing_config, "anchor": "Prop. tail"}), suite / "power_tail")
        run(ExperimentConfig.model_validate(failing_config), suite / "spitzer_tight")
        write_json(suite / "ghost" / RESOLVED_CONFIG, {"id": "ghost", "criterion": 12, "anchor": "Eq. energy"})

        rows, _ = report(suite)
        assert [row["anchor"] for row in rows] == ["Prop. tail", "", "Eq. energy"]
        assert (suite / REPORT_CSV).read_text().splitlines()[0].startswith("criterion,anchor,")
        assert read_results(suite / "power_tail")[0].anchor == "Prop. tail"
        assert "Eq. energy" in format_table(rows)

    def test_single_run_directory(self, tmp_path, passing_config):
        """Test a run directory reports on its own."""
        run(ExperimentConfig.model_validate(passing_config), tmp_path / "one")
        rows, code = report(tmp_path / "one", write=False)
        assert code == 0
        assert rows[0]["experiments"] == "one"
        assert not (tmp_path / "one" / REPORT_CSV).exists()

    def test_nothing_to_report(self, tmp_path):
        """Test empty and missing directories give no rows and exit 0."""
        (tmp_path / "empty").mkdir()
        assert report(tmp_path / "empty") == ([], 0)
        assert report(tmp_path / "nowhere") == ([], 0)
        assert format_table([]) == "No results found."


class TestSuiteRunner:
    """Test suite for parallel, resumable suites."""

    @pytest.fixture
    def configs(self, passing_config, failing_config):
        """One passing and one failing config."""
        return [ExperimentConfig.model_validate(c) for c in (passing_config, failing_config)]

    def test_runs_in_config_order(self, tmp_path, configs):
        """Test entries follow config order and progress is checkpointed."""
        entries = SuiteRunner(num_workers=2).run_suite(configs, tmp_path / "suite", show_progress=False)
        assert [e.experiment for e in entries] == ["power_tail", "spitzer_tight"]
        assert [e.passed for e in entries] == [True, False]
        assert (tmp_path / "suite" / PROGRESS_FILE).exists()
        status = json.loads((tmp_path / "suite" / SUITE_JSON).read_text())["status"]
        assert status["total_completed"] == 2
        assert status["passed"] == 1

    def test_resume_skips_finished(self, tmp_path, configs):
        """Test a resumed suite reports finished experiments without rerunning them."""
        runner = SuiteRunner(num_workers=1)
        runner.run_suite(configs, tmp_path / "suite", show_progress=False)
        entries = runner.run_suite(configs, tmp_path / "suite", resume=True, show_progress=False)
        assert all(e.skipped for e in entries)
        assert [e.passed for e in entries] == [True, False]

    def test_errors_are_rerun_on_resume(self, tmp_path, configs, mocker):
        """Test experiments that raised are recorded and retried."""
        runner = SuiteRunner(num_workers=1)
        mocker.patch("fracchain.experiments.runner.run", side_effect=RuntimeError("boom"))
        entries = runner.run_suite(configs[:1], tmp_path / "suite", show_progress=False)
        assert entries[0].error == "boom"
        assert not entries[0].passed
        mocker.stopall()

        entries = runner.run_suite(configs[:1], tmp_path / "suite", resume=True, show_progress=False)
        assert not entries[0].skipped
        assert entries[0].passed

    def test_invalid_suites(self, tmp_path, configs):
        """Test duplicate ids and unknown methods are rejected."""
        runner = SuiteRunner(num_workers=1)
        with pytest.raises(ValueError, match="unique"):
            runner.run_suite([configs[0], configs[0]], tmp_path / "suite")
        with pytest.raises(ValueError, match="Unknown method"):
            runner.run_suite(configs, tmp_path / "suite", method="asyncio")

    def test_run_suite_from_directory(self, tmp_path, write_config, passing_config):
        """Test configs are loaded from a directory and seeds can be overridden."""
        write_config(passing_config)
        entries, code = run_suite(tmp_path / "configs", tmp_path / "suite", num_workers=1, seed=7)
        assert code == 0
        resolved = json.loads((tmp_path / "suite" / "power_tail" / RESOLVED_CONFIG).read_text())
        assert resolved["seed"] == 7


class TestProgressTracker:
    """Test suite for suite checkpoints."""

    def test_save_and_reload(self, tmp_path):
        """Test completed entries survive a reload."""
        path = tmp_path / "progress.json"
        tracker = ProgressTracker(path)
        tracker.mark_completed("a", True, 1.5)
        tracker.mark_completed("b", False, 0.5, error="boom")
        tracker.save()

        reloaded = ProgressTracker(path)
        assert reloaded.is_completed("a")
        assert not reloaded.is_completed("b")
        status = reloaded.get_status()
        assert status["total_completed"] == 2
        assert status["passed"] == 1
        assert status["errors"] == 1
        assert status["total_runtime"] == pytest.approx(2.0)

    def test_reset(self, tmp_path):
        """Test reset clears memory and the checkpoint file."""
        path = tmp_path / "progress.json"
        tracker = ProgressTracker(path)
        tracker.mark_completed("a", True, 1.0)
        tracker.save()
        tracker.reset()
        assert not path.exists()
        assert tracker.get_status()["total_completed"] == 0


@pytest.mark.integration
class TestCommandLine:
    """Test suite for exit codes of the fracchain command."""

    def test_pass_and_fail(self, tmp_path, write_config, passing_config, failing_config):
        """Test exit codes 0 and 1 follow the acceptance checks."""
        good = write_config(passing_config)
        bad = write_config(failing_config)
        assert main(["couplings", "--config", str(good), "--out", str(tmp_path / "good")]) == EXIT_PASS
        assert main(["run", "--config", str(bad), "--out", str(tmp_path / "bad")]) == EXIT_FAIL
        assert (tmp_path / "good" / RESULTS_CSV).exists()

    def test_default_out_and_seed(self, write_config, passing_config):
        """Test runs default to the results directory and honour --seed."""
        assert main(["couplings", "--config", str(write_config(passing_config)), "--seed", "5"]) == EXIT_PASS
        resolved = json.loads((Config.RESULTS_DIR / "power_tail" / RESOLVED_CONFIG).read_text())
        assert resolved["seed"] == 5

    def test_usage_errors(self, tmp_path, write_config, passing_config):
        """Test kind mismatches, missing files and schema errors exit with 2."""
        path = write_config(passing_config)
        assert main(["walk", "--config", str(path)]) == EXIT_USAGE
        assert main(["run", "--config", str(tmp_path / "absent.json")]) == EXIT_USAGE
        unknown = write_config({**passing_config, "id": "unknown", "kind": "teleport"})
        assert main(["run", "--config", str(unknown)]) == EXIT_USAGE
        schema = write_config({**passing_config, "id": "schema", "n_batches": 2})
        assert main(["run", "--config", str(schema)]) == EXIT_USAGE

    def test_report_command(self, tmp_path, write_config, passing_config, capsys):
        """Test the report command prints a table and returns its verdict."""
        main(["couplings", "--config", str(write_config(passing_config)), "--out", str(tmp_path / "suite" / "a")])
        assert main(["report", str(tmp_path / "suite")]) == EXIT_PASS
        assert "PASS" in capsys.readouterr().out
