"""Experiment harness: scenarios, tables, curves, audits, persistence."""

import json

import numpy as np
import pytest

from elm_lab.dist import SimplexPoint
from elm_lab.experiments import (
    CURVE_BUILTINS,
    TABLE_BUILTINS,
    Scenario,
    ScenarioError,
    builtin_curve,
    builtin_scenario,
    read_scenario,
    run_appropriateness_audit,
    run_curve,
    run_table,
    scenario_from_json,
    scenario_to_json,
    write_results,
    write_scenario,
)
from elm_lab.level2 import NegEntropyUniformPrior
from elm_lab.losses import Level1LossKind
from elm_lab.optimizer import OptimizerConfig


def tiny_scenario(**overrides):
    base = dict(
        scenario_id="tiny",
        theta_star=SimplexPoint(np.array([0.5, 0.5])),
        n_values=(10, 30),
        lambda_values=(0.0, 0.5),
        runs=2,
        level1=Level1LossKind.BRIER,
        regularizer=NegEntropyUniformPrior(),
        data_scale=0.5,
        grid_m=1000,
        seed=99,
        optimizer=OptimizerConfig(starts=4),
    )
    base.update(overrides)
    return Scenario(**base)


class TestScenarioValidation:
    def test_rejects_descending_n(self):
        with pytest.raises(ScenarioError):
            tiny_scenario(n_values=(30, 10))

    def test_rejects_no_runs(self):
        with pytest.raises(ScenarioError):
            tiny_scenario(runs=0)

    def test_rejects_negative_lambda(self):
        with pytest.raises(ScenarioError):
            tiny_scenario(lambda_values=(-0.5,))

    def test_rejects_bad_theta_hat_index(self):
        with pytest.raises(ScenarioError):
            tiny_scenario(theta_hat_index=2)


class TestScenarioIO:
    def test_round_trip(self, tmp_path):
        s = builtin_scenario("binary-005")
        path = tmp_path / "s.json"
        write_scenario(s, path)
        assert scenario_to_json(read_scenario(path)) == scenario_to_json(s)

    def test_lambda_survives_full_precision(self, tmp_path):
        s = tiny_scenario(lambda_values=(1e-5, 0.1))
        path = tmp_path / "s.json"
        write_scenario(s, path)
        assert read_scenario(path).lambda_values == (1e-5, 0.1)

    def test_missing_field_diagnostics(self):
        data = scenario_to_json(tiny_scenario())
        del data["grid_m"]
        with pytest.raises(ScenarioError, match="grid_m"):
            scenario_from_json(data)

    def test_wrong_type_diagnostics(self):
        data = scenario_to_json(tiny_scenario())
        data["runs"] = "many"
        with pytest.raises(ScenarioError, match="runs"):
            scenario_from_json(data)

    def test_bad_json_reports_line(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{\n  ]")
        with pytest.raises(ScenarioError, match="line"):
            read_scenario(path)

    def test_kl_regularizer_round_trip(self):
        from elm_lab.level2 import KLToDirichlet
        from elm_lab.dist import DirichletParams

        s = tiny_scenario(regularizer=KLToDirichlet(DirichletParams(np.array([2.0, 2.0]))))
        back = scenario_from_json(scenario_to_json(s))
        assert isinstance(back.regularizer, KLToDirichlet)
        np.testing.assert_array_equal(back.regularizer.prior.alpha, [2.0, 2.0])


@pytest.fixture(scope="module")
def tiny_table():
    return run_table(tiny_scenario())


class TestRunTable:
    def test_cell_count_and_shape(self, tiny_table):
        assert len(tiny_table.cells) == 4
        assert len(tiny_table.records) == 8
        for c in tiny_table.cells:
            assert c.run_count == 2
            assert c.entropy_std >= 0.0
            assert 0.0 <= c.theta_hat_mean <= 1.0

    def test_lambda_zero_rows_are_degenerate(self, tiny_table):
        for c in tiny_table.cells:
            if c.lam == 0.0:
                assert c.entropy_mean <= 0.05

    def test_deterministic_rerun(self, tiny_table):
        again = run_table(tiny_scenario())
        for a, b in zip(tiny_table.cells, again.cells):
            assert a == b

    def test_cell_lookup(self, tiny_table):
        assert tiny_table.cell(0.5, 30).n == 30
        with pytest.raises(KeyError):
            tiny_table.cell(7.0, 30)

    def test_csv_output(self, tiny_table, tmp_path):
        path = tmp_path / "t.csv"
        write_results(tiny_table, path, format="csv")
        lines = path.read_text().splitlines()
        assert lines[0].split(",") == [
            "scenario_id", "lambda", "n", "run_count",
            "entropy_mean", "entropy_std",
            "theta_hat_mean", "theta_hat_std",
            "elm_mean_mean", "elm_mean_std",
        ]
        assert len(lines) == 1 + 4
        assert lines[1].startswith("tiny,")

    def test_json_output_carries_raw_records(self, tiny_table, tmp_path):
        path = tmp_path / "t.json"
        write_results(tiny_table, path, format="json")
        data = json.loads(path.read_text())
        assert len(data["records"]) == 8
        rec = data["records"][0]
        assert {"lambda", "n", "run", "entropy_bits", "q",
                "stream_indices"} <= set(rec)
        assert data["scenario"]["seed"] == 99


class TestRunCurve:
    def test_builtin_panels_exist(self):
        for name in CURVE_BUILTINS:
            theta, lambdas, c_grid, shape = builtin_curve(name)
            assert lambdas == (0.0, 0.25, 0.5, 0.75, 1.0)
            assert shape.size == theta.k

    def test_lambda_zero_curve_decreases(self):
        theta, lambdas, c_grid, shape = builtin_curve("figure1-left")
        result = run_curve(theta, lambdas, c_grid, shape)
        row = result.values[0]
        assert np.all(np.diff(row) < 0)
        assert result.argmin_c[0] == c_grid[-1]

    def test_positive_lambda_has_interior_argmin(self):
        theta, lambdas, c_grid, shape = builtin_curve("figure1-left")
        result = run_curve(theta, lambdas, c_grid, shape)
        for i, lam in enumerate(lambdas):
            if lam > 0:
                j = result.argmin_index(i)
                assert 0 < j < c_grid.size - 1

    def test_validation(self):
        theta = SimplexPoint(np.array([0.5, 0.5]))
        with pytest.raises(ValueError):
            run_curve(theta, [0.5], np.array([2.0, 1.0]), np.ones(2))
        with pytest.raises(ValueError):
            run_curve(theta, [0.5], np.array([1.0, 2.0]), np.ones(3))

    def test_curve_csv(self, tmp_path):
        theta, lambdas, c_grid, shape = builtin_curve("figure1-left")
        result = run_curve(theta, lambdas[:2], c_grid[:10], shape)
        path = tmp_path / "c.csv"
        write_results(result, path, format="csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "lambda,c,expected_l2_risk"
        assert len(lines) == 1 + 2 * 10


class TestAudit:
    def test_requires_enough_runs(self):
        with pytest.raises(ScenarioError):
            run_appropriateness_audit(tiny_scenario(runs=2))

    def test_degenerate_lambda_row(self, tmp_path):
        report = run_appropriateness_audit(
            tiny_scenario(lambda_values=(0.0,), runs=5)
        )
        entry = report.entries[0]
        assert entry.a1_nonincreasing
        assert entry.a1_degenerate_constant
        assert not entry.a1_strict_decrease_somewhere
        assert entry.a2_dirac_at_largest_n
        # theta-hat convergence shows up as shrinking lattice distance
        assert entry.tv_to_truth[-1] <= entry.tv_to_truth[0] + 1e-9
        path = tmp_path / "audit.json"
        write_results(report, path, format="json")
        data = json.loads(path.read_text())
        assert data["entries"][0]["a1_degenerate_constant"] is True

    def test_audit_has_no_csv_form(self, tmp_path):
        report = run_appropriateness_audit(
            tiny_scenario(lambda_values=(0.0,), runs=5)
        )
        with pytest.raises(ValueError):
            write_results(report, tmp_path / "a.csv", format="csv")


class TestBuiltins:
    def test_all_table_builtins_valid(self):
        for name in TABLE_BUILTINS:
            s = builtin_scenario(name)
            assert s.runs == 10
            assert s.n_values == (10, 100, 1_000, 10_000, 100_000)
            assert len(s.lambda_values) == 6

    def test_binary_scenarios_use_scalar_brier_convention(self):
        assert builtin_scenario("binary-05").data_scale == 0.5
        assert builtin_scenario("ternary-uniform").data_scale == 1.0

    def test_unknown_name(self):
        with pytest.raises(ScenarioError):
            builtin_scenario("nope")
        with pytest.raises(ScenarioError):
            builtin_curve("nope")
