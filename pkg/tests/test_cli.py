import json
import math

import numpy as np
import pytest

from carentropy import ScenarioError
from carentropy.cli import (
    EXIT_INVALID,
    EXIT_OK,
    EXIT_TOLERANCE,
    build_model,
    main,
    parse_scenario,
    render_csv,
    run,
)

MINIMAL = {
    "model": {"type": "chain", "n": 2, "t": 1.0, "mu": 0.5},
    "beta": 1.0,
    "excitations": [{"mode": 0}],
    "tasks": ["single"],
}


def scenario_text(**overrides):
    doc = dict(MINIMAL)
    doc.update(overrides)
    return json.dumps(doc)


class TestParsing:
    def test_minimal_document(self):
        scenario = parse_scenario(scenario_text())
        assert scenario.model["type"] == "chain"
        assert scenario.betas == (1.0,)
        assert scenario.excitations[0]["kind"] == "mode"

    def test_negative_beta_rejected(self):
        with pytest.raises(ScenarioError, match="beta"):
            parse_scenario(scenario_text(beta=-1.0))

    def test_beta_grid(self):
        scenario = parse_scenario(scenario_text(beta={"min": 0.5, "max": 2.0, "steps": 3}))
        np.testing.assert_allclose(scenario.betas, [0.5, 1.0, 2.0])

    def test_unknown_task_rejected(self):
        with pytest.raises(ScenarioError, match="tasks"):
            parse_scenario(scenario_text(tasks=["entropy"]))

    def test_mode_out_of_range_rejected(self):
        with pytest.raises(ScenarioError, match=r"excitations\[0\].mode"):
            parse_scenario(scenario_text(excitations=[{"mode": 5}]))

    def test_non_hermitian_explicit_matrix_rejected(self):
        with pytest.raises(ScenarioError, match="model.h0"):
            parse_scenario(
                scenario_text(model={"type": "explicit", "h0": [[0.0, 1.0], [2.0, 0.0]]})
            )

    def test_explicit_complex_entries(self):
        scenario = parse_scenario(
            scenario_text(model={"type": "explicit", "h0": [[1.0, [0.0, -0.5]], [[0.0, 0.5], 2.0]]})
        )
        h = build_model(scenario)
        assert h.space.dim == 4

    def test_vector_with_symmetrize_is_resolved(self):
        scenario = parse_scenario(
            scenario_text(excitations=[{"vector": [1.0, 0.0, 0.0, 0.0], "symmetrize": True}])
        )
        rows = run(scenario)
        assert len(rows) == 1

    def test_inadmissible_vector_without_symmetrize_rejected(self):
        scenario = parse_scenario(
            scenario_text(excitations=[{"vector": [1.0, 0.0, 0.0, 0.0], "symmetrize": False}])
        )
        with pytest.raises(ScenarioError, match="inadmissible"):
            run(scenario)

    def test_bad_json_rejected(self):
        with pytest.raises(ScenarioError, match="JSON"):
            parse_scenario("{not json")


class TestRun:
    def test_verify_attaches_oracle(self):
        scenario = parse_scenario(scenario_text(tasks=["single", "verify"]))
        rows = run(scenario)
        assert rows[0].oracle_value is not None
        assert rows[0].abs_err <= 1e-8

    def test_beta_sweep_is_monotone_for_positive_mode(self):
        scenario = parse_scenario(scenario_text(beta=[0.5, 1.0, 2.0]))
        values = [row.value for row in run(scenario)]
        assert values == sorted(values)
        assert values[0] > 0

    def test_npoint_odd_list_is_zero(self):
        scenario = parse_scenario(
            scenario_text(excitations=[{"mode": 0}], tasks=["npoint", "verify"])
        )
        rows = run(scenario)
        assert rows[0].value == 0.0
        assert rows[0].abs_err <= 1e-10

    def test_npoint_even_list_matches_oracle(self):
        scenario = parse_scenario(
            scenario_text(excitations=[{"mode": 0}, {"mode": 1}], tasks=["npoint", "verify"])
        )
        rows = run(scenario)
        assert rows[0].abs_err <= 1e-10

    def test_oracle_unavailable_is_reported_not_raised(self):
        scenario = parse_scenario(
            scenario_text(
                model={"type": "explicit", "h0": [[0.0]]},
                excitations=[{"vector": [1.0, 0.0], "symmetrize": True}],
                tasks=["single", "verify"],
            )
        )
        rows = run(scenario)
        assert rows[0].oracle_value is None
        assert "oracle unavailable" in rows[0].note
        assert rows[0].value == pytest.approx(0.0, abs=1e-14)

    def test_mode_cap_is_reported_not_raised(self):
        scenario = parse_scenario(scenario_text(tasks=["single", "verify"]))
        rows = run(scenario, max_modes=1)
        assert rows[0].oracle_value is None
        assert "oracle unavailable" in rows[0].note

    def test_rows_are_deterministic(self):
        scenario = parse_scenario(
            json.dumps(
                {
                    "model": {"type": "random", "n": 3, "seed": 5},
                    "beta": [0.5, 2.0],
                    "excitations": [{"mode": 0}, {"mode": 2}],
                    "tasks": ["single", "multi", "verify"],
                }
            )
        )
        first = render_csv(run(scenario))
        second = render_csv(run(scenario))
        assert first == second

    def test_seed_override_changes_random_model(self):
        scenario = parse_scenario(
            json.dumps(
                {
                    "model": {"type": "random", "n": 2, "seed": 5},
                    "beta": 1.0,
                    "excitations": [{"mode": 0}],
                    "tasks": ["single"],
                }
            )
        )
        default = run(scenario)[0].value
        overridden = run(scenario, seed=6)[0].value
        assert default != overridden

    def test_between_uses_reference_excitations(self):
        scenario = parse_scenario(
            scenario_text(
                excitations=[{"mode": 0}],
                reference_excitations=[{"mode": 1}],
                tasks=["between", "verify"],
            )
        )
        rows = run(scenario)
        assert rows[0].task == "between"
        assert rows[0].abs_err <= 1e-8


class TestMainEntryPoint:
    def test_verify_exit_ok(self, tmp_path, capsys):
        path = tmp_path / "scenario.json"
        path.write_text(scenario_text(tasks=["single"]))
        assert main(["verify", str(path)]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("task,labels,beta,value,oracle_value,abs_err,ms,note")

    def test_run_writes_file(self, tmp_path):
        path = tmp_path / "scenario.json"
        out = tmp_path / "rows.csv"
        path.write_text(scenario_text())
        assert main(["run", str(path), "--out", str(out)]) == EXIT_OK
        assert out.read_text().count("\n") == 2

    def test_json_format(self, tmp_path, capsys):
        path = tmp_path / "scenario.json"
        path.write_text(scenario_text())
        assert main(["run", str(path), "--format", "json"]) == EXIT_OK
        rows = json.loads(capsys.readouterr().out)
        assert rows[0]["task"] == "single"
        assert rows[0]["oracle_value"] is None

    def test_invalid_scenario_exit_code(self, tmp_path, capsys):
        path = tmp_path / "scenario.json"
        path.write_text(scenario_text(beta=-1.0))
        assert main(["verify", str(path)]) == EXIT_INVALID
        assert "beta" in capsys.readouterr().err

    def test_missing_file_exit_code(self, capsys):
        assert main(["run", "/nonexistent/scenario.json"]) == EXIT_INVALID
        assert "error" in capsys.readouterr().err

    def test_tolerance_breach_exit_code(self, tmp_path, capsys):
        path = tmp_path / "scenario.json"
        path.write_text(scenario_text(tasks=["single", "verify"]))
        assert main(["verify", str(path), "--tolerance=-1"]) == EXIT_TOLERANCE
        assert "tolerance breach" in capsys.readouterr().err

    def test_sweep_overrides_beta(self, tmp_path, capsys):
        path = tmp_path / "scenario.json"
        path.write_text(scenario_text())
        code = main(
            ["sweep", str(path), "--beta-min", "0.5", "--beta-max", "2.0", "--steps", "3"]
        )
        assert code == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 4  # header + three sweep points
        betas = [float(line.split(",")[2]) for line in lines[1:]]
        np.testing.assert_allclose(betas, [0.5, 1.0, 2.0])

    def test_chain_single_mode_value(self, tmp_path, capsys):
        # chain with one site reduces to a single fermion at energy -mu
        path = tmp_path / "scenario.json"
        path.write_text(
            json.dumps(
                {
                    "model": {"type": "chain", "n": 1, "t": 1.0, "mu": -1.0},
                    "beta": 1.0,
                    "excitations": [{"mode": 0}],
                    "tasks": ["single"],
                }
            )
        )
        assert main(["run", str(path)]) == EXIT_OK
        value = float(capsys.readouterr().out.strip().splitlines()[1].split(",")[3])
        assert value == pytest.approx(math.tanh(0.5), abs=1e-12)
