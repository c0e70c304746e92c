"""Scenario loading, task dispatch, exit codes and report determinism."""

import json

import numpy as np
import pytest

import liephase as lp
from liephase import cli


def write_scenario(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


MINIMAL = {
    "schema_version": 1,
    "task": "check-algebra",
    "algebra": {"variant": "space_time", "kappa": 1.0, "rho": 1, "tau": 2},
    "particles": [{"mass": 1.0}],
    "initial": {"x": [[0, 0, 0]], "p": [[0, 0, 0]]},
    "grid": {"t0": 0.0, "t_end": 1.0, "dt": 0.1},
}


class TestScenarioParsing:
    def test_roundtrip_through_dict(self):
        scenario = cli.scenario_from_dict(MINIMAL)
        redone = cli.scenario_from_dict(scenario.to_dict())
        assert redone.to_dict() == scenario.to_dict()

    def test_per_particle_overrides(self):
        payload = dict(MINIMAL)
        payload["particles"] = [{"mass": 1.0}, {"mass": 2.0, "kappa": 3.0}]
        payload["initial"] = {"x": [[0, 0, 0], [1, 1, 1]], "p": [[0, 0, 0], [0, 0, 0]]}
        scenario = cli.scenario_from_dict(payload)
        assert scenario.system.particles[0].spec.kappa == 1.0
        assert scenario.system.particles[1].spec.kappa == 3.0

    def test_reduced_momentum_units(self):
        payload = dict(MINIMAL)
        payload["particles"] = [{"mass": 4.0}]
        payload["initial"] = {"x": [[0, 0, 0]], "p_reduced": [[0.5, 0, 0]]}
        scenario = cli.scenario_from_dict(payload)
        assert np.array_equal(scenario.initial.p, [[2.0, 0.0, 0.0]])

    def test_bad_schema_version(self):
        payload = dict(MINIMAL, schema_version=2)
        with pytest.raises(cli.ScenarioError, match="schema_version"):
            cli.scenario_from_dict(payload)

    def test_unknown_task(self):
        payload = dict(MINIMAL, task="plot")
        with pytest.raises(cli.ScenarioError, match="task"):
            cli.scenario_from_dict(payload)

    def test_invariant_violation_names_field(self):
        payload = dict(MINIMAL)
        payload["algebra"] = {"variant": "space_time", "kappa": 1.0, "rho": 2, "tau": 2}
        with pytest.raises(cli.ScenarioError, match="rho"):
            cli.scenario_from_dict(payload)

    def test_override_of_foreign_parameter_rejected(self):
        payload = dict(MINIMAL)
        payload["particles"] = [{"mass": 1.0, "kappa_tilde": 2.0}]
        with pytest.raises(cli.ScenarioError, match="kappa_tilde"):
            cli.scenario_from_dict(payload)

    def test_unknown_option_rejected(self):
        payload = dict(MINIMAL, options={"tolerance_typo": 1.0})
        with pytest.raises(cli.ScenarioError, match="tolerance_typo"):
            cli.scenario_from_dict(payload)

    def test_potential_roundtrip(self):
        for pot in (
            lp.Uniform(g=[0, 1, 0]),
            lp.Newtonian(strength=2.0, center=[1, 0, 0]),
            lp.Polynomial(coefficients={(2, 0, 0): 0.5}),
        ):
            redone = cli.potential_from_dict(cli.potential_to_dict(pot))
            assert cli.potential_to_dict(redone) == cli.potential_to_dict(pot)

    def test_algebra_roundtrip_all_variants(self):
        rng = np.random.default_rng(0)
        t = rng.uniform(-1, 1, (3, 3))
        specs = [
            lp.Canonical(),
            lp.SpaceTime(kappa=1.5, rho=2, tau=3),
            lp.SpaceSpace(kappa_tilde=-2.0, k=3, l=1, gamma=2),
            lp.MiaoTypeI(kappa=1.0, kappa_tilde=2.0),
            lp.MiaoTypeII(kappa=1.0, kappa_tilde=2.0, kappa_bar=3.0),
            lp.Generalized(theta0=t - t.T),
        ]
        for spec in specs:
            redone = cli.algebra_from_dict(cli.algebra_to_dict(spec))
            assert cli.algebra_to_dict(redone) == cli.algebra_to_dict(spec)


class TestRun:
    @pytest.mark.parametrize("name", [name for name, _ in cli.list_builtin()])
    def test_builtin_scenarios_pass(self, name, tmp_path):
        status = cli.run(name, out_dir=str(tmp_path / name))
        assert status == 0
        report = json.loads((tmp_path / name / "report.json").read_text())
        assert report["passed"] is True
        assert all(check["passed"] for check in report["checks"])

    def test_reports_byte_identical(self, tmp_path):
        for d in ("a", "b"):
            assert cli.run("spacetime_wep", out_dir=str(tmp_path / d)) == 0
        assert (tmp_path / "a" / "report.json").read_bytes() == (
            tmp_path / "b" / "report.json"
        ).read_bytes()

    def test_trajectory_csv_byte_identical(self, tmp_path):
        for d in ("a", "b"):
            assert cli.run("body_composition", out_dir=str(tmp_path / d)) == 0
        assert (tmp_path / "a" / "trajectory.csv").read_bytes() == (
            tmp_path / "b" / "trajectory.csv"
        ).read_bytes()

    def test_validation_error_exits_2(self, tmp_path):
        payload = dict(MINIMAL)
        payload["algebra"] = {"variant": "space_time", "kappa": 1.0, "rho": 2, "tau": 2}
        path = write_scenario(tmp_path, "bad.scn", payload)
        assert cli.run(path, out_dir=str(tmp_path / "out")) == 2

    def test_unreadable_file_exits_2(self, tmp_path):
        assert cli.run(str(tmp_path / "missing.scn"), out_dir=str(tmp_path / "out")) == 2

    def test_numerical_failure_exits_3(self, tmp_path):
        payload = {
            "schema_version": 1,
            "task": "simulate",
            "algebra": {"variant": "canonical"},
            "particles": [{"mass": 1.0}],
            "initial": {"x": [[1e-10, 0, 0]], "p": [[0, 0, 0]]},
            "grid": {"t0": 0.0, "t_end": 1.0, "dt": 0.001},
            "potential": {"variant": "newtonian", "strength": 1.0, "center": [0, 0, 0]},
        }
        path = write_scenario(tmp_path, "singular.scn", payload)
        assert cli.run(path, out_dir=str(tmp_path / "out")) == 3

    def test_failed_check_exits_1(self, tmp_path):
        payload = {
            "schema_version": 1,
            "task": "com-brackets",
            "algebra": {"variant": "space_time", "kappa": 2.0, "rho": 1, "tau": 2},
            "particles": [{"mass": 1.0}, {"mass": 3.0, "kappa": 6.0}],
            "initial": {"x": [[0, 0, 0], [1, 0, 0]], "p": [[0, 0, 0], [0, 0, 0]]},
            "grid": {"t0": 1.0, "t_end": 2.0, "dt": 0.1},
            "options": {"expect_kappa_eff": 7.5},
        }
        path = write_scenario(tmp_path, "wrong.scn", payload)
        assert cli.run(path, out_dir=str(tmp_path / "out")) == 1

    def test_dt_flag_overrides_grid(self, tmp_path):
        payload = {
            "schema_version": 1,
            "task": "simulate",
            "algebra": {"variant": "canonical"},
            "particles": [{"mass": 1.0}],
            "initial": {"x": [[0, 0, 0]], "p": [[1, 0, 0]]},
            "grid": {"t0": 0.0, "t_end": 0.1, "dt": 0.01},
            "potential": {"variant": "uniform", "g": [0, 1, 0]},
        }
        path = write_scenario(tmp_path, "sim.scn", payload)
        assert cli.run(path, out_dir=str(tmp_path / "out"), dt=0.05) == 0
        csv_lines = (tmp_path / "out" / "trajectory.csv").read_text().splitlines()
        assert len(csv_lines) == 1 + 3  # header + floor(0.1/0.05) + 1 samples

    def test_wall_time_kept_out_of_report(self, tmp_path):
        assert cli.run("miao1_jacobi", out_dir=str(tmp_path / "out")) == 0
        report = json.loads((tmp_path / "out" / "report.json").read_text())
        for check in report["checks"]:
            assert "wall_time" not in check


class TestListBuiltin:
    def test_catalog_is_deterministic(self):
        assert cli.list_builtin() == cli.list_builtin()

    def test_expected_entries_present(self):
        names = [name for name, _ in cli.list_builtin()]
        for expected in ("spacetime_wep", "spacespace_closure", "body_composition",
                         "miao1_jacobi"):
            assert expected in names

    def test_every_entry_names_its_claim(self):
        for _, description in cli.list_builtin():
            assert "criterion" in description

    def test_main_list_builtin(self, capsys):
        assert cli.main(["list-builtin"]) == 0
        out = capsys.readouterr().out
        assert "spacetime_wep" in out

    def test_main_run_builtin(self, tmp_path, capsys):
        assert cli.main(["run", "effective_kappa", "--out", str(tmp_path / "o")]) == 0
        out = capsys.readouterr().out
        assert "PASS effective-kappa" in out
