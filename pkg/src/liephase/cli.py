"""Batch front-end: scenario files in, reports and trajectory CSVs out.

A scenario file is a JSON document (conventionally ``*.scn``) with an
explicit ``schema_version``, one task name, an algebra block, the particle
list, an optional potential, the initial state and the time grid.  The
``run`` entry point validates everything before computing, writes a
deterministic ``report.json`` (plus CSVs for trajectory tasks) into the
output directory, and exits 0 only when every check passed (2 on validation
errors, 3 on numerical failure, 1 on failed checks).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .algebra import (
    AlgebraSpec,
    Canonical,
    Generalized,
    MiaoTypeI,
    MiaoTypeII,
    PhaseState,
    SpaceSpace,
    SpaceTime,
    as_generalized,
    jacobi_residual,
    structure_matrix,
)
from .composition import (
    ParticleSystem,
    com_bracket_report,
    com_relative_coupling,
    com_transform,
    effective_parameters,
    reproduction_check,
    satisfies_mass_scaling,
)
from .dynamics import (
    GravityScenario,
    Newtonian,
    Polynomial,
    Potential,
    Uniform,
    closed_form_rhs,
    decoupling_check,
    eom_rhs,
    hamiltonian,
    integrate,
    wep_deviation,
)
from .errors import NonFiniteStateError, PotentialSingularityError, ScalingRequiredError

SCHEMA_VERSION = 1

TASKS = ("check-algebra", "com-brackets", "simulate", "wep-test")


class ScenarioError(ValueError):
    """Scenario validation failure; the message names the offending field."""


# --- serialization -------------------------------------------------------------


def _expect(mapping: dict, key: str, path: str, kind=None):
    if key not in mapping:
        raise ScenarioError(f"{path}.{key}: missing required field")
    value = mapping[key]
    if kind is not None and not isinstance(value, kind):
        raise ScenarioError(f"{path}.{key}: expected {kind}, got {type(value).__name__}")
    return value


def _number(mapping: dict, key: str, path: str) -> float:
    value = _expect(mapping, key, path)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{path}.{key}: expected a number")
    return float(value)


def _axis(mapping: dict, key: str, path: str) -> int:
    value = _expect(mapping, key, path)
    if not isinstance(value, int) or value not in (1, 2, 3):
        raise ScenarioError(f"{path}.{key}: expected an axis index 1, 2 or 3")
    return value


_SCALAR_PARAMS = {
    "canonical": (),
    "space_time": ("kappa",),
    "space_space": ("kappa_tilde",),
    "miao_type_i": ("kappa", "kappa_tilde"),
    "miao_type_ii": ("kappa", "kappa_tilde", "kappa_bar"),
}
_TENSOR_PARAMS = ("theta0", "theta", "theta_bar", "theta_tilde")


def algebra_from_dict(data: dict, path: str = "algebra") -> AlgebraSpec:
    variant = _expect(data, "variant", path, str)
    try:
        if variant == "canonical":
            return Canonical()
        if variant == "space_time":
            return SpaceTime(
                kappa=_number(data, "kappa", path),
                rho=_axis(data, "rho", path),
                tau=_axis(data, "tau", path),
            )
        if variant == "space_space":
            return SpaceSpace(
                kappa_tilde=_number(data, "kappa_tilde", path),
                k=_axis(data, "k", path),
                l=_axis(data, "l", path),
                gamma=_axis(data, "gamma", path),
            )
        if variant == "miao_type_i":
            return MiaoTypeI(
                kappa=_number(data, "kappa", path),
                kappa_tilde=_number(data, "kappa_tilde", path),
                k=_axis(data, "k", path),
                l=_axis(data, "l", path),
                gamma=_axis(data, "gamma", path),
            )
        if variant == "miao_type_ii":
            return MiaoTypeII(
                kappa=_number(data, "kappa", path),
                kappa_tilde=_number(data, "kappa_tilde", path),
                kappa_bar=_number(data, "kappa_bar", path),
                k=_axis(data, "k", path),
                l=_axis(data, "l", path),
                gamma=_axis(data, "gamma", path),
            )
        if variant == "generalized":
            tensors = {}
            for name in _TENSOR_PARAMS:
                if name in data:
                    tensors[name] = np.array(data[name], dtype=float)
            return Generalized(**tensors)
    except ScenarioError:
        raise
    except (ValueError, TypeError) as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    raise ScenarioError(f"{path}.variant: unknown variant {variant!r}")


def algebra_to_dict(spec: AlgebraSpec) -> dict:
    if isinstance(spec, Canonical):
        return {"variant": "canonical"}
    if isinstance(spec, SpaceTime):
        return {"variant": "space_time", "kappa": spec.kappa, "rho": spec.rho, "tau": spec.tau}
    if isinstance(spec, SpaceSpace):
        return {
            "variant": "space_space",
            "kappa_tilde": spec.kappa_tilde,
            "k": spec.k, "l": spec.l, "gamma": spec.gamma,
        }
    if isinstance(spec, MiaoTypeI):
        return {
            "variant": "miao_type_i",
            "kappa": spec.kappa, "kappa_tilde": spec.kappa_tilde,
            "k": spec.k, "l": spec.l, "gamma": spec.gamma,
        }
    if isinstance(spec, MiaoTypeII):
        return {
            "variant": "miao_type_ii",
            "kappa": spec.kappa, "kappa_tilde": spec.kappa_tilde, "kappa_bar": spec.kappa_bar,
            "k": spec.k, "l": spec.l, "gamma": spec.gamma,
        }
    if isinstance(spec, Generalized):
        return {
            "variant": "generalized",
            "theta0": spec.theta0.tolist(),
            "theta": spec.theta.tolist(),
            "theta_bar": spec.theta_bar.tolist(),
            "theta_tilde": spec.theta_tilde.tolist(),
        }
    raise TypeError(f"unknown algebra variant: {type(spec).__name__}")


def potential_from_dict(data: dict, path: str = "potential") -> Potential:
    variant = _expect(data, "variant", path, str)
    try:
        if variant == "uniform":
            return Uniform(g=np.array(_expect(data, "g", path, list), dtype=float))
        if variant == "newtonian":
            center = data.get("center", [0.0, 0.0, 0.0])
            return Newtonian(
                strength=_number(data, "strength", path),
                center=np.array(center, dtype=float),
            )
        if variant == "polynomial":
            raw = _expect(data, "coefficients", path, dict)
            coeffs = {}
            for key, value in raw.items():
                try:
                    exps = tuple(int(part) for part in key.split(","))
                except ValueError as exc:
                    raise ScenarioError(
                        f"{path}.coefficients: bad exponent key {key!r} (use 'e1,e2,e3')"
                    ) from exc
                coeffs[exps] = value
            return Polynomial(coefficients=coeffs)
    except ScenarioError:
        raise
    except (ValueError, TypeError) as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    raise ScenarioError(f"{path}.variant: unknown variant {variant!r}")


def potential_to_dict(potential: Potential) -> dict:
    if isinstance(potential, Uniform):
        return {"variant": "uniform", "g": potential.g.tolist()}
    if isinstance(potential, Newtonian):
        return {
            "variant": "newtonian",
            "strength": potential.strength,
            "center": potential.center.tolist(),
        }
    if isinstance(potential, Polynomial):
        return {
            "variant": "polynomial",
            "coefficients": {
                ",".join(str(e) for e in exps): c
                for exps, c in sorted(potential.coefficients.items())
            },
        }
    raise TypeError(f"unknown potential variant: {type(potential).__name__}")


_OPTION_KEYS = {
    "check-algebra": {"samples"},
    "com-brackets": {"expect_closes", "expect_kappa_eff", "expect_decoupling_max"},
    "simulate": {
        "reduced_momentum",
        "energy_drift_tol",
        "order_check",
        "order_bounds",
        "compare_partition",
        "partition_tol",
    },
    "wep-test": {
        "masses",
        "scaling_mode",
        "max_deviation",
        "expect_position_deviation",
        "expect_deviation_tol",
    },
}


@dataclass
class Scenario:
    """A validated scenario file."""

    task: str
    system: ParticleSystem
    potential: Optional[Potential]
    initial: PhaseState
    t0: float
    t_end: float
    dt: float
    body_mode: bool
    neglect_relative_motion: bool
    options: dict

    def to_dict(self) -> dict:
        base = algebra_to_dict(self.system.particles[0].spec)
        particles = []
        for p in self.system.particles:
            entry: dict[str, Any] = {"mass": p.mass}
            d = algebra_to_dict(p.spec)
            for key, value in d.items():
                if key != "variant" and value != base.get(key):
                    entry[key] = value
            particles.append(entry)
        out = {
            "schema_version": SCHEMA_VERSION,
            "task": self.task,
            "algebra": base,
            "particles": particles,
            "initial": {"x": self.initial.x.tolist(), "p": self.initial.p.tolist()},
            "grid": {"t0": self.t0, "t_end": self.t_end, "dt": self.dt},
            "body_mode": self.body_mode,
            "neglect_relative_motion": self.neglect_relative_motion,
            "options": self.options,
        }
        if self.potential is not None:
            out["potential"] = potential_to_dict(self.potential)
        return out

    def gravity_scenario(self) -> GravityScenario:
        if self.potential is None:
            raise ScenarioError("potential: required for this task")
        return GravityScenario(
            system=self.system,
            potential=self.potential,
            initial=self.initial,
            t0=self.t0,
            t_end=self.t_end,
            dt=self.dt,
            body_mode=self.body_mode,
            neglect_relative_motion=self.neglect_relative_motion,
        )


def scenario_from_dict(data: dict) -> Scenario:
    version = _expect(data, "schema_version", "", int)
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"schema_version: expected {SCHEMA_VERSION}, got {version}")
    task = _expect(data, "task", "", str)
    if task not in TASKS:
        raise ScenarioError(f"task: unknown task {task!r} (expected one of {', '.join(TASKS)})")

    algebra_dict = _expect(data, "algebra", "", dict)
    base_spec = algebra_from_dict(algebra_dict, "algebra")

    raw_particles = _expect(data, "particles", "", list)
    if not raw_particles:
        raise ScenarioError("particles: need at least one particle")
    masses, specs = [], []
    allowed = set(_SCALAR_PARAMS[algebra_dict["variant"]]) | (
        set(_TENSOR_PARAMS) if algebra_dict["variant"] == "generalized" else set()
    )
    for idx, entry in enumerate(raw_particles):
        path = f"particles[{idx}]"
        if not isinstance(entry, dict):
            raise ScenarioError(f"{path}: expected an object")
        masses.append(_number(entry, "mass", path))
        overrides = {k: v for k, v in entry.items() if k != "mass"}
        for key in overrides:
            if key not in allowed:
                raise ScenarioError(f"{path}.{key}: not a parameter of this algebra variant")
        if overrides:
            merged = dict(algebra_dict)
            merged.update(overrides)
            specs.append(algebra_from_dict(merged, path))
        else:
            specs.append(base_spec)
    try:
        system = ParticleSystem.from_pairs(masses, specs)
    except ValueError as exc:
        raise ScenarioError(f"particles: {exc}") from exc

    potential = None
    if data.get("potential") is not None:
        potential = potential_from_dict(_expect(data, "potential", "", dict), "potential")

    grid = _expect(data, "grid", "", dict)
    t0 = _number(grid, "t0", "grid")
    t_end = _number(grid, "t_end", "grid")
    dt = _number(grid, "dt", "grid")
    if dt <= 0:
        raise ScenarioError("grid.dt: must be positive")
    if t_end <= t0:
        raise ScenarioError("grid.t_end: must exceed grid.t0")

    initial_dict = _expect(data, "initial", "", dict)
    x = np.array(_expect(initial_dict, "x", "initial", list), dtype=float)
    if "p" in initial_dict and "p_reduced" in initial_dict:
        raise ScenarioError("initial: give either p or p_reduced, not both")
    if "p" in initial_dict:
        p = np.array(initial_dict["p"], dtype=float)
    elif "p_reduced" in initial_dict:
        p = np.array(initial_dict["p_reduced"], dtype=float) * np.array(masses)[:, None]
    else:
        raise ScenarioError("initial.p: missing required field (or initial.p_reduced)")
    try:
        initial = PhaseState(x=x, p=p, t=t0)
    except ValueError as exc:
        raise ScenarioError(f"initial: {exc}") from exc
    if initial.n_particles != system.n_particles:
        raise ScenarioError("initial.x: particle count does not match particles")

    options = data.get("options", {})
    if not isinstance(options, dict):
        raise ScenarioError("options: expected an object")
    unknown = set(options) - _OPTION_KEYS[task]
    if unknown:
        raise ScenarioError(f"options.{sorted(unknown)[0]}: unknown option for task {task}")

    body_mode = bool(data.get("body_mode", False))
    neglect = bool(data.get("neglect_relative_motion", False))

    return Scenario(
        task=task,
        system=system,
        potential=potential,
        initial=initial,
        t0=t0,
        t_end=t_end,
        dt=dt,
        body_mode=body_mode,
        neglect_relative_motion=neglect,
        options=options,
    )


def load_scenario(path_or_name: str) -> Scenario:
    """Load a scenario from a file path or a bundled scenario name."""
    path = Path(path_or_name)
    if path.exists():
        try:
            text = path.read_text()
        except OSError as exc:
            raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    else:
        name = path_or_name.removesuffix(".scn")
        if name in BUILTIN_SCENARIOS:
            text = (
                resources.files("liephase").joinpath("scenarios", f"{name}.scn").read_text()
            )
        else:
            raise ScenarioError(f"no such scenario file or builtin: {path_or_name}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioError("scenario: expected a JSON object")
    return scenario_from_dict(data)


# --- checks ---------------------------------------------------------------------


@dataclass
class Check:
    name: str
    computed: float
    reference: float
    tolerance: float
    passed: bool
    wall_time: float

    def to_dict(self) -> dict:
        # wall time is console-only: reports must be byte-identical across runs
        return {
            "name": self.name,
            "computed": self.computed,
            "reference": self.reference,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


class _CheckRunner:
    def __init__(self):
        self.checks: list[Check] = []

    def add(self, name: str, computed: float, tolerance: float, reference: float = 0.0) -> None:
        start = time.perf_counter()
        passed = abs(computed - reference) <= tolerance
        self.checks.append(
            Check(
                name=name,
                computed=float(computed),
                reference=float(reference),
                tolerance=float(tolerance),
                passed=bool(passed),
                wall_time=time.perf_counter() - start,
            )
        )

    def timed(self, name: str, fn, tolerance: float, reference: float = 0.0) -> float:
        start = time.perf_counter()
        computed = float(fn())
        elapsed = time.perf_counter() - start
        passed = abs(computed - reference) <= tolerance
        self.checks.append(
            Check(
                name=name,
                computed=computed,
                reference=float(reference),
                tolerance=float(tolerance),
                passed=bool(passed),
                wall_time=elapsed,
            )
        )
        return computed

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _scenario_rng(scenario: Scenario) -> np.random.Generator:
    digest = hashlib.sha256(
        json.dumps(scenario.to_dict(), sort_keys=True).encode()
    ).hexdigest()
    return np.random.default_rng(int(digest[:16], 16))


def _sample_states(scenario: Scenario, count: int) -> list[PhaseState]:
    """Deterministic sample states near the scenario's own state.

    Coordinates are drawn from [1, 3] so point-source potentials centred at
    the origin stay regular; momenta from [-3, 3]; times from [0, 2].
    """
    rng = _scenario_rng(scenario)
    n = scenario.system.n_particles
    states = [scenario.initial]
    for _ in range(count):
        states.append(
            PhaseState(
                x=rng.uniform(1.0, 3.0, (n, 3)),
                p=rng.uniform(-3.0, 3.0, (n, 3)),
                t=float(rng.uniform(0.0, 2.0)),
            )
        )
    return states


# --- task implementations ---------------------------------------------------------


def _run_check_algebra(scenario: Scenario, runner: _CheckRunner, tol_flag: Optional[float]) -> dict:
    samples = int(scenario.options.get("samples", 20))
    states = _sample_states(scenario, samples)
    specs = scenario.system.specs
    gen_specs = [as_generalized(s) for s in specs]

    def antisymmetry():
        return max(
            float(np.max(np.abs(structure_matrix(specs, st).matrix
                                + structure_matrix(specs, st).matrix.T)))
            for st in states
        )

    def jacobi():
        return max(jacobi_residual(specs, st) for st in states)

    def roundtrip():
        return max(
            float(np.max(np.abs(structure_matrix(specs, st).matrix
                                - structure_matrix(gen_specs, st).matrix)))
            for st in states
        )

    runner.timed("antisymmetry", antisymmetry, tolerance=0.0)
    runner.timed("jacobi-residual", jacobi, tolerance=tol_flag or 1e-10)
    runner.timed("generalized-encoding-roundtrip", roundtrip, tolerance=1e-15)

    results: dict[str, Any] = {"sampled_states": len(states)}
    if scenario.potential is not None:
        def eom_agreement():
            worst = 0.0
            g = scenario.gravity_scenario()
            for st in states:
                xdot, pdot = eom_rhs(g, st)
                for a, particle in enumerate(scenario.system.particles):
                    cx, cp = closed_form_rhs(
                        particle.spec, particle.mass, scenario.potential,
                        st.x[a], st.p[a], st.t,
                    )
                    worst = max(worst, float(np.max(np.abs(xdot[a] - cx))),
                                float(np.max(np.abs(pdot[a] - cp))))
            return worst

        runner.timed("eom-closed-form", eom_agreement, tolerance=tol_flag or 1e-12)
    return results


def _rule_to_dict(rule) -> Optional[dict]:
    if rule is None:
        return None
    out = {}
    for name in ("gamma_kappa", "gamma_kappa_tilde", "kappa_bar"):
        value = getattr(rule, name)
        if value is not None:
            out[name] = value
    for name in ("gamma0", "gamma", "gamma_tilde", "theta_bar"):
        value = getattr(rule, name)
        if value is not None:
            out[name] = np.asarray(value).tolist()
    return out


def _run_com_brackets(scenario: Scenario, runner: _CheckRunner, tol_flag: Optional[float]) -> dict:
    system = scenario.system
    state = scenario.initial
    report = com_bracket_report(system, state)
    runner.add("com-bracket-oracle", report.max_abs_diff, tolerance=tol_flag or 1e-12)

    com = com_transform(system, state)
    identity = max(
        float(np.max(np.abs(com.dp.sum(axis=0)))),
        float(np.max(np.abs(system.mu @ com.dx))),
    )
    runner.add("com-transform-identities", identity, tolerance=1e-13)

    scaling = satisfies_mass_scaling(system)
    repro = reproduction_check(system, state)
    coupling = com_relative_coupling(system, state)

    results: dict[str, Any] = {
        "brackets": report.to_dict(),
        "scaling_holds": scaling.holds,
        "scaling_worst_relative_deviation": scaling.worst_relative_deviation,
        "scaling_rule": _rule_to_dict(scaling.rule),
        "closes": repro.closes,
        "closure_max_abs_diff": repro.max_abs_diff,
        "com_relative_coupling": coupling,
    }
    try:
        results["effective_algebra"] = algebra_to_dict(effective_parameters(system))
        # without the scaling rule the effective parameters are still well
        # defined for t-valued deformations, but depend on the composition
        results["effective_composition_dependent"] = not scaling.holds
    except ScalingRequiredError as exc:
        results["effective_algebra"] = None
        results["effective_algebra_error"] = str(exc)

    if "expect_closes" in scenario.options:
        expected = 1.0 if bool(scenario.options["expect_closes"]) else 0.0
        runner.add("closure-verdict", 1.0 if repro.closes else 0.0, tolerance=0.0,
                   reference=expected)
    if "expect_kappa_eff" in scenario.options:
        eff = results.get("effective_algebra") or {}
        computed = eff.get("kappa", eff.get("kappa_tilde", float("nan")))
        runner.add(
            "effective-kappa",
            computed,
            tolerance=tol_flag or 1e-12,
            reference=float(scenario.options["expect_kappa_eff"]),
        )
    if scenario.potential is not None:
        value = decoupling_check(system, state, scenario.potential)
        results["decoupling"] = value
        if "expect_decoupling_max" in scenario.options:
            runner.add(
                "decoupling",
                value,
                tolerance=float(scenario.options["expect_decoupling_max"]),
            )
    return results


def _spec_from_rule(system: ParticleSystem, mass: float) -> AlgebraSpec:
    """AlgebraSpec of a pseudo-particle of the given mass, built from the
    system's scaling rule."""
    check = satisfies_mass_scaling(system)
    if not check.holds:
        raise ScalingRequiredError(
            "partition comparison needs a mass-scaled system to define the rule"
        )
    rule = check.rule
    template = system.particles[0].spec
    if isinstance(template, SpaceTime):
        return SpaceTime(kappa=rule.gamma_kappa * mass, rho=template.rho, tau=template.tau)
    if isinstance(template, SpaceSpace):
        return SpaceSpace(
            kappa_tilde=rule.gamma_kappa_tilde * mass,
            k=template.k, l=template.l, gamma=template.gamma,
        )
    if isinstance(template, MiaoTypeI):
        return MiaoTypeI(
            kappa=rule.gamma_kappa * mass,
            kappa_tilde=rule.gamma_kappa_tilde * mass,
            k=template.k, l=template.l, gamma=template.gamma,
        )
    if isinstance(template, MiaoTypeII):
        return MiaoTypeII(
            kappa=rule.gamma_kappa * mass,
            kappa_tilde=rule.gamma_kappa_tilde * mass,
            kappa_bar=rule.kappa_bar,
            k=template.k, l=template.l, gamma=template.gamma,
        )
    if isinstance(template, Generalized):
        return Generalized(
            theta0=rule.gamma0 / mass,
            theta=rule.gamma / mass,
            theta_bar=rule.theta_bar,
            theta_tilde=rule.gamma_tilde / mass,
        )
    if isinstance(template, Canonical):
        return Canonical()
    raise TypeError(f"unknown algebra variant: {type(template).__name__}")


def _run_simulate(
    scenario: Scenario, runner: _CheckRunner, out_dir: Path, tol_flag: Optional[float]
) -> dict:
    g = scenario.gravity_scenario()
    trajectory = integrate(g)
    include_reduced = bool(scenario.options.get("reduced_momentum", False))
    csv_path = out_dir / "trajectory.csv"
    trajectory.write_csv(str(csv_path), include_reduced_momentum=include_reduced)

    results: dict[str, Any] = {
        "trajectory_csv": csv_path.name,
        "samples": len(trajectory.times),
        "scenario_fingerprint": trajectory.metadata["scenario"],
    }

    # energy drift along the trajectory (informative for time-dependent
    # structure matrices, a check when a tolerance is configured)
    if scenario.body_mode:
        eff_system = ParticleSystem.from_pairs(
            [scenario.system.total_mass], [effective_parameters(scenario.system)]
        )
    else:
        eff_system = scenario.system
    energies = [
        hamiltonian(eff_system, scenario.potential, st) for _, st in trajectory.samples
    ]
    drift = float(np.max(np.abs(np.array(energies) - energies[0])))
    results["energy_drift"] = drift
    if "energy_drift_tol" in scenario.options:
        runner.add("energy-drift", drift, tolerance=float(scenario.options["energy_drift_tol"]))
    runner.add(
        "finite-states",
        0.0 if np.all(np.isfinite(trajectory.states)) else 1.0,
        tolerance=0.0,
    )

    if scenario.options.get("order_check", False):
        def halving_ratio():
            runs = []
            for factor in (1, 2, 4):
                gi = GravityScenario(
                    system=g.system, potential=g.potential, initial=g.initial,
                    t0=g.t0, t_end=g.t_end, dt=g.dt / factor,
                    body_mode=g.body_mode,
                    neglect_relative_motion=g.neglect_relative_motion,
                )
                runs.append(integrate(gi).states[-1])
            coarse = float(np.linalg.norm(runs[0] - runs[1]))
            fine = float(np.linalg.norm(runs[1] - runs[2]))
            return coarse / fine

        bounds = scenario.options.get("order_bounds", [12.0, 20.0])
        lo, hi = float(bounds[0]), float(bounds[1])
        mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
        ratio = runner.timed("integrator-order-ratio", halving_ratio,
                             tolerance=half, reference=mid)
        results["dt_halving_ratio"] = ratio

    if "compare_partition" in scenario.options:
        if not scenario.body_mode:
            raise ScenarioError(
                "options.compare_partition: only meaningful with body_mode"
            )
        alt_masses = [float(m) for m in scenario.options["compare_partition"]]
        if abs(sum(alt_masses) - scenario.system.total_mass) > 1e-12:
            raise ScenarioError(
                "options.compare_partition: partition must preserve the total mass"
            )
        alt_specs = [_spec_from_rule(scenario.system, m) for m in alt_masses]
        alt_system = ParticleSystem.from_pairs(alt_masses, alt_specs)
        com = com_transform(scenario.system, scenario.initial)
        n_alt = len(alt_masses)
        alt_initial = PhaseState(
            x=np.tile(com.x_com, (n_alt, 1)),
            p=np.outer(alt_system.mu, com.p_com),
            t=scenario.t0,
        )
        alt = GravityScenario(
            system=alt_system, potential=scenario.potential, initial=alt_initial,
            t0=scenario.t0, t_end=scenario.t_end, dt=scenario.dt,
            body_mode=True, neglect_relative_motion=scenario.neglect_relative_motion,
        )
        alt_traj = integrate(alt)
        alt_csv = out_dir / "trajectory_partition.csv"
        alt_traj.write_csv(str(alt_csv))
        results["partition_csv"] = alt_csv.name
        deviation = float(np.max(np.abs(trajectory.states - alt_traj.states)))
        results["partition_deviation"] = deviation
        runner.add(
            "partition-independence",
            deviation,
            tolerance=float(scenario.options.get("partition_tol", tol_flag or 1e-10)),
        )
    return results


def _run_wep_test(scenario: Scenario, runner: _CheckRunner, tol_flag: Optional[float]) -> dict:
    options = scenario.options
    if "masses" not in options:
        raise ScenarioError("options.masses: required for wep-test")
    masses = [float(m) for m in options["masses"]]
    mode = options.get("scaling_mode", "both")
    if mode not in ("fixed", "mass_scaled", "both"):
        raise ScenarioError("options.scaling_mode: expected fixed, mass_scaled or both")
    modes = ("fixed", "mass_scaled") if mode == "both" else (mode,)

    g = scenario.gravity_scenario()
    results: dict[str, Any] = {"masses": masses, "modes": {}}
    for m in modes:
        report = wep_deviation(g, masses, m)
        results["modes"][m] = {
            "pairs": [
                {
                    "masses": list(p.masses),
                    "position": p.position,
                    "reduced_momentum": p.reduced_momentum,
                }
                for p in report.pairs
            ],
            "max_position_deviation": report.max_position_deviation,
            "max_reduced_momentum_deviation": report.max_reduced_momentum_deviation,
        }
        if m == "mass_scaled":
            tolerance = float(options.get("max_deviation", tol_flag or 1e-8))
            runner.add("wep-recovery-deviation", report.max_position_deviation,
                       tolerance=tolerance)
        if m == "fixed" and "expect_position_deviation" in options:
            expected = options["expect_position_deviation"]
            runner.add(
                "wep-violation-magnitude",
                report.max_position_deviation,
                tolerance=float(options.get("expect_deviation_tol", 1e-8)),
                reference=float(expected),
            )
    return results


# --- entry points ------------------------------------------------------------------

BUILTIN_SCENARIOS = {
    "miao1_jacobi": (
        "check-algebra: bracket antisymmetry, Jacobi residual and tensor-encoding "
        "round-trip for the first combined deformation type [criterion 1]"
    ),
    "spacetime_com_brackets": (
        "com-brackets: chain-rule COM/relative brackets against closed forms for "
        "three unequal particles with time-valued deformation [criterion 2]"
    ),
    "effective_kappa": (
        "com-brackets: effective parameter law kappa_eff = gamma * M for a "
        "mass-scaled pair [criterion 3]"
    ),
    "spacespace_closure": (
        "com-brackets: COM algebra closure under mass scaling for coordinate-"
        "valued deformation [criterion 4]"
    ),
    "spacetime_decoupling": (
        "com-brackets: COM/relative Hamiltonian bracket vanishes under mass "
        "scaling [criterion 5]"
    ),
    "spacetime_eom": (
        "check-algebra: structure-matrix equations of motion against closed "
        "forms in a point-source field [criterion 6]"
    ),
    "spacetime_wep": (
        "wep-test: mass-scaled runs of masses 1 and 10 share one trajectory "
        "[criterion 7]"
    ),
    "spacetime_wep_violation": (
        "wep-test: fixed parameters split masses 1 and 2 by the analytic 0.5 "
        "[criterion 8]"
    ),
    "body_composition": (
        "simulate: bodies (1,3) and (2,2) with one scaling constant share a COM "
        "trajectory [criterion 9]"
    ),
    "integrator_order": (
        "simulate: dt-halving error ratio of the fixed-step integrator lies in "
        "[12, 20] [criterion 10]"
    ),
}


def run(
    scenario_path: str,
    out_dir: Optional[str] = None,
    dt: Optional[float] = None,
    tol: Optional[float] = None,
) -> int:
    """Execute one scenario; returns the process exit status."""
    try:
        scenario = load_scenario(scenario_path)
        if dt is not None:
            if dt <= 0:
                raise ScenarioError("--dt: must be positive")
            scenario.dt = float(dt)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2

    out = Path(out_dir) if out_dir else Path(f"{Path(scenario_path).stem}_out")
    out.mkdir(parents=True, exist_ok=True)

    runner = _CheckRunner()
    start = time.perf_counter()
    try:
        if scenario.task == "check-algebra":
            results = _run_check_algebra(scenario, runner, tol)
        elif scenario.task == "com-brackets":
            results = _run_com_brackets(scenario, runner, tol)
        elif scenario.task == "simulate":
            results = _run_simulate(scenario, runner, out, tol)
        else:
            results = _run_wep_test(scenario, runner, tol)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    except (PotentialSingularityError, NonFiniteStateError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ScalingRequiredError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    total_time = time.perf_counter() - start

    report = {
        "schema_version": SCHEMA_VERSION,
        "task": scenario.task,
        "scenario": scenario.to_dict(),
        "checks": [c.to_dict() for c in runner.checks],
        "results": results,
        "passed": runner.all_passed,
    }
    report_path = out / "report.json"
    report_path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")

    for check in runner.checks:
        status = "PASS" if check.passed else "FAIL"
        print(
            f"{status} {check.name}: computed={check.computed:.6g} "
            f"reference={check.reference:.6g} tol={check.tolerance:.3g} "
            f"({check.wall_time:.3f}s)"
        )
    print(f"report: {report_path} ({total_time:.3f}s total)")
    return 0 if runner.all_passed else 1


def list_builtin() -> list[tuple[str, str]]:
    """Stable catalog of the bundled scenarios."""
    return list(BUILTIN_SCENARIOS.items())


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="liephase",
        description="Deformed-bracket mechanics: algebra checks, COM reports, "
        "simulations and WEP sweeps from scenario files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run a scenario file or builtin scenario")
    run_parser.add_argument("scenario", help="path to a .scn file or a builtin name")
    run_parser.add_argument("--out", default=None, help="output directory")
    run_parser.add_argument("--dt", type=float, default=None, help="override the grid step")
    run_parser.add_argument("--tol", type=float, default=None, help="override check tolerances")

    sub.add_parser("list-builtin", help="list bundled scenarios")

    args = parser.parse_args(argv)
    if args.command == "run":
        return run(args.scenario, out_dir=args.out, dt=args.dt, tol=args.tol)
    for name, description in list_builtin():
        print(f"{name:26s} {description}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
