"""Acceptance suite: every numbered criterion at its stated tolerance.

Each test prints one PASS line when it completes; run with ``pytest -s
tests/test_acceptance.py`` to see them, or rely on the pytest verdicts.
"""

import numpy as np
import pytest

import liephase as lp

from helpers import VARIANT_NAMES, random_spec, random_state, random_system, scaled_system

NAMED_VARIANTS = ("canonical", "space_time", "space_space", "miao_type_i", "miao_type_ii")


def report(criterion: int, text: str) -> None:
    print(f"[criterion {criterion:2d}] PASS  {text}")


def test_c01_jacobi_suite():
    rng = np.random.default_rng(101)
    for variant in NAMED_VARIANTS:
        worst = 0.0
        for _ in range(100):
            spec = random_spec(rng, variant)
            state = random_state(rng, 1, box=10.0)
            worst = max(worst, lp.jacobi_residual([spec], state))
        assert worst <= 1e-10, (variant, worst)
    # an unconstrained tensor choice must visibly fail: the check has teeth
    theta = np.zeros((3, 3, 3))
    theta[0, 1, 2], theta[0, 2, 1] = 1.0, -1.0
    theta_bar = np.zeros((3, 3, 3))
    theta_bar[1, 0, 2], theta_bar[1, 2, 0] = 1.0, -1.0
    loose = lp.Generalized(theta=theta, theta_bar=theta_bar)
    state = lp.PhaseState(x=[[1, 1, 1]], p=[[1, 1, 1]], t=1.0)
    residual = lp.jacobi_residual([loose], state)
    assert residual > 1e-2, residual
    report(1, "Jacobi residual <= 1e-10 on all named variants; "
              f"unconstrained tensors score {residual:.3f}")


def test_c02_com_bracket_oracle():
    rng = np.random.default_rng(102)
    checked = 0
    worst = 0.0
    while checked < 200:
        variant = VARIANT_NAMES[checked % len(VARIANT_NAMES)]
        n = int(rng.integers(1, 6))
        system = random_system(rng, variant, n)
        state = random_state(rng, n, box=10.0)
        result = lp.com_bracket_report(system, state)
        worst = max(worst, result.max_abs_diff)
        assert result.max_abs_diff <= 1e-12, (variant, result.max_abs_diff)
        checked += 1
    report(2, f"chain-rule COM brackets match closed forms on 200 systems "
              f"(worst diff {worst:.2e})")


def test_c03_effective_parameter_laws():
    rng = np.random.default_rng(103)
    # harmonic-sum law on random unscaled systems
    for _ in range(50):
        n = int(rng.integers(1, 6))
        system = random_system(rng, "space_time", n)
        kappas = np.array([p.spec.kappa for p in system.particles])
        expected = 1.0 / np.sum(system.mu**2 / kappas)
        assert lp.effective_parameters(system).kappa == pytest.approx(expected, rel=1e-14)
    # N identical particles reduce by the particle count
    for n in (2, 3, 7):
        system = lp.ParticleSystem.from_pairs(
            [1.0] * n, [lp.SpaceTime(kappa=2.0) for _ in range(n)]
        )
        assert lp.effective_parameters(system).kappa == pytest.approx(n * 2.0, rel=1e-14)
    # scaled case: kappa_eff = gamma * M
    for _ in range(20):
        system = scaled_system(rng, "space_time", int(rng.integers(2, 6)))
        gamma = system.particles[0].spec.kappa / system.particles[0].mass
        assert lp.effective_parameters(system).kappa == pytest.approx(
            gamma * system.total_mass, rel=1e-14
        )
    # generalized scaled tensors equal the shared constants over M
    for _ in range(20):
        system = scaled_system(rng, "generalized", int(rng.integers(2, 6)))
        eff = lp.effective_parameters(system)
        m0 = system.particles[0].mass
        spec0 = system.particles[0].spec
        total = system.total_mass
        for got, gamma in (
            (eff.theta0, spec0.theta0 * m0),
            (eff.theta, spec0.theta * m0),
            (eff.theta_tilde, spec0.theta_tilde * m0),
        ):
            assert np.max(np.abs(got - gamma / total)) <= 1e-14
        assert np.max(np.abs(eff.theta_bar - spec0.theta_bar)) <= 1e-14
    report(3, "1/kappa_eff = sum mu^2/kappa, N-particle reduction, gamma*M "
              "and gamma/M laws all reproduced")


def test_c04_closure_under_scaling():
    rng = np.random.default_rng(104)
    for variant in VARIANT_NAMES:
        for _ in range(10):
            n = int(rng.integers(2, 6))
            system = scaled_system(rng, variant, n)
            state = random_state(rng, n, box=10.0)
            result = lp.reproduction_check(system, state)
            assert result.closes and result.max_abs_diff <= 1e-12, (
                variant, result.max_abs_diff,
            )
    # generic unscaled coordinate-valued systems must not close
    failures = 0
    for _ in range(10):
        masses = rng.uniform(0.5, 4.0, 2)
        masses[1] += 1.0  # keep the masses distinct
        system = lp.ParticleSystem.from_pairs(
            masses.tolist(),
            [lp.SpaceSpace(kappa_tilde=1.0), lp.SpaceSpace(kappa_tilde=1.0)],
        )
        state = random_state(rng, 2, box=10.0)
        if not lp.reproduction_check(system, state).closes:
            failures += 1
    assert failures == 10
    report(4, "mass-scaled systems close (<= 1e-12) for every variant; "
              "unscaled coordinate-valued systems do not")


def test_c05_decoupling():
    rng = np.random.default_rng(105)
    field = lp.Uniform(g=[0.0, 1.0, 0.0])
    for _ in range(20):
        system = scaled_system(rng, "space_time", int(rng.integers(2, 6)))
        state = random_state(rng, system.n_particles, box=5.0)
        assert lp.decoupling_check(system, state, field) <= 1e-12
    # documented unscaled counterexample: kappa = (1, 1), masses (1, 2)
    system = lp.ParticleSystem.from_pairs(
        [1.0, 2.0], [lp.SpaceTime(kappa=1.0), lp.SpaceTime(kappa=1.0)]
    )
    state = lp.PhaseState(x=[[0.5, 1.0, -0.5], [2.0, -1.0, 1.5]],
                          p=[[1.0, -0.5, 0.25], [-1.5, 2.0, 0.5]], t=0.7)
    value = lp.decoupling_check(system, state, field)
    assert value > 1e-6, value
    report(5, f"scaled SpaceTime decouples (<= 1e-12); unscaled counterexample "
              f"couples at {value:.3f}")


def test_c06_eom_oracle():
    rng = np.random.default_rng(106)
    pot = lp.Newtonian(strength=2.0, center=[0.0, 0.0, 0.0])
    for variant in VARIANT_NAMES:
        worst = 0.0
        for _ in range(500):
            spec = random_spec(rng, variant)
            mass = float(rng.uniform(0.5, 3.0))
            system = lp.ParticleSystem.from_pairs([mass], [spec])
            scen = lp.GravityScenario(
                system=system, potential=pot,
                initial=lp.PhaseState(x=[[2, 2, 2]], p=[[0, 0, 0]], t=0.0),
                t0=0.0, t_end=1.0, dt=0.1,
            )
            state = lp.PhaseState(
                x=rng.uniform(1.0, 3.0, (1, 3)),
                p=rng.uniform(-3.0, 3.0, (1, 3)),
                t=float(rng.uniform(0.0, 2.0)),
            )
            xdot, pdot = lp.eom_rhs(scen, state)
            cx, cp = lp.closed_form_rhs(spec, mass, pot, state.x[0], state.p[0], state.t)
            worst = max(worst, float(np.max(np.abs(xdot[0] - cx))),
                        float(np.max(np.abs(pdot[0] - cp))))
        assert worst <= 1e-12, (variant, worst)
    report(6, "J grad(H) equals the closed-form equations of motion at 500 "
              "random states per variant")


def _wep_template(spec, potential, x0, p0):
    system = lp.ParticleSystem.from_pairs([1.0], [spec])
    return lp.GravityScenario(
        system=system, potential=potential,
        initial=lp.PhaseState(x=[x0], p=[p0], t=0.0),
        t0=0.0, t_end=1.0, dt=1e-3,
    )


def test_c07_wep_recovery():
    rng = np.random.default_rng(107)
    masses = [1.0, 2.0, 5.0, 10.0]
    potentials = {
        "uniform": (lp.Uniform(g=[0.0, 1.0, 0.0]), [0.0, 0.0, 0.0], [0.1, 0.2, 0.0]),
        "newtonian": (lp.Newtonian(strength=1.0), [2.0, 0.0, 0.0], [0.0, 0.5, 0.1]),
    }
    worst = 0.0
    for variant in NAMED_VARIANTS:
        spec = random_spec(rng, variant)
        for pot, x0, p0 in potentials.values():
            template = _wep_template(spec, pot, x0, p0)
            result = lp.wep_deviation(template, masses, "mass_scaled")
            worst = max(worst, result.max_position_deviation)
            assert result.max_position_deviation <= 1e-8, (variant, type(pot).__name__)
    report(7, f"mass-scaled runs agree across masses (1,2,5,10); worst "
              f"position deviation {worst:.2e}")


def test_c08_wep_violation_magnitude():
    template = _wep_template(
        lp.SpaceTime(kappa=1.0, rho=1, tau=2),
        lp.Uniform(g=[0.0, 1.0, 0.0]),
        [0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0],
    )
    result = lp.wep_deviation(template, [1.0, 2.0], "fixed")
    # analytic split: X1 deviation at t = 1 is (m' - m) g t^2 / (2 kappa) = 0.5
    assert result.max_position_deviation == pytest.approx(0.5, abs=1e-8)
    report(8, f"fixed-parameter split is {result.max_position_deviation:.12f} "
              "(analytic 0.5)")


def test_c09_composition_independence():
    x0, p0 = np.array([0.75, 0.375, 0.0]), np.array([0.2, -0.1, 0.0])
    field = lp.Uniform(g=[0.0, 1.0, 0.0])

    def body(masses, kappas, neglect=False):
        specs = [lp.SpaceTime(kappa=k, rho=1, tau=2) for k in kappas]
        system = lp.ParticleSystem.from_pairs(masses, specs)
        initial = lp.PhaseState(x=np.tile(x0, (len(masses), 1)),
                                p=np.outer(system.mu, p0), t=0.0)
        return lp.GravityScenario(system=system, potential=field, initial=initial,
                                  t0=0.0, t_end=1.0, dt=1e-3,
                                  body_mode=True, neglect_relative_motion=neglect)

    scaled_13 = lp.integrate(body([1.0, 3.0], [2.0, 6.0]))
    scaled_22 = lp.integrate(body([2.0, 2.0], [4.0, 4.0]))
    scaled_dev = float(np.max(np.abs(scaled_13.states - scaled_22.states)))
    assert scaled_dev <= 1e-10

    unscaled_13 = lp.integrate(body([1.0, 3.0], [1.0, 1.0], neglect=True))
    unscaled_22 = lp.integrate(body([2.0, 2.0], [1.0, 1.0], neglect=True))
    unscaled_dev = float(np.max(np.abs(unscaled_13.states - unscaled_22.states)))
    assert unscaled_dev > 1e-3
    report(9, f"equal-gamma partitions agree to {scaled_dev:.2e}; unscaled "
              f"partitions differ by {unscaled_dev:.3f}")


def test_c10_integrator_order():
    pot = lp.Polynomial(coefficients={(2, 0, 0): 0.5, (0, 2, 0): 0.5, (0, 0, 2): 0.5})
    system = lp.ParticleSystem.from_pairs([1.0], [lp.Canonical()])
    exact = np.concatenate([
        [np.cos(1.0), np.sin(1.0), 0.0],
        [-np.sin(1.0), np.cos(1.0), 0.0],
    ])
    errors = []
    for dt in (0.02, 0.01):
        scen = lp.GravityScenario(
            system=system, potential=pot,
            initial=lp.PhaseState(x=[[1, 0, 0]], p=[[0, 1, 0]], t=0.0),
            t0=0.0, t_end=1.0, dt=dt,
        )
        traj = lp.integrate(scen)
        errors.append(float(np.linalg.norm(traj.states[-1] - exact)))
    ratio = errors[0] / errors[1]
    assert 12.0 <= ratio <= 20.0, ratio
    report(10, f"dt-halving error ratio {ratio:.3f} lies in [12, 20]")
