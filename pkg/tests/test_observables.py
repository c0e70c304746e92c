"""Observable gradients and arithmetic."""

import numpy as np
import pytest

import liephase as lp
from liephase import observables as obs


def grad_fd(observable, z, t, eps=1e-6):
    g = np.zeros_like(z)
    for i in range(len(z)):
        dz = np.zeros_like(z)
        dz[i] = eps
        g[i] = (observable.value(z + dz, t) - observable.value(z - dz, t)) / (2 * eps)
    return g


class TestProjections:
    def test_coordinate_projection(self):
        z = np.arange(12.0)
        f = obs.coordinate(1, 2)  # particle 1, axis 2 -> slot 6 + 1 = 7
        assert f.value(z) == 7.0
        g = f.gradient(z)
        assert g[7] == 1.0 and np.count_nonzero(g) == 1

    def test_momentum_projection(self):
        z = np.arange(12.0)
        f = obs.momentum(0, 3)  # slot 3 + 2 = 5
        assert f.value(z) == 5.0

    def test_com_coordinate_weights(self):
        mu = np.array([0.25, 0.75])
        f = obs.com_coordinate(mu, 1)
        z = np.zeros(12)
        z[0], z[6] = 4.0, 8.0
        assert f.value(z) == pytest.approx(0.25 * 4 + 0.75 * 8, abs=0)

    def test_com_momentum_sums_particles(self):
        f = obs.com_momentum(2, 2)
        z = np.zeros(12)
        z[4], z[10] = 1.5, 2.5
        assert f.value(z) == 4.0

    def test_relative_coordinate_vanishes_for_single_particle(self):
        f = obs.relative_coordinate(np.array([1.0]), 0, 1)
        z = np.arange(6.0)
        assert f.value(z) == 0.0
        assert np.all(f.gradient(z) == 0.0)

    def test_relative_momentum_weights(self):
        mu = np.array([0.25, 0.75])
        f = obs.relative_momentum(mu, 0, 1)
        z = np.zeros(12)
        z[3], z[9] = 2.0, 2.0  # P1 of both particles
        # dP^(0) = P^(0) - mu_0 (P^(0) + P^(1)) = 2 - 0.25 * 4
        assert f.value(z) == pytest.approx(1.0, abs=0)


class TestArithmetic:
    def test_sum_and_scalar_multiple(self):
        z = np.arange(6.0)
        f = 2.0 * obs.coordinate(0, 1) + obs.momentum(0, 1) - 1.0
        assert f.value(z) == pytest.approx(2.0 * 0.0 + 3.0 - 1.0, abs=0)
        assert np.allclose(f.gradient(z), [2, 0, 0, 1, 0, 0])

    def test_product_gradient_is_leibniz(self):
        rng = np.random.default_rng(0)
        z = rng.uniform(-2, 2, 6)
        f = obs.coordinate(0, 1) * obs.momentum(0, 2)
        g = (obs.coordinate(0, 2) + obs.momentum(0, 3)) * obs.coordinate(0, 1)
        for o in (f, g, f * g, 0.5 * f + g):
            assert np.allclose(o.gradient(z, 0.0), grad_fd(o, z, 0.0), atol=1e-8)

    def test_user_supplied_smooth_function(self):
        def value(z, t):
            return float(np.sin(z[0]) * z[3] + t)

        def gradient(z, t):
            g = np.zeros_like(z)
            g[0] = np.cos(z[0]) * z[3]
            g[3] = np.sin(z[0])
            return g

        f = obs.Observable(value, gradient, label="sin(X1)*P1 + t")
        state = lp.PhaseState(x=[[0.7, 0, 0]], p=[[1.2, 0, 0]], t=0.5)
        z = state.flatten()
        assert np.allclose(f.gradient(z, 0.5), grad_fd(f, z, 0.5), atol=1e-8)
        # its bracket with a projection follows the chain rule
        value = lp.bracket(f, obs.momentum(0, 1), [lp.Canonical()], state)
        assert value == pytest.approx(np.cos(0.7) * 1.2, rel=1e-12)
