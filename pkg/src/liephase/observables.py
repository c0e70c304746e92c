"""Phase-space observables with analytic gradients.

An observable is a smooth function f(z, t) of the flattened phase vector
z = (X1, X2, X3, P1, P2, P3) per particle, particles concatenated, together
with its gradient with respect to z.  Brackets of observables are evaluated
as grad(f) . J . grad(g), so the gradient is the only derivative ever needed.

Axis indices are 1-based (1..3, matching the algebra parameter indices);
particle indices are 0-based.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

__all__ = [
    "Observable",
    "coordinate",
    "momentum",
    "com_coordinate",
    "com_momentum",
    "relative_coordinate",
    "relative_momentum",
]


def coordinate_slot(particle: int, axis: int) -> int:
    """Flat index of X_axis of the given particle (axis 1-based)."""
    return 6 * particle + (axis - 1)


def momentum_slot(particle: int, axis: int) -> int:
    """Flat index of P_axis of the given particle (axis 1-based)."""
    return 6 * particle + 3 + (axis - 1)


class Observable:
    """A function of the phase vector with an analytic gradient.

    Supports +, -, * (with scalars and other observables); products use the
    Leibniz rule for their gradients, so polynomial observables built from
    projections carry exact gradients.
    """

    def __init__(
        self,
        value: Callable[[np.ndarray, float], float],
        gradient: Callable[[np.ndarray, float], np.ndarray],
        label: str = "",
    ):
        self._value = value
        self._gradient = gradient
        self.label = label

    def value(self, z: np.ndarray, t: float = 0.0) -> float:
        return float(self._value(z, t))

    def gradient(self, z: np.ndarray, t: float = 0.0) -> np.ndarray:
        return np.asarray(self._gradient(z, t), dtype=float)

    def __add__(self, other: "Observable | float") -> "Observable":
        other = _as_observable(other)
        return Observable(
            lambda z, t: self._value(z, t) + other._value(z, t),
            lambda z, t: self.gradient(z, t) + other.gradient(z, t),
            label=f"({self.label}+{other.label})",
        )

    __radd__ = __add__

    def __sub__(self, other: "Observable | float") -> "Observable":
        return self + (-1.0) * _as_observable(other)

    def __mul__(self, other: "Observable | float") -> "Observable":
        if isinstance(other, (int, float)):
            c = float(other)
            return Observable(
                lambda z, t: c * self._value(z, t),
                lambda z, t: c * self.gradient(z, t),
                label=f"({c}*{self.label})",
            )
        return Observable(
            lambda z, t: self._value(z, t) * other._value(z, t),
            lambda z, t: (
                self._value(z, t) * other.gradient(z, t)
                + other._value(z, t) * self.gradient(z, t)
            ),
            label=f"({self.label}*{other.label})",
        )

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Observable({self.label or 'anonymous'})"


def _as_observable(x: "Observable | float") -> Observable:
    if isinstance(x, Observable):
        return x
    c = float(x)
    return Observable(lambda z, t: c, lambda z, t: np.zeros_like(z), label=str(c))


def _linear(weights_of: Callable[[int], np.ndarray], label: str) -> Observable:
    """Observable linear in z; ``weights_of(len(z))`` builds the weight vector."""

    def value(z, t):
        return float(weights_of(len(z)) @ z)

    def gradient(z, t):
        return weights_of(len(z))

    return Observable(value, gradient, label=label)


def coordinate(particle: int, axis: int) -> Observable:
    """Projection onto X_axis of one particle."""

    def weights(n):
        w = np.zeros(n)
        w[coordinate_slot(particle, axis)] = 1.0
        return w

    return _linear(weights, f"X_{axis}[{particle}]")


def momentum(particle: int, axis: int) -> Observable:
    """Projection onto P_axis of one particle."""

    def weights(n):
        w = np.zeros(n)
        w[momentum_slot(particle, axis)] = 1.0
        return w

    return _linear(weights, f"P_{axis}[{particle}]")


def com_coordinate(mu: np.ndarray, axis: int) -> Observable:
    """Center-of-mass coordinate: sum_a mu_a X_axis^(a)."""
    mu = np.asarray(mu, dtype=float)

    def weights(n):
        w = np.zeros(n)
        for a, mu_a in enumerate(mu):
            w[coordinate_slot(a, axis)] = mu_a
        return w

    return _linear(weights, f"Xcom_{axis}")


def com_momentum(n_particles: int, axis: int) -> Observable:
    """Total momentum: sum_a P_axis^(a)."""

    def weights(n):
        w = np.zeros(n)
        for a in range(n_particles):
            w[momentum_slot(a, axis)] = 1.0
        return w

    return _linear(weights, f"Pcom_{axis}")


def relative_coordinate(mu: np.ndarray, particle: int, axis: int) -> Observable:
    """Relative coordinate X^(a) - Xcom of one particle."""
    mu = np.asarray(mu, dtype=float)

    def weights(n):
        w = np.zeros(n)
        for b, mu_b in enumerate(mu):
            w[coordinate_slot(b, axis)] = -mu_b
        w[coordinate_slot(particle, axis)] += 1.0
        return w

    return _linear(weights, f"dX_{axis}[{particle}]")


def relative_momentum(mu: np.ndarray, particle: int, axis: int) -> Observable:
    """Relative momentum P^(a) - mu_a Pcom of one particle."""
    mu = np.asarray(mu, dtype=float)
    mu_a = float(mu[particle])

    def weights(n):
        w = np.zeros(n)
        for b in range(len(mu)):
            w[momentum_slot(b, axis)] = -mu_a
        w[momentum_slot(particle, axis)] += 1.0
        return w

    return _linear(weights, f"dP_{axis}[{particle}]")
