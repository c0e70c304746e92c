"""Bracket algebras on Lie-algebraic noncommutative phase spaces.

Every algebra variant is encoded as a position/time-dependent antisymmetric
structure matrix J with entries J_ab = {z_a, z_b}, where z is the flattened
phase vector ordered (X1, X2, X3, P1, P2, P3) per particle, particles
concatenated.  General brackets follow from the chain rule,
{f, g} = grad(f) . J . grad(g).

Variants
--------
Canonical
    The undeformed symplectic structure: {X_i, P_j} = delta_ij and all
    coordinate-coordinate brackets zero.
SpaceTime
    Coordinates close on time: {X_rho, X_tau} = t / kappa for one fixed
    axis pair (rho, tau); momenta and the X-P block stay canonical.
SpaceSpace
    Coordinates close on a coordinate: {X_k, X_gamma} = X_l / kappa_tilde,
    {X_l, X_gamma} = -X_k / kappa_tilde, with the matching momentum
    entries {P_k, X_gamma} = P_l / kappa_tilde and
    {P_l, X_gamma} = -P_k / kappa_tilde; (k, l, gamma) is a fixed
    permutation of the axes.
MiaoTypeI / MiaoTypeII
    The two Jacobi-consistent combinations of the time-valued and
    coordinate-valued deformations; type II adds coordinate-valued terms
    to the X-P block through kappa_bar.
Generalized
    Free tensor parametrization {X_i, X_j} = theta0_ij t + theta^k_ij X_k,
    {X_i, P_j} = delta_ij + theta_bar^k_ij X_k + theta_tilde^k_ij P_k.
    The tensors are evaluated exactly as given.

A note on tensor encodings: the X-X deformation tensors (theta0, theta)
must be antisymmetric in the lower index pair, since {X_i, X_j} is an
antisymmetric bracket.  The X-P tensors (theta_bar, theta_tilde) carry no
such constraint here: the exact tensor encodings of the SpaceSpace and
Miao tables confine the X-P deformation to the gamma row ({X_gamma, P_k}
deformed, {X_k, P_gamma} canonical), which is what the Jacobi identity
requires of those tables.  ``as_generalized`` therefore emits one-sided
theta_bar/theta_tilde slices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .observables import Observable

__all__ = [
    "AlgebraSpec",
    "Canonical",
    "SpaceTime",
    "SpaceSpace",
    "Generalized",
    "MiaoTypeI",
    "MiaoTypeII",
    "PhaseState",
    "StructureMatrix",
    "structure_matrix",
    "as_generalized",
    "bracket",
    "jacobi_residual",
]

_AXES = (1, 2, 3)


def _check_axis(name: str, value: int) -> None:
    if value not in _AXES:
        raise ValueError(f"{name} must be one of {_AXES}, got {value!r}")


def _check_nonzero(name: str, value: float, positive: bool = False) -> None:
    if not np.isfinite(value) or value == 0.0:
        raise ValueError(f"{name} must be nonzero and finite, got {value!r}")
    if positive and value <= 0.0:
        raise ValueError(f"{name} must be positive, got {value!r}")


def _frozen_tensor(value, shape: tuple[int, ...], name: str) -> np.ndarray:
    arr = np.array(value, dtype=float)
    if arr.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.flags.writeable = False
    return arr


def _check_lower_antisymmetric(arr: np.ndarray, name: str) -> None:
    """Antisymmetry in the last two (lower) indices."""
    if not np.array_equal(arr, -np.swapaxes(arr, -1, -2)):
        raise ValueError(f"{name} must be antisymmetric in its lower index pair")


class AlgebraSpec:
    """Base class for bracket-algebra variants."""

    @property
    def variant(self) -> str:
        return type(self).__name__


@dataclass(frozen=True)
class Canonical(AlgebraSpec):
    """Undeformed symplectic structure."""


@dataclass(frozen=True)
class SpaceTime(AlgebraSpec):
    """Coordinates close on time: {X_rho, X_tau} = t / kappa."""

    kappa: float
    rho: int = 1
    tau: int = 2

    def __post_init__(self):
        _check_nonzero("kappa", self.kappa, positive=True)
        _check_axis("rho", self.rho)
        _check_axis("tau", self.tau)
        if self.rho == self.tau:
            raise ValueError("rho must differ from tau")


@dataclass(frozen=True)
class SpaceSpace(AlgebraSpec):
    """Coordinates close on a coordinate: {X_k, X_gamma} = X_l / kappa_tilde."""

    kappa_tilde: float
    k: int = 1
    l: int = 2
    gamma: int = 3

    def __post_init__(self):
        _check_nonzero("kappa_tilde", self.kappa_tilde)
        for name in ("k", "l", "gamma"):
            _check_axis(name, getattr(self, name))
        if {self.k, self.l, self.gamma} != {1, 2, 3}:
            raise ValueError("(k, l, gamma) must be a permutation of (1, 2, 3)")


@dataclass(frozen=True)
class MiaoTypeI(AlgebraSpec):
    """Combined time-valued and coordinate-valued deformation, first type.

    {X_k, X_gamma} = -t/kappa + X_l/kappa_tilde,
    {X_l, X_gamma} = +t/kappa - X_k/kappa_tilde,
    {X_k, X_l} = t/kappa, plus the SpaceSpace momentum entries.
    """

    kappa: float
    kappa_tilde: float
    k: int = 1
    l: int = 2
    gamma: int = 3

    def __post_init__(self):
        _check_nonzero("kappa", self.kappa)
        _check_nonzero("kappa_tilde", self.kappa_tilde)
        for name in ("k", "l", "gamma"):
            _check_axis(name, getattr(self, name))
        if {self.k, self.l, self.gamma} != {1, 2, 3}:
            raise ValueError("(k, l, gamma) must be a permutation of (1, 2, 3)")


@dataclass(frozen=True)
class MiaoTypeII(AlgebraSpec):
    """Second combined type: {X_k, X_l} = 0 and coordinate-valued X-P terms.

    {P_k, X_gamma} = X_l/kappa_bar + P_l/kappa_tilde,
    {P_l, X_gamma} = X_k/kappa_bar - P_k/kappa_tilde.
    """

    kappa: float
    kappa_tilde: float
    kappa_bar: float
    k: int = 1
    l: int = 2
    gamma: int = 3

    def __post_init__(self):
        _check_nonzero("kappa", self.kappa)
        _check_nonzero("kappa_tilde", self.kappa_tilde)
        _check_nonzero("kappa_bar", self.kappa_bar)
        for name in ("k", "l", "gamma"):
            _check_axis(name, getattr(self, name))
        if {self.k, self.l, self.gamma} != {1, 2, 3}:
            raise ValueError("(k, l, gamma) must be a permutation of (1, 2, 3)")


@dataclass(frozen=True)
class Generalized(AlgebraSpec):
    """Free tensor parametrization of the Lie-type deformation.

    theta0 has shape (3, 3); theta, theta_bar and theta_tilde have shape
    (3, 3, 3) indexed [upper k][i][j].  theta0 and each slice theta[k] must
    be antisymmetric in (i, j); theta_bar/theta_tilde are used exactly as
    given (see module docstring).
    """

    theta0: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    theta: np.ndarray = field(default_factory=lambda: np.zeros((3, 3, 3)))
    theta_bar: np.ndarray = field(default_factory=lambda: np.zeros((3, 3, 3)))
    theta_tilde: np.ndarray = field(default_factory=lambda: np.zeros((3, 3, 3)))

    def __post_init__(self):
        object.__setattr__(self, "theta0", _frozen_tensor(self.theta0, (3, 3), "theta0"))
        object.__setattr__(self, "theta", _frozen_tensor(self.theta, (3, 3, 3), "theta"))
        object.__setattr__(
            self, "theta_bar", _frozen_tensor(self.theta_bar, (3, 3, 3), "theta_bar")
        )
        object.__setattr__(
            self, "theta_tilde", _frozen_tensor(self.theta_tilde, (3, 3, 3), "theta_tilde")
        )
        _check_lower_antisymmetric(self.theta0, "theta0")
        _check_lower_antisymmetric(self.theta, "theta")

    def __eq__(self, other):
        if not isinstance(other, Generalized):
            return NotImplemented
        return (
            np.array_equal(self.theta0, other.theta0)
            and np.array_equal(self.theta, other.theta)
            and np.array_equal(self.theta_bar, other.theta_bar)
            and np.array_equal(self.theta_tilde, other.theta_tilde)
        )

    __hash__ = None


@dataclass(frozen=True)
class PhaseState:
    """Positions, momenta and time for N particles.

    x and p have shape (N, 3); t is the evolution parameter, treated as an
    external parameter by all brackets.
    """

    x: np.ndarray
    p: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        x = np.atleast_2d(np.array(self.x, dtype=float))
        p = np.atleast_2d(np.array(self.p, dtype=float))
        if x.shape != p.shape or x.ndim != 2 or x.shape[1] != 3:
            raise ValueError(
                f"x and p must both have shape (N, 3), got {x.shape} and {p.shape}"
            )
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(p)) and np.isfinite(self.t)):
            raise ValueError("phase-space entries must be finite")
        x.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "t", float(self.t))

    @property
    def n_particles(self) -> int:
        return self.x.shape[0]

    def flatten(self) -> np.ndarray:
        """Flat phase vector (X1, X2, X3, P1, P2, P3) per particle."""
        return np.concatenate([self.x, self.p], axis=1).ravel()

    @classmethod
    def from_flat(cls, z: np.ndarray, t: float) -> "PhaseState":
        z = np.asarray(z, dtype=float)
        if z.size % 6:
            raise ValueError(f"flat phase vector length must be a multiple of 6, got {z.size}")
        blocks = z.reshape(-1, 6)
        return cls(x=blocks[:, :3].copy(), p=blocks[:, 3:].copy(), t=t)


@dataclass(frozen=True)
class StructureMatrix:
    """Antisymmetric bracket matrix J_ab = {z_a, z_b} at one phase point."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __getitem__(self, idx):
        return self.matrix[idx]


# --- single-particle 6x6 blocks ------------------------------------------

def _canonical_block() -> np.ndarray:
    j = np.zeros((6, 6))
    for i in range(3):
        j[i, 3 + i] = 1.0
        j[3 + i, i] = -1.0
    return j


def _set_antisym(j: np.ndarray, a: int, b: int, value: float) -> None:
    j[a, b] = value
    j[b, a] = -value


def _add_antisym(j: np.ndarray, a: int, b: int, value: float) -> None:
    j[a, b] += value
    j[b, a] -= value


def _block(spec: AlgebraSpec, x: np.ndarray, p: np.ndarray, t: float) -> np.ndarray:
    """6x6 bracket block of one particle; x, p are its 3-vectors.

    Deformation parameters enter through their reciprocals, formed here and
    never stored, so the entries match the tensor encodings of
    ``as_generalized`` bit for bit.
    """
    j = _canonical_block()
    if isinstance(spec, Canonical):
        return j
    if isinstance(spec, SpaceTime):
        _set_antisym(j, spec.rho - 1, spec.tau - 1, (1.0 / spec.kappa) * t)
        return j
    if isinstance(spec, (SpaceSpace, MiaoTypeI, MiaoTypeII)):
        k, l, g = spec.k - 1, spec.l - 1, spec.gamma - 1
        inv_kt = 1.0 / spec.kappa_tilde
        _add_antisym(j, k, g, inv_kt * x[l])
        _add_antisym(j, l, g, -inv_kt * x[k])
        # {X_gamma, P_k} = -P_l/kt, {X_gamma, P_l} = +P_k/kt; the mirrored
        # {X_k, P_gamma}, {X_l, P_gamma} stay canonical (zero).
        _add_antisym(j, g, 3 + k, -inv_kt * p[l])
        _add_antisym(j, g, 3 + l, inv_kt * p[k])
        if isinstance(spec, (MiaoTypeI, MiaoTypeII)):
            inv_k = 1.0 / spec.kappa
            _add_antisym(j, k, g, -inv_k * t)
            _add_antisym(j, l, g, inv_k * t)
        if isinstance(spec, MiaoTypeI):
            _add_antisym(j, k, l, (1.0 / spec.kappa) * t)
        if isinstance(spec, MiaoTypeII):
            inv_kb = 1.0 / spec.kappa_bar
            _add_antisym(j, g, 3 + k, -inv_kb * x[l])
            _add_antisym(j, g, 3 + l, -inv_kb * x[k])
        return j
    if isinstance(spec, Generalized):
        # X-X corner: antisymmetric by tensor invariants; fill upper triangle.
        for i in range(3):
            for jj in range(i + 1, 3):
                val = spec.theta0[i, jj] * t + float(spec.theta[:, i, jj] @ x)
                _set_antisym(j, i, jj, val)
        # X-P corner, evaluated exactly as given (no symmetrization).
        for i in range(3):
            for jj in range(3):
                val = (
                    (1.0 if i == jj else 0.0)
                    + float(spec.theta_bar[:, i, jj] @ x)
                    + float(spec.theta_tilde[:, i, jj] @ p)
                )
                j[i, 3 + jj] = val
                j[3 + jj, i] = -val
        return j
    raise TypeError(f"unknown algebra variant: {type(spec).__name__}")


def structure_matrix(specs: Sequence[AlgebraSpec], state: PhaseState) -> StructureMatrix:
    """Assemble the full 6N x 6N structure matrix for N particles.

    One spec per particle.  Brackets between different particles vanish, so
    the matrix is block-diagonal with one 6x6 block per particle.
    """
    specs = list(specs)
    if len(specs) != state.n_particles:
        raise ValueError(
            f"got {len(specs)} algebra specs for {state.n_particles} particles"
        )
    n = 6 * len(specs)
    j = np.zeros((n, n))
    for a, spec in enumerate(specs):
        sl = slice(6 * a, 6 * a + 6)
        j[sl, sl] = _block(spec, state.x[a], state.p[a], state.t)
    return StructureMatrix(j)


def _structure_matrix_flat(specs: Sequence[AlgebraSpec], z: np.ndarray, t: float) -> np.ndarray:
    blocks = z.reshape(-1, 6)
    n = z.size
    j = np.zeros((n, n))
    for a, spec in enumerate(specs):
        sl = slice(6 * a, 6 * a + 6)
        j[sl, sl] = _block(spec, blocks[a, :3], blocks[a, 3:], t)
    return j


# --- generalized-tensor encodings ----------------------------------------

def as_generalized(spec: AlgebraSpec) -> Generalized:
    """Tensor encoding whose structure matrix equals the variant's exactly.

    For SpaceSpace and the Miao types the X-P deformation lives only in the
    gamma row of the bracket table, so the emitted theta_bar/theta_tilde
    slices are one-sided rather than antisymmetric; symmetrizing them would
    change the bracket of X_k with P_gamma and break the Jacobi identity.
    """
    theta0 = np.zeros((3, 3))
    theta = np.zeros((3, 3, 3))
    theta_bar = np.zeros((3, 3, 3))
    theta_tilde = np.zeros((3, 3, 3))
    if isinstance(spec, Generalized):
        return spec
    if isinstance(spec, Canonical):
        pass
    elif isinstance(spec, SpaceTime):
        r, s = spec.rho - 1, spec.tau - 1
        theta0[r, s] = 1.0 / spec.kappa
        theta0[s, r] = -1.0 / spec.kappa
    elif isinstance(spec, (SpaceSpace, MiaoTypeI, MiaoTypeII)):
        k, l, g = spec.k - 1, spec.l - 1, spec.gamma - 1
        inv_kt = 1.0 / spec.kappa_tilde
        theta[l, k, g] = inv_kt
        theta[l, g, k] = -inv_kt
        theta[k, l, g] = -inv_kt
        theta[k, g, l] = inv_kt
        theta_tilde[l, g, k] = -inv_kt
        theta_tilde[k, g, l] = inv_kt
        if isinstance(spec, (MiaoTypeI, MiaoTypeII)):
            inv_k = 1.0 / spec.kappa
            theta0[k, g] = -inv_k
            theta0[g, k] = inv_k
            theta0[l, g] = inv_k
            theta0[g, l] = -inv_k
        if isinstance(spec, MiaoTypeI):
            theta0[k, l] = 1.0 / spec.kappa
            theta0[l, k] = -1.0 / spec.kappa
        if isinstance(spec, MiaoTypeII):
            inv_kb = 1.0 / spec.kappa_bar
            theta_bar[l, g, k] = -inv_kb
            theta_bar[k, g, l] = -inv_kb
    else:
        raise TypeError(f"unknown algebra variant: {type(spec).__name__}")
    return Generalized(theta0=theta0, theta=theta, theta_bar=theta_bar, theta_tilde=theta_tilde)


# --- bracket evaluation ----------------------------------------------------

def bracket(
    f: Observable,
    g: Observable,
    specs: Sequence[AlgebraSpec],
    state: PhaseState,
) -> float:
    """{f, g} = grad(f) . J . grad(g) at the given state."""
    z = state.flatten()
    j = _structure_matrix_flat(list(specs), z, state.t)
    return float(f.gradient(z, state.t) @ j @ g.gradient(z, state.t))


# --- Jacobi identity --------------------------------------------------------

def _structure_derivatives(
    specs: Sequence[AlgebraSpec], z: np.ndarray, t: float, step: float
) -> np.ndarray:
    """dJ[d, a, b] = d J_ab / d z_d by central differences of the given step.

    Every built-in variant is affine in z, so with step 1.0 the central
    difference is the exact derivative up to rounding.
    """
    n = z.size
    dj = np.zeros((n, n, n))
    for d in range(n):
        zp = z.copy()
        zp[d] += step
        zm = z.copy()
        zm[d] -= step
        dj[d] = (_structure_matrix_flat(specs, zp, t) - _structure_matrix_flat(specs, zm, t)) / (
            2.0 * step
        )
    return dj


def jacobi_residual(
    specs: Sequence[AlgebraSpec] | AlgebraSpec,
    state: PhaseState,
    fd_step: float = 1e-5,
    use_fd: bool = False,
) -> float:
    """Worst Jacobi-identity violation over all index triples.

    Returns max over (a, b, c) of
    | sum_d ( J_ad dJ_bc/dz_d + J_bd dJ_ca/dz_d + J_cd dJ_ab/dz_d ) |.

    All built-in variants have structure matrices affine in z, so their
    derivatives are computed exactly (unit-step central differences); pass
    ``use_fd=True`` to force genuine finite differencing with ``fd_step``.
    """
    if isinstance(specs, AlgebraSpec):
        specs = [specs]
    specs = list(specs)
    if fd_step <= 0:
        raise ValueError(f"fd_step must be positive, got {fd_step!r}")
    z = state.flatten()
    j = _structure_matrix_flat(specs, z, state.t)
    dj = _structure_derivatives(specs, z, state.t, fd_step if use_fd else 1.0)
    r = np.einsum("ad,dbc->abc", j, dj)
    total = r + np.transpose(r, (1, 2, 0)) + np.transpose(r, (2, 0, 1))
    return float(np.max(np.abs(total)))
