"""Shared factories for randomized tests."""

import numpy as np

import liephase as lp

VARIANT_NAMES = (
    "canonical",
    "space_time",
    "space_space",
    "miao_type_i",
    "miao_type_ii",
    "generalized",
)

DEFORMED_NAMED_VARIANTS = ("space_time", "space_space", "miao_type_i", "miao_type_ii")


def antisym(rng: np.random.Generator, shape) -> np.ndarray:
    a = rng.uniform(-1.0, 1.0, shape)
    return a - np.swapaxes(a, -1, -2)


def random_axes(rng: np.random.Generator):
    perm = rng.permutation([1, 2, 3])
    return int(perm[0]), int(perm[1]), int(perm[2])


def random_spec(rng: np.random.Generator, variant: str) -> lp.AlgebraSpec:
    """One random algebra spec with parameters of order one."""
    if variant == "canonical":
        return lp.Canonical()
    if variant == "space_time":
        rho, tau, _ = random_axes(rng)
        return lp.SpaceTime(kappa=float(rng.uniform(0.5, 5.0)), rho=rho, tau=tau)
    if variant == "space_space":
        k, l, g = random_axes(rng)
        sign = rng.choice([-1.0, 1.0])
        return lp.SpaceSpace(kappa_tilde=float(sign * rng.uniform(0.5, 5.0)), k=k, l=l, gamma=g)
    if variant == "miao_type_i":
        k, l, g = random_axes(rng)
        return lp.MiaoTypeI(
            kappa=float(rng.uniform(0.5, 5.0)),
            kappa_tilde=float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 5.0)),
            k=k, l=l, gamma=g,
        )
    if variant == "miao_type_ii":
        k, l, g = random_axes(rng)
        return lp.MiaoTypeII(
            kappa=float(rng.uniform(0.5, 5.0)),
            kappa_tilde=float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 5.0)),
            kappa_bar=float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 5.0)),
            k=k, l=l, gamma=g,
        )
    if variant == "generalized":
        return lp.Generalized(
            theta0=antisym(rng, (3, 3)),
            theta=antisym(rng, (3, 3, 3)),
            theta_bar=antisym(rng, (3, 3, 3)),
            theta_tilde=antisym(rng, (3, 3, 3)),
        )
    raise ValueError(variant)


def random_state(rng: np.random.Generator, n_particles: int, box: float = 10.0) -> lp.PhaseState:
    return lp.PhaseState(
        x=rng.uniform(-box, box, (n_particles, 3)),
        p=rng.uniform(-box, box, (n_particles, 3)),
        t=float(rng.uniform(-box, box)),
    )


def random_system(rng: np.random.Generator, variant: str, n_particles: int) -> lp.ParticleSystem:
    """Unscaled system: independent random parameters, shared axes."""
    masses = rng.uniform(0.5, 4.0, n_particles)
    template = random_spec(rng, variant)
    specs = [template]
    for _ in range(n_particles - 1):
        specs.append(_with_random_parameters(rng, template))
    return lp.ParticleSystem.from_pairs(masses.tolist(), specs)


def _with_random_parameters(rng: np.random.Generator, template: lp.AlgebraSpec) -> lp.AlgebraSpec:
    if isinstance(template, lp.Canonical):
        return lp.Canonical()
    if isinstance(template, lp.SpaceTime):
        return lp.SpaceTime(kappa=float(rng.uniform(0.5, 5.0)), rho=template.rho, tau=template.tau)
    if isinstance(template, lp.SpaceSpace):
        return lp.SpaceSpace(
            kappa_tilde=float(np.sign(template.kappa_tilde) * rng.uniform(0.5, 5.0)),
            k=template.k, l=template.l, gamma=template.gamma,
        )
    if isinstance(template, lp.MiaoTypeI):
        return lp.MiaoTypeI(
            kappa=float(rng.uniform(0.5, 5.0)),
            kappa_tilde=float(np.sign(template.kappa_tilde) * rng.uniform(0.5, 5.0)),
            k=template.k, l=template.l, gamma=template.gamma,
        )
    if isinstance(template, lp.MiaoTypeII):
        return lp.MiaoTypeII(
            kappa=float(rng.uniform(0.5, 5.0)),
            kappa_tilde=float(np.sign(template.kappa_tilde) * rng.uniform(0.5, 5.0)),
            kappa_bar=float(np.sign(template.kappa_bar) * rng.uniform(0.5, 5.0)),
            k=template.k, l=template.l, gamma=template.gamma,
        )
    if isinstance(template, lp.Generalized):
        rng2 = rng
        return lp.Generalized(
            theta0=antisym(rng2, (3, 3)),
            theta=antisym(rng2, (3, 3, 3)),
            theta_bar=antisym(rng2, (3, 3, 3)),
            theta_tilde=antisym(rng2, (3, 3, 3)),
        )
    raise TypeError(type(template).__name__)


def scaled_system(rng: np.random.Generator, variant: str, n_particles: int) -> lp.ParticleSystem:
    """Mass-scaled system: parameters tied to each particle's mass."""
    masses = rng.uniform(0.5, 4.0, n_particles)
    if variant == "canonical":
        specs = [lp.Canonical() for _ in masses]
        return lp.ParticleSystem.from_pairs(masses.tolist(), specs)
    if variant == "space_time":
        rho, tau, _ = random_axes(rng)
        gamma_k = float(rng.uniform(0.5, 3.0))
        specs = [lp.SpaceTime(kappa=gamma_k * m, rho=rho, tau=tau) for m in masses]
        return lp.ParticleSystem.from_pairs(masses.tolist(), specs)
    if variant == "space_space":
        k, l, g = random_axes(rng)
        gamma_kt = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 3.0))
        specs = [lp.SpaceSpace(kappa_tilde=gamma_kt * m, k=k, l=l, gamma=g) for m in masses]
        return lp.ParticleSystem.from_pairs(masses.tolist(), specs)
    if variant == "miao_type_i":
        k, l, g = random_axes(rng)
        gamma_k = float(rng.uniform(0.5, 3.0))
        gamma_kt = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 3.0))
        specs = [
            lp.MiaoTypeI(kappa=gamma_k * m, kappa_tilde=gamma_kt * m, k=k, l=l, gamma=g)
            for m in masses
        ]
        return lp.ParticleSystem.from_pairs(masses.tolist(), specs)
    if variant == "miao_type_ii":
        k, l, g = random_axes(rng)
        gamma_k = float(rng.uniform(0.5, 3.0))
        gamma_kt = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 3.0))
        kappa_bar = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 3.0))
        specs = [
            lp.MiaoTypeII(
                kappa=gamma_k * m, kappa_tilde=gamma_kt * m, kappa_bar=kappa_bar,
                k=k, l=l, gamma=g,
            )
            for m in masses
        ]
        return lp.ParticleSystem.from_pairs(masses.tolist(), specs)
    if variant == "generalized":
        gamma0 = antisym(rng, (3, 3))
        gamma = antisym(rng, (3, 3, 3))
        gamma_tilde = antisym(rng, (3, 3, 3))
        theta_bar = antisym(rng, (3, 3, 3))
        specs = [
            lp.Generalized(
                theta0=gamma0 / m, theta=gamma / m,
                theta_bar=theta_bar, theta_tilde=gamma_tilde / m,
            )
            for m in masses
        ]
        return lp.ParticleSystem.from_pairs(masses.tolist(), specs)
    raise ValueError(variant)
