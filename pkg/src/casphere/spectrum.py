r"""Casimir free energy, force, force gradient and entropy.

At temperature T the free energy is a Matsubara sum over imaginary
frequencies xi_n = 2 pi n k_B T / hbar,

    F = k_B T [ D(0)/2 + sum_{n>=1} D(xi_n) ],

with D the azimuth-summed round-trip log determinant; at T = 0 the sum
becomes (hbar / 2 pi) times the frequency integral of D, evaluated by
Gauss-Laguerre quadrature in v = 2 xi Lc / c.

Sign conventions of the reported quantities: the free energy F and the
zero-temperature energy E are negative (binding); the force
F_c = + dF/dL and the force gradient G = - dF_c/dL are positive for the
attractive interaction; entropy is S = - dF/dT with either sign.
"""

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c as C_LIGHT
from scipy.constants import hbar as HBAR
from scipy.constants import k as K_B
from scipy.special import roots_laguerre

from .materials import MirrorSpec
from .roundtrip import ComputeConfig, ConvergenceError, Geometry, logdet_static, logdet_xi

__all__ = [
    "CasimirResult",
    "matsubara_xi",
    "free_energy",
    "energy_T0",
    "force",
    "force_gradient",
    "entropy",
]

_MATSUBARA_CAP = 100000


@dataclass
class CasimirResult:
    """One computed quantity with the numerical settings that produced it."""

    kind: str
    value: float
    unit: str
    radius: float
    separation: float
    temperature: float
    sphere: MirrorSpec
    plane: MirrorSpec
    lmax: int
    nmax: int
    n_quad: int
    est_rel_err: float
    terms: list | None = field(default=None, repr=False)


def matsubara_xi(temperature: float, n: int) -> float:
    """n-th Matsubara frequency 2 pi n k_B T / hbar in rad/s."""
    return 2.0 * math.pi * n * K_B * temperature / HBAR


def _free_energy_value(
    geometry: Geometry,
    sphere: MirrorSpec,
    plane: MirrorSpec,
    temperature: float,
    config: ComputeConfig,
    collect: list | None = None,
):
    """k_B T weighted Matsubara sum; returns (value, n_top)."""
    ld0 = logdet_static(geometry, sphere, plane, config, collect=collect)
    total = 0.5 * ld0
    small = 0
    n = 0
    for n in range(1, _MATSUBARA_CAP + 1):
        xi = matsubara_xi(temperature, n)
        term = logdet_xi(geometry, sphere, plane, xi, config, collect=collect)
        total += term
        if abs(term) < config.rel_tol * max(abs(total), 1e-300):
            small += 1
            if small >= 3:
                break
        else:
            small = 0
    else:
        raise ConvergenceError(
            f"Matsubara sum did not settle within {_MATSUBARA_CAP} terms"
        )
    return K_B * temperature * total, n


def free_energy(
    geometry: Geometry,
    sphere: MirrorSpec,
    plane: MirrorSpec,
    temperature: float,
    config: ComputeConfig | None = None,
) -> CasimirResult:
    """Casimir free energy in joules at temperature T > 0 (negative)."""
    config = config or ComputeConfig()
    if temperature <= 0.0:
        raise ValueError("temperature must be positive; use energy_T0 at T = 0")
    collect: list | None = [] if config.keep_terms else None
    value, nmax = _free_energy_value(geometry, sphere, plane, temperature, config, collect)
    lmax = config.resolved_lmax(geometry)
    return CasimirResult(
        kind="free_energy",
        value=value,
        unit="J",
        radius=geometry.radius,
        separation=geometry.separation,
        temperature=temperature,
        sphere=sphere,
        plane=plane,
        lmax=lmax,
        nmax=nmax,
        n_quad=config.resolved_n_quad(lmax),
        est_rel_err=config.rel_tol,
        terms=collect,
    )


def _energy_t0_value(
    geometry: Geometry,
    sphere: MirrorSpec,
    plane: MirrorSpec,
    config: ComputeConfig,
    n_nodes: int,
    collect: list | None = None,
) -> float:
    # Gauss-Laguerre in v = 2 xi L / c: the integrand e^v D(v) is then
    # slowly varying, since D decays on the gap scale (the sphere-side
    # growth of the scattering amplitudes cancels the center-to-center
    # part of the translation decay)
    gap = geometry.separation
    v, w = roots_laguerre(n_nodes)
    total = 0.0
    for vj, wj in zip(v, w):
        xi = vj * C_LIGHT / (2.0 * gap)
        term = logdet_xi(geometry, sphere, plane, xi, config, collect=collect)
        total += wj * math.exp(vj) * term
    return HBAR * C_LIGHT / (4.0 * math.pi * gap) * total


def energy_T0(
    geometry: Geometry,
    sphere: MirrorSpec,
    plane: MirrorSpec,
    config: ComputeConfig | None = None,
) -> CasimirResult:
    """Zero-temperature Casimir energy in joules (negative)."""
    config = config or ComputeConfig()
    collect: list | None = [] if config.keep_terms else None
    value = _energy_t0_value(geometry, sphere, plane, config, config.n_xi, collect)
    est = config.rel_tol
    if config.quad_check:
        value2 = _energy_t0_value(geometry, sphere, plane, config, 2 * config.n_xi)
        est = abs(value2 - value) / max(abs(value2), 1e-300)
        value = value2
    lmax = config.resolved_lmax(geometry)
    return CasimirResult(
        kind="energy",
        value=value,
        unit="J",
        radius=geometry.radius,
        separation=geometry.separation,
        temperature=0.0,
        sphere=sphere,
        plane=plane,
        lmax=lmax,
        nmax=config.n_xi,
        n_quad=config.resolved_n_quad(lmax),
        est_rel_err=est,
        terms=collect,
    )


def _interaction(geometry, sphere, plane, temperature, config):
    if temperature > 0.0:
        value, _ = _free_energy_value(geometry, sphere, plane, temperature, config)
        return value
    return _energy_t0_value(geometry, sphere, plane, config, config.n_xi)


def force(
    geometry: Geometry,
    sphere: MirrorSpec,
    plane: MirrorSpec,
    temperature: float,
    config: ComputeConfig | None = None,
) -> CasimirResult:
    """Casimir force + dF/dL in newtons, positive for attraction.

    Central differences in the separation at steps h and h/2 combined by
    Richardson extrapolation; the leftover difference between the two
    estimates sets ``est_rel_err``.
    """
    config = config or ComputeConfig()
    lgap = geometry.separation
    h = max(config.fd_step_rel * lgap, config.fd_step_min)
    # pin the truncation at the central geometry: a basis-size jump inside
    # the stencil would show up amplified by 1/h in the derivative
    lmax = config.resolved_lmax(geometry)
    pinned = dataclasses.replace(config, lmax=lmax, n_quad=config.resolved_n_quad(lmax))

    def en(lv: float) -> float:
        return _interaction(Geometry(geometry.radius, lv), sphere, plane, temperature, pinned)

    d_h = (en(lgap + h) - en(lgap - h)) / (2.0 * h)
    d_h2 = (en(lgap + 0.5 * h) - en(lgap - 0.5 * h)) / h
    value = (4.0 * d_h2 - d_h) / 3.0
    est = abs(d_h2 - d_h) / (3.0 * max(abs(value), 1e-300))
    return CasimirResult(
        kind="force",
        value=value,
        unit="N",
        radius=geometry.radius,
        separation=lgap,
        temperature=temperature,
        sphere=sphere,
        plane=plane,
        lmax=lmax,
        nmax=0,
        n_quad=config.resolved_n_quad(lmax),
        est_rel_err=est,
        terms=None,
    )


def force_gradient(
    geometry: Geometry,
    sphere: MirrorSpec,
    plane: MirrorSpec,
    temperature: float,
    config: ComputeConfig | None = None,
) -> CasimirResult:
    """Force gradient G = - dF_c/dL = - d^2F/dL^2 in N/m, positive.

    Five-point second derivative; the three-point estimate from the same
    samples provides the error gauge.
    """
    config = config or ComputeConfig()
    lgap = geometry.separation
    h = max(config.fd_step_rel * lgap, config.fd_step_min)
    # same truncation for all five samples, see force()
    lmax = config.resolved_lmax(geometry)
    pinned = dataclasses.replace(config, lmax=lmax, n_quad=config.resolved_n_quad(lmax))

    def en(lv: float) -> float:
        return _interaction(Geometry(geometry.radius, lv), sphere, plane, temperature, pinned)

    f0 = en(lgap)
    f1p, f1m = en(lgap + h), en(lgap - h)
    f2p, f2m = en(lgap + 2.0 * h), en(lgap - 2.0 * h)
    d2_5 = (-f2p + 16.0 * f1p - 30.0 * f0 + 16.0 * f1m - f2m) / (12.0 * h * h)
    d2_3 = (f1p - 2.0 * f0 + f1m) / (h * h)
    value = -d2_5
    est = abs(d2_5 - d2_3) / max(abs(d2_5), 1e-300)
    return CasimirResult(
        kind="force_gradient",
        value=value,
        unit="N/m",
        radius=geometry.radius,
        separation=lgap,
        temperature=temperature,
        sphere=sphere,
        plane=plane,
        lmax=lmax,
        nmax=0,
        n_quad=config.resolved_n_quad(lmax),
        est_rel_err=est,
        terms=None,
    )


def entropy(
    geometry: Geometry,
    sphere: MirrorSpec,
    plane: MirrorSpec,
    temperature: float,
    config: ComputeConfig | None = None,
) -> CasimirResult:
    """Casimir entropy S = - dF/dT in J/K by central difference in T."""
    config = config or ComputeConfig()
    if temperature <= 0.0:
        raise ValueError("entropy differentiation needs T > 0")
    dt = config.dT_rel * temperature
    f_hi, _ = _free_energy_value(geometry, sphere, plane, temperature + dt, config)
    f_lo, _ = _free_energy_value(geometry, sphere, plane, temperature - dt, config)
    value = -(f_hi - f_lo) / (2.0 * dt)
    lmax = config.resolved_lmax(geometry)
    return CasimirResult(
        kind="entropy",
        value=value,
        unit="J/K",
        radius=geometry.radius,
        separation=geometry.separation,
        temperature=temperature,
        sphere=sphere,
        plane=plane,
        lmax=lmax,
        nmax=0,
        n_quad=config.resolved_n_quad(lmax),
        est_rel_err=config.rel_tol,
        terms=None,
    )
