"""Casimir interaction of a sphere facing a plane, multipole scattering method."""

from .analysis import BetaFit, dissipation_ratio, fit_beta, rho_series, theta_factor
from .materials import MirrorSpec, epsilon, fresnel, fresnel_static, mirror_from_dict
from .mie import MieCoefficients, mie_coefficients, mie_static
from .pfa import (
    f_alpha,
    ld_free_energy_perfect,
    pfa_energy,
    pfa_force,
    pfa_gradient,
    phi_thermal,
    pp_energy_per_area,
)
from .roundtrip import (
    CasphereError,
    ComputeConfig,
    ConvergenceError,
    Geometry,
    RoundTripBlock,
    assemble_block,
    logdet_block,
    logdet_static,
    logdet_xi,
    required_lmax,
)
from .spectrum import (
    CasimirResult,
    energy_T0,
    entropy,
    force,
    force_gradient,
    free_energy,
    matsubara_xi,
)
from .specfun import (
    AngularPair,
    ScaledBessel,
    angular_pair,
    angular_tables,
    bessel_i_scaled,
    bessel_k_scaled,
)

__version__ = "0.1.0"

__all__ = [
    "AngularPair",
    "BetaFit",
    "CasimirResult",
    "CasphereError",
    "ComputeConfig",
    "ConvergenceError",
    "Geometry",
    "MieCoefficients",
    "MirrorSpec",
    "RoundTripBlock",
    "ScaledBessel",
    "angular_pair",
    "angular_tables",
    "assemble_block",
    "bessel_i_scaled",
    "bessel_k_scaled",
    "dissipation_ratio",
    "energy_T0",
    "entropy",
    "epsilon",
    "f_alpha",
    "fit_beta",
    "force",
    "force_gradient",
    "free_energy",
    "fresnel",
    "fresnel_static",
    "ld_free_energy_perfect",
    "logdet_block",
    "logdet_static",
    "logdet_xi",
    "matsubara_xi",
    "mie_coefficients",
    "mie_static",
    "mirror_from_dict",
    "pfa_energy",
    "pfa_force",
    "pfa_gradient",
    "phi_thermal",
    "pp_energy_per_area",
    "required_lmax",
    "rho_series",
    "theta_factor",
    "__version__",
]
