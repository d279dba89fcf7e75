r"""Mirror models and reflection coefficients at imaginary frequency.

Three mirror kinds are supported: ``perfect`` (ideal conductor), ``plasma``
(lossless metal, :math:`\varepsilon = 1 + \omega_P^2/\xi^2`) and ``drude``
(dissipative metal, :math:`\varepsilon = 1 + \omega_P^2/(\xi(\xi+\gamma))`).
Frequencies are angular (rad/s); the equivalent length parameterizations are
``lambda_P = 2 pi c / omega_P`` and ``lambda_gamma = 2 pi c / gamma``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT

__all__ = [
    "MirrorSpec",
    "mirror_from_dict",
    "epsilon",
    "fresnel",
    "fresnel_static",
]

_KINDS = ("perfect", "plasma", "drude")


@dataclass(frozen=True)
class MirrorSpec:
    """Mirror material: kind plus plasma and relaxation frequencies in rad/s."""

    kind: str
    omega_p: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown mirror kind {self.kind!r}")
        if self.kind in ("plasma", "drude") and self.omega_p <= 0.0:
            raise ValueError(f"{self.kind} mirror requires omega_p > 0")
        if self.kind == "drude" and self.gamma <= 0.0:
            raise ValueError("drude mirror requires gamma > 0")

    @staticmethod
    def perfect() -> "MirrorSpec":
        return MirrorSpec("perfect")

    @staticmethod
    def plasma(omega_p: float | None = None, lambda_p: float | None = None) -> "MirrorSpec":
        return MirrorSpec("plasma", omega_p=_freq(omega_p, lambda_p, "plasma"))

    @staticmethod
    def drude(
        omega_p: float | None = None,
        gamma: float | None = None,
        lambda_p: float | None = None,
        lambda_gamma: float | None = None,
    ) -> "MirrorSpec":
        return MirrorSpec(
            "drude",
            omega_p=_freq(omega_p, lambda_p, "drude"),
            gamma=_freq(gamma, lambda_gamma, "drude"),
        )

    @property
    def lambda_p(self) -> float:
        """Plasma wavelength in meters."""
        return 2.0 * math.pi * C_LIGHT / self.omega_p

    @property
    def k_p(self) -> float:
        """Plasma wave number omega_p / c in 1/m."""
        return self.omega_p / C_LIGHT


def _freq(omega: float | None, lam: float | None, kind: str) -> float:
    # lengths take precedence over frequencies when both are given
    if lam is not None:
        return 2.0 * math.pi * C_LIGHT / lam
    if omega is not None:
        return omega
    raise ValueError(f"{kind} mirror needs a frequency or wavelength parameter")


def mirror_from_dict(d: dict) -> MirrorSpec:
    """Build a MirrorSpec from a JSON-style dict.

    Recognized keys: ``kind``, ``omega_P_rad_s``, ``gamma_rad_s``,
    ``lambda_P_nm``, ``lambda_gamma_um``.  Length keys win over frequency
    keys when both are present.
    """
    kind = d.get("kind")
    if kind == "perfect":
        return MirrorSpec.perfect()
    omega_p = d.get("omega_P_rad_s")
    gamma = d.get("gamma_rad_s")
    lam_p = d.get("lambda_P_nm")
    lam_g = d.get("lambda_gamma_um")
    lam_p_m = lam_p * 1e-9 if lam_p is not None else None
    lam_g_m = lam_g * 1e-6 if lam_g is not None else None
    if kind == "plasma":
        return MirrorSpec.plasma(omega_p=omega_p, lambda_p=lam_p_m)
    if kind == "drude":
        return MirrorSpec.drude(
            omega_p=omega_p, gamma=gamma, lambda_p=lam_p_m, lambda_gamma=lam_g_m
        )
    raise ValueError(f"unknown mirror kind {kind!r}")


def epsilon(mirror: MirrorSpec, xi: float) -> float:
    """Dielectric function at imaginary frequency xi > 0 (rad/s)."""
    if xi <= 0.0:
        raise ValueError("xi must be positive; use the static path for xi = 0")
    if mirror.kind == "perfect":
        return math.inf
    if mirror.kind == "plasma":
        return 1.0 + (mirror.omega_p / xi) ** 2
    return 1.0 + mirror.omega_p**2 / (xi * (xi + mirror.gamma))


def fresnel(mirror: MirrorSpec, xi: float, kappa: np.ndarray):
    """TE and TM reflection coefficients at imaginary frequency.

    ``kappa`` is the plane-side wave number sqrt(k^2 + xi^2/c^2) in 1/m;
    returns (r_TE, r_TM) arrays with r_TE in [-1, 0] and r_TM in [0, 1].
    """
    kappa = np.asarray(kappa, dtype=float)
    if mirror.kind == "perfect":
        return -np.ones_like(kappa), np.ones_like(kappa)
    eps = epsilon(mirror, xi)
    kappa_t = np.sqrt(kappa**2 + (eps - 1.0) * (xi / C_LIGHT) ** 2)
    r_te = (kappa - kappa_t) / (kappa + kappa_t)
    r_tm = (eps * kappa - kappa_t) / (eps * kappa + kappa_t)
    return r_te, r_tm


def fresnel_static(mirror: MirrorSpec, kappa: np.ndarray):
    """xi -> 0 limit of the reflection coefficients.

    Perfect: (-1, 1).  Plasma: TM saturates at 1, TE keeps a kappa
    dependence through the plasma wave number.  Drude: (0, 1).
    """
    kappa = np.asarray(kappa, dtype=float)
    ones = np.ones_like(kappa)
    if mirror.kind == "perfect":
        return -ones, ones
    if mirror.kind == "drude":
        return np.zeros_like(kappa), ones
    kp = mirror.k_p
    root = np.sqrt(kappa**2 + kp**2)
    return (kappa - root) / (kappa + root), ones
