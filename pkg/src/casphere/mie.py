r"""Sphere scattering coefficients on the imaginary frequency axis.

Electric (a-type) and magnetic (b-type) multipole amplitudes of a sphere of
radius R at imaginary frequency xi, expressed through modified spherical
Bessel functions.  Values are carried as sign plus log magnitude, since the
amplitudes span hundreds of orders of magnitude across the multipole range.

The electric amplitude is positive and the magnetic one negative for every
conductor model handled here; both vanish like x^(2l+1) for small size
parameter x = xi R / c.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT

from .materials import MirrorSpec, epsilon
from .specfun import bessel_i_arrays, bessel_k_arrays

__all__ = ["MieCoefficients", "mie_coefficients", "mie_static", "log_double_factorial"]

_LOG_PI_2 = math.log(math.pi / 2.0)


@dataclass(frozen=True)
class MieCoefficients:
    """Multipole amplitudes for l = 1..lmax as sign * exp(log magnitude).

    Arrays are indexed by l; entry 0 is unused and set to zero.
    ``sign_e``/``log_e`` hold the electric amplitudes, ``sign_m``/``log_m``
    the magnetic ones.
    """

    lmax: int
    x: float
    sign_e: np.ndarray
    log_e: np.ndarray
    sign_m: np.ndarray
    log_m: np.ndarray


def log_double_factorial(n: int) -> float:
    """log(n!!) for n >= -1."""
    if n <= 0:
        return 0.0
    if n % 2 == 1:
        k = (n + 1) // 2
        return math.lgamma(n + 2.0) - k * math.log(2.0) - math.lgamma(k + 1.0)
    k = n // 2
    return k * math.log(2.0) + math.lgamma(k + 1.0)


def mie_coefficients(mirror: MirrorSpec, radius: float, xi: float, lmax: int) -> MieCoefficients:
    """Scattering amplitudes of a sphere at imaginary frequency xi (rad/s)."""
    if xi <= 0.0:
        raise ValueError("xi must be positive; use mie_static for the zero mode")
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    x = xi * radius / C_LIGHT
    ell = np.arange(lmax + 1, dtype=float)
    log_i, r_i = bessel_i_arrays(lmax, x)
    log_k, q_k = bessel_k_arrays(lmax, x)
    # log of z i_l / ((2/pi) z k_l), the half-space amplitude scale
    log_sc = log_i - log_k + _LOG_PI_2

    sign_e = np.zeros(lmax + 1)
    log_e = np.full(lmax + 1, -np.inf)
    sign_m = np.zeros(lmax + 1)
    log_m = np.full(lmax + 1, -np.inf)
    sl = slice(1, lmax + 1)

    if mirror.kind == "perfect":
        # a_l = -S'/C', b_l = -S/C in terms of the Riccati pair
        rho = r_i - ell / x  # S'/S
        eta = -q_k - ell / x  # C'/C, negative
        sign_e[sl] = 1.0
        log_e[sl] = log_sc[sl] + np.log(rho[sl]) - np.log(-eta[sl])
        sign_m[sl] = -1.0
        log_m[sl] = log_sc[sl]
        return MieCoefficients(lmax, x, sign_e, log_e, sign_m, log_m)

    eps = epsilon(mirror, xi)
    n_ref = math.sqrt(eps)
    y = n_ref * x
    _, r_in = bessel_i_arrays(lmax, y)

    # the l/x poles of the logarithmic derivatives cancel pairwise in the
    # combinations below, so each line is free of catastrophic cancellation
    num_e = n_ref * r_i - r_in - (ell / x) * (n_ref - 1.0 / n_ref)
    den_e = -(n_ref * q_k + r_in + (ell / x) * (n_ref - 1.0 / n_ref))
    num_m = r_i - n_ref * r_in
    den_m = -(q_k + n_ref * r_in)

    with np.errstate(divide="ignore", invalid="ignore"):
        f_e = num_e / den_e
        f_m = num_m / den_m
        sign_e[sl] = -np.sign(f_e[sl])
        log_e[sl] = log_sc[sl] + np.log(np.abs(f_e[sl]))
        sign_m[sl] = -np.sign(f_m[sl])
        log_m[sl] = log_sc[sl] + np.log(np.abs(f_m[sl]))
    return MieCoefficients(lmax, x, sign_e, log_e, sign_m, log_m)


def mie_static(mirror: MirrorSpec, radius: float, lmax: int) -> MieCoefficients:
    """xi -> 0 scattering strengths t_l R^(2l+1), log scaled, R folded in.

    The electric strength saturates at its ideal-conductor value for every
    metal.  The magnetic strength depends on the screening: zero for a
    dissipative metal, full ideal-conductor value for a perfect mirror, and
    an alpha = omega_p R / c dependent fraction for a plasma mirror.
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    ell = np.arange(lmax + 1, dtype=float)
    log_r = math.log(radius)
    log_df = np.array(
        [log_double_factorial(2 * l + 1) + log_double_factorial(2 * l - 1) for l in range(lmax + 1)]
    )
    sign_e = np.zeros(lmax + 1)
    log_e = np.full(lmax + 1, -np.inf)
    sign_m = np.zeros(lmax + 1)
    log_m = np.full(lmax + 1, -np.inf)
    sl = slice(1, lmax + 1)

    with np.errstate(divide="ignore"):
        sign_e[sl] = 1.0
        log_e[sl] = (
            np.log(ell[sl] + 1.0) - np.log(ell[sl]) - log_df[sl] + (2.0 * ell[sl] + 1.0) * log_r
        )
        if mirror.kind == "perfect":
            sign_m[sl] = -1.0
            log_m[sl] = -log_df[sl] + (2.0 * ell[sl] + 1.0) * log_r
        elif mirror.kind == "plasma":
            alpha = mirror.omega_p * radius / C_LIGHT
            _, r_i = bessel_i_arrays(lmax, alpha)
            # sigma_l = alpha S'_l(alpha) / S_l(alpha)
            sigma = alpha * r_i - ell
            frac = (ell + 1.0 - sigma) / (ell + sigma)
            sign_m[sl] = np.sign(frac[sl])
            log_m[sl] = np.log(np.abs(frac[sl])) - log_df[sl] + (2.0 * ell[sl] + 1.0) * log_r
        # drude: magnetic strength vanishes in the static limit
    return MieCoefficients(lmax, 0.0, sign_e, log_e, sign_m, log_m)
