r"""Proximity force approximation and closed-form benchmark limits.

The plane-plane free energy per unit area at gap L feeds the Derjaguin
mapping for a sphere of radius R:

    force:      F_pfa(L) = -2 pi R e(L)          > 0 (attraction positive)
    energy:     E_pfa(L) = 2 pi R int_L^inf e    < 0
    gradient:   G_pfa(L) = 2 pi R e'(L)          > 0

with e(L) < 0 the plane-plane energy per area.  Two closed forms serve as
anchors: the ideal-mirror zero-temperature result -pi^2 hbar c / (720 L^3)
and the large-separation dipole free energy with its thermal factor phi.
"""

import math

import numpy as np
from scipy.constants import c as C_LIGHT
from scipy.constants import hbar as HBAR
from scipy.constants import k as K_B
from scipy.special import roots_laguerre, roots_legendre

from .materials import MirrorSpec, fresnel, fresnel_static
from .roundtrip import ConvergenceError

__all__ = [
    "pp_energy_per_area",
    "pfa_force",
    "pfa_energy",
    "pfa_gradient",
    "phi_thermal",
    "ld_free_energy_perfect",
    "f_alpha",
]

_MATSUBARA_CAP = 100000


def _laguerre(n):
    return roots_laguerre(n)


def _eps_array(mirror: MirrorSpec, xi: np.ndarray) -> np.ndarray:
    if mirror.kind == "plasma":
        return 1.0 + (mirror.omega_p / xi) ** 2
    return 1.0 + mirror.omega_p**2 / (xi * (xi + mirror.gamma))


def _rr_products(m1: MirrorSpec, m2: MirrorSpec, xi: np.ndarray, kappa: float):
    """(r_TE1 r_TE2, r_TM1 r_TM2) for an array of frequencies at one kappa."""
    rr_te = np.ones_like(xi)
    rr_tm = np.ones_like(xi)
    for m in (m1, m2):
        if m.kind == "perfect":
            rr_te *= -1.0
            continue
        eps = _eps_array(m, xi)
        kt = np.sqrt(kappa**2 + (eps - 1.0) * (xi / C_LIGHT) ** 2)
        rr_te *= (kappa - kt) / (kappa + kt)
        rr_tm *= (eps * kappa - kt) / (eps * kappa + kt)
    return rr_te, rr_tm


def _pp_t0(m1: MirrorSpec, m2: MirrorSpec, gap: float, n_kappa: int, n_freq: int) -> float:
    # hbar/(4 pi^2) int_0^inf kappa dkappa int_0^{c kappa} dxi sum_p log(1 - r r e^{-2 kappa L})
    t, w = _laguerre(n_kappa)
    x, wx = roots_legendre(n_freq)
    x = 0.5 * (x + 1.0)  # nodes in (0, 1)
    wx = 0.5 * wx
    total = 0.0
    for ti, wi in zip(t, w):
        kappa = ti / (2.0 * gap)
        emt = math.exp(-ti)
        xi = C_LIGHT * kappa * x
        rr_te, rr_tm = _rr_products(m1, m2, xi, kappa)
        inner = np.sum(wx * (np.log1p(-rr_te * emt) + np.log1p(-rr_tm * emt)))
        total += wi * math.exp(ti) * kappa * (C_LIGHT * kappa) * inner
    return HBAR / (4.0 * math.pi**2) * total / (2.0 * gap)


def _pp_thermal_term(m1, m2, gap, xi, n_kappa) -> float:
    # int_{xi/c}^inf kappa dkappa sum_p log(1 - r r e^{-2 kappa L}) at one frequency
    t, w = _laguerre(n_kappa)
    kappa = xi / C_LIGHT + t / (2.0 * gap)
    damp = np.exp(-t) * math.exp(-2.0 * xi * gap / C_LIGHT)
    if xi == 0.0:
        r1te, r1tm = fresnel_static(m1, kappa)
        r2te, r2tm = fresnel_static(m2, kappa)
    else:
        r1te, r1tm = fresnel(m1, xi, kappa)
        r2te, r2tm = fresnel(m2, xi, kappa)
    integrand = np.log1p(-r1te * r2te * damp) + np.log1p(-r1tm * r2tm * damp)
    return float(np.sum(w * np.exp(t) * kappa * integrand)) / (2.0 * gap)


def pp_energy_per_area(
    m1: MirrorSpec,
    m2: MirrorSpec,
    gap: float,
    temperature: float,
    n_kappa: int = 120,
    n_freq: int = 64,
    rel_tol: float = 1e-10,
) -> float:
    """Plane-plane Casimir (free) energy per unit area in J/m^2, negative."""
    if gap <= 0.0:
        raise ValueError("gap must be positive")
    if temperature < 0.0:
        raise ValueError("temperature must be nonnegative")
    if temperature == 0.0:
        return _pp_t0(m1, m2, gap, n_kappa, n_freq)
    total = 0.5 * _pp_thermal_term(m1, m2, gap, 0.0, n_kappa)
    small = 0
    for n in range(1, _MATSUBARA_CAP + 1):
        xi = 2.0 * math.pi * n * K_B * temperature / HBAR
        term = _pp_thermal_term(m1, m2, gap, xi, n_kappa)
        total += term
        if abs(term) < rel_tol * max(abs(total), 1e-300):
            small += 1
            if small >= 3:
                break
        else:
            small = 0
    else:
        raise ConvergenceError("plane-plane Matsubara sum did not settle")
    return K_B * temperature / (2.0 * math.pi) * total


def pfa_force(
    sphere_mat: MirrorSpec,
    plane_mat: MirrorSpec,
    radius: float,
    gap: float,
    temperature: float,
    **kw,
) -> float:
    """Proximity force F = -2 pi R e(L) in newtons, positive for attraction."""
    return -2.0 * math.pi * radius * pp_energy_per_area(sphere_mat, plane_mat, gap, temperature, **kw)


def pfa_energy(
    sphere_mat: MirrorSpec,
    plane_mat: MirrorSpec,
    radius: float,
    gap: float,
    temperature: float,
    n_tail: int = 32,
    **kw,
) -> float:
    """Proximity energy 2 pi R int_L^inf e(l) dl in joules, negative.

    The integral runs on a logarithmic grid up to 100 L; beyond that the
    integrand is closed with a local power law fitted at the endpoint.
    """
    span = math.log(100.0)
    x, wx = roots_legendre(n_tail)
    s = 0.5 * span * (x + 1.0)
    ws = 0.5 * span * wx
    acc = 0.0
    for sj, wj in zip(s, ws):
        lj = gap * math.exp(sj)
        acc += wj * lj * pp_energy_per_area(sphere_mat, plane_mat, lj, temperature, **kw)
    e_far = pp_energy_per_area(sphere_mat, plane_mat, 100.0 * gap, temperature, **kw)
    e_near = pp_energy_per_area(sphere_mat, plane_mat, 80.0 * gap, temperature, **kw)
    slope = math.log(abs(e_near) / abs(e_far)) / math.log(100.0 / 80.0)
    tail = e_far * (100.0 * gap) / (slope - 1.0)
    return 2.0 * math.pi * radius * (acc + tail)


def pfa_gradient(
    sphere_mat: MirrorSpec,
    plane_mat: MirrorSpec,
    radius: float,
    gap: float,
    temperature: float,
    step_rel: float = 1e-3,
    **kw,
) -> float:
    """Proximity force gradient 2 pi R e'(L) in N/m, positive."""
    h = step_rel * gap
    e_hi = pp_energy_per_area(sphere_mat, plane_mat, gap + h, temperature, **kw)
    e_lo = pp_energy_per_area(sphere_mat, plane_mat, gap - h, temperature, **kw)
    return 2.0 * math.pi * radius * (e_hi - e_lo) / (2.0 * h)


def phi_thermal(nu: float) -> float:
    """Thermal factor of the large-separation ideal-mirror free energy.

    phi(nu) = sum_{n>=0}' exp(-2 nu n) (1 + 2 nu n + 2 nu^2 n^2) with the
    n = 0 term at half weight; nu = 2 pi Lc k_B T / (hbar c).  Evaluated in
    closed form: nu phi -> 3/2 as nu -> 0 and phi -> 1/2 as nu -> inf.
    """
    if nu < 0.0:
        raise ValueError("nu must be nonnegative")
    if nu == 0.0:
        return math.inf
    q = math.exp(-2.0 * nu)
    one_q = -math.expm1(-2.0 * nu)  # 1 - q without cancellation
    num = 4.0 * nu * q * one_q + (1.0 + q) * (4.0 * nu * nu * q + one_q * one_q)
    return num / (2.0 * one_q**3)


def ld_free_energy_perfect(radius: float, center_distance: float, temperature: float) -> float:
    """Large-distance ideal-mirror free energy of a small sphere, in joules.

    Valid for radius much smaller than the center distance Lc; reduces to
    -9 hbar c R^3 / (16 pi Lc^4) at zero temperature.
    """
    if temperature == 0.0:
        return -9.0 * HBAR * C_LIGHT * radius**3 / (16.0 * math.pi * center_distance**4)
    nu = 2.0 * math.pi * center_distance * K_B * temperature / (HBAR * C_LIGHT)
    return (
        -3.0
        * K_B
        * temperature
        * radius**3
        / (4.0 * center_distance**3)
        * phi_thermal(nu)
    )


def f_alpha(alpha: float) -> float:
    """High-temperature plasma correction factor.

    f(alpha) = (3/2) (1 + 1/alpha^2 - coth(alpha)/alpha) with
    alpha = omega_p R / c; rises monotonically from 1 at alpha -> 0 to 3/2
    as alpha -> inf.
    """
    if alpha < 0.0:
        raise ValueError("alpha must be nonnegative")
    if alpha < 1e-2:
        a2 = alpha * alpha
        return 1.0 + a2 / 30.0 - a2 * a2 / 315.0
    if alpha > 350.0:
        return 1.5 * (1.0 + 1.0 / (alpha * alpha) - 1.0 / alpha)
    return 1.5 * (1.0 + 1.0 / (alpha * alpha) - math.cosh(alpha) / (math.sinh(alpha) * alpha))
