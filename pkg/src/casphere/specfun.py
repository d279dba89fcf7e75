r"""Scaled special functions for imaginary-frequency scattering.

Modified spherical Bessel functions :math:`i_\ell, k_\ell` and the
associated Legendre angular functions :math:`\pi_{\ell m}, \tau_{\ell m}`
evaluated in the hyperbolic regime (argument :math:`u \ge 1`).  All values
are returned as (mantissa, log_scale) pairs, ``true = mantissa * exp(log_scale)``,
so that orders up to several hundred and arguments up to 1e4 stay finite.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._accel import maybe_njit

__all__ = [
    "ScaledBessel",
    "AngularPair",
    "bessel_i_scaled",
    "bessel_k_scaled",
    "bessel_i_arrays",
    "bessel_k_arrays",
    "angular_pair",
    "angular_tables",
]

# rescale threshold used inside the recurrences
_BIG = 1e250
_LOG_BIG = math.log(_BIG)


@dataclass(frozen=True)
class ScaledBessel:
    """Modified spherical Bessel value as value * exp(log_scale)."""

    order: int
    argument: float
    value: float
    log_scale: float

    @property
    def unscaled(self) -> float:
        return self.value * math.exp(self.log_scale)


@dataclass(frozen=True)
class AngularPair:
    """pi and tau angular functions sharing one log_scale.

    Normalization sqrt((2l+1) (l-m)! / (l+m)!) is absorbed into the values.
    """

    l: int
    m: int
    u: float
    pi: float
    tau: float
    log_scale: float

    @property
    def pi_unscaled(self) -> float:
        return self.pi * math.exp(self.log_scale)

    @property
    def tau_unscaled(self) -> float:
        return self.tau * math.exp(self.log_scale)


@maybe_njit
def _log_i0(x: float) -> float:
    # i_0 = sinh(x)/x, written to survive x up to 1e4 and down to 1e-6
    if x < 1e-3:
        x2 = x * x
        return math.log1p(x2 / 6.0 * (1.0 + x2 / 20.0))
    return x - math.log(2.0) + math.log1p(-math.exp(-2.0 * x)) - math.log(x)


@maybe_njit
def _log_im1(x: float) -> float:
    # i_{-1} = cosh(x)/x
    if x < 1e-3:
        x2 = x * x
        return math.log1p(x2 / 2.0 * (1.0 + x2 / 12.0)) - math.log(x)
    return x - math.log(2.0) + math.log1p(math.exp(-2.0 * x)) - math.log(x)


@maybe_njit
def _ratio_i_cf(l, x):
    # i_l(x)/i_{l-1}(x) by the modified Lentz continued fraction
    # r_l = 1/(b_0 + 1/(b_1 + ...)), b_k = (2(l+k)+1)/x; the tiny seed
    # folds the leading 1/( ) into the iteration, so f converges to r_l
    tiny = 1e-300
    f = tiny
    c = f
    d = 0.0
    for k in range(100000):
        b = (2.0 * (l + k) + 1.0) / x
        d = b + d
        if d == 0.0:
            d = tiny
        c = b + 1.0 / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f = f * delta
        if abs(delta - 1.0) < 5e-16:
            break
    return f


@maybe_njit
def _bessel_i_core(lmax, x):
    # downward recurrence i_{l-1} = i_{l+1} + (2l+1)/x i_l seeded by the
    # continued-fraction ratio; returns log i_l for l = 0..lmax and the
    # ratios r_l = i_{l-1}/i_l for l = 1..lmax (r[0] unused)
    log_i = np.empty(lmax + 1)
    ratio = np.empty(lmax + 1)
    v_hi = _ratio_i_cf(lmax + 1, x)  # i_{lmax+1}/i_{lmax}
    v_cur = 1.0
    v_prev = v_hi  # holds i_{l+1} in the same scale as v_cur = i_l
    shift = 0.0
    log_raw = np.empty(lmax + 1)
    log_raw[lmax] = 0.0
    for l in range(lmax, 0, -1):
        v_new = v_prev + (2.0 * l + 1.0) / x * v_cur
        ratio[l] = v_new / v_cur
        if v_new > _BIG:
            v_new *= 1.0 / _BIG
            v_cur *= 1.0 / _BIG
            shift += _LOG_BIG
        v_prev = v_cur
        v_cur = v_new
        log_raw[l - 1] = math.log(v_cur) + shift
    anchor = _log_i0(x) - log_raw[0]
    for l in range(lmax + 1):
        log_i[l] = log_raw[l] + anchor
    ratio[0] = math.exp(_log_im1(x) - log_i[0])
    return log_i, ratio


@maybe_njit
def _bessel_k_core(lmax, x):
    # upward recurrence k_{l+1} = k_{l-1} + (2l+1)/x k_l, stable for k;
    # returns log k_l for l = 0..lmax and q_l = k_{l-1}/k_l (q[0] = 1)
    log_k = np.empty(lmax + 1)
    ratio = np.empty(lmax + 1)
    log_pref = math.log(math.pi / 2.0) - x
    log_k[0] = log_pref - math.log(x)
    ratio[0] = 1.0  # k_{-1} = k_0
    if lmax == 0:
        return log_k, ratio
    v_prev = 1.0  # k_0 in units of exp(log_k[0])
    v_cur = 1.0 / x + 1.0  # k_1 = k_0 (1 + 1/x)
    shift = log_k[0]  # true k_l = v * exp(shift)
    log_k[1] = log_k[0] + math.log1p(1.0 / x)
    ratio[1] = v_prev / v_cur
    for l in range(1, lmax):
        v_new = v_prev + (2.0 * l + 1.0) / x * v_cur
        ratio[l + 1] = v_cur / v_new
        if v_new > _BIG:
            v_new *= 1.0 / _BIG
            v_cur *= 1.0 / _BIG
            shift += _LOG_BIG
        v_prev = v_cur
        v_cur = v_new
        log_k[l + 1] = math.log(v_cur) + shift
    # shift started at log_k[0]; ratios are scale free
    return log_k, ratio


def bessel_i_arrays(lmax: int, x: float):
    """log i_l for l = 0..lmax plus ratios i_{l-1}/i_l (entry 0 is i_{-1}/i_0)."""
    if x <= 0.0:
        raise ValueError("argument must be positive")
    return _bessel_i_core(lmax, float(x))


def bessel_k_arrays(lmax: int, x: float):
    """log k_l for l = 0..lmax plus ratios k_{l-1}/k_l (entry 0 is 1)."""
    if x <= 0.0:
        raise ValueError("argument must be positive")
    return _bessel_k_core(lmax, float(x))


def _split(log_value: float, order: int, x: float) -> ScaledBessel:
    scale = math.floor(log_value)
    return ScaledBessel(order, x, math.exp(log_value - scale), float(scale))


def bessel_i_scaled(l: int, x: float) -> ScaledBessel:
    """Scaled modified spherical Bessel function of the first kind."""
    log_i, _ = bessel_i_arrays(l, x)
    return _split(log_i[l], l, x)


def bessel_k_scaled(l: int, x: float) -> ScaledBessel:
    """Scaled modified spherical Bessel function of the second kind."""
    log_k, _ = bessel_k_arrays(l, x)
    return _split(log_k[l], l, x)


def _log_seed_mm(m: int) -> float:
    # log of N_mm (2m-1)!! where N_lm = sqrt((2l+1)(l-m)!/(l+m)!)
    if m == 0:
        return 0.0
    return 0.5 * (
        math.log(2.0 * m + 1.0)
        + math.lgamma(2.0 * m + 1.0)
        - 2.0 * m * math.log(2.0)
        - 2.0 * math.lgamma(m + 1.0)
    )


@maybe_njit
def _angular_core(lmax, u, s, seed_log, rec_a, rec_b, rec_c):
    # normalized Legendre recurrence along l for every m, hyperbolic regime.
    # u, s are node arrays with s = sqrt(u^2 - 1) computed cancellation free.
    # Outputs pi, tau mantissas with one shared log scale per (m, l, node).
    n = u.shape[0]
    pi = np.zeros((lmax + 1, lmax + 1, n))
    tau = np.zeros((lmax + 1, lmax + 1, n))
    logs = np.zeros((lmax + 1, lmax + 1, n))
    for m in range(lmax + 1):
        p_prev = np.zeros(n)
        p_cur = np.ones(n)
        scale = np.empty(n)
        for j in range(n):
            scale[j] = seed_log[m] + m * math.log(s[j]) if s[j] > 0.0 else -np.inf
        if m == 0:
            for j in range(n):
                scale[j] = 0.0
        for l in range(m, lmax + 1):
            if l >= max(m, 1):
                for j in range(n):
                    if s[j] > 0.0:
                        pi[m, l, j] = m * p_cur[j] / s[j]
                        tau[m, l, j] = (l * u[j] * p_cur[j] - rec_c[m, l] * p_prev[j]) / s[j]
                        logs[m, l, j] = scale[j]
                    else:
                        # u = 1 limit: only |m| = 1 survives and the
                        # normalized pair tends to sqrt((2l+1) l (l+1)) / 2
                        if m == 1:
                            lim = 0.5 * math.sqrt((2.0 * l + 1.0) * l * (l + 1.0))
                            pi[m, l, j] = lim
                            tau[m, l, j] = lim
                        logs[m, l, j] = 0.0
            if l < lmax:
                for j in range(n):
                    p_new = rec_a[m, l] * u[j] * p_cur[j] - rec_b[m, l] * p_prev[j]
                    p_prev[j] = p_cur[j]
                    p_cur[j] = p_new
                    if p_new > _BIG:
                        p_prev[j] *= 1.0 / _BIG
                        p_cur[j] *= 1.0 / _BIG
                        scale[j] += _LOG_BIG
    return pi, tau, logs


def _angular_coeffs(lmax: int):
    # recurrence coefficients for the normalized functions
    rec_a = np.zeros((lmax + 1, lmax + 1))
    rec_b = np.zeros((lmax + 1, lmax + 1))
    rec_c = np.zeros((lmax + 2, lmax + 1))
    for m in range(lmax + 1):
        for l in range(m, lmax + 1):
            rec_a[m, l] = math.sqrt(
                (2.0 * l + 3.0) * (2.0 * l + 1.0) / ((l - m + 1.0) * (l + m + 1.0))
            )
            if l > m:
                rec_b[m, l] = math.sqrt(
                    (2.0 * l + 3.0)
                    * (l + m)
                    * (l - m)
                    / ((2.0 * l - 1.0) * (l - m + 1.0) * (l + m + 1.0))
                )
                rec_c[m, l] = math.sqrt(
                    (2.0 * l + 1.0) * (l + m) * (l - m) / (2.0 * l - 1.0)
                )
    return rec_a, rec_b, rec_c


def angular_tables(lmax: int, u: np.ndarray, s: np.ndarray | None = None):
    """pi, tau mantissa tables with shared log scales, indexed [m, l, node].

    ``s`` may carry a cancellation-free sqrt(u^2-1); it is derived from
    ``u`` when omitted.  Entries with l < max(m, 1) are zero.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u < 1.0):
        raise ValueError("angular functions require u >= 1")
    if s is None:
        s = np.sqrt((u - 1.0) * (u + 1.0))
    seed_log = np.array([_log_seed_mm(m) for m in range(lmax + 1)])
    rec_a, rec_b, rec_c = _angular_coeffs(lmax)
    return _angular_core(lmax, u, np.asarray(s, dtype=float), seed_log, rec_a, rec_b, rec_c)


def angular_pair(l: int, m: int, u: float) -> AngularPair:
    """Normalized pi and tau at a single hyperbolic argument."""
    if m < 0 or m > l:
        raise ValueError("require 0 <= m <= l")
    if l < 1:
        raise ValueError("require l >= 1")
    pi, tau, logs = angular_tables(l, np.array([float(u)]))
    return AngularPair(l, m, float(u), pi[m, l, 0], tau[m, l, 0], logs[m, l, 0])
