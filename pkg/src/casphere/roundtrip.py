r"""Round-trip scattering operator for a sphere facing a plane.

For each imaginary frequency xi and azimuthal order m the round trip
(sphere scattering, propagation to the plane, specular reflection,
propagation back) is represented in a multipole basis l = max(m,1)..lmax
with electric and magnetic blocks.  In a symmetrized balanced basis the
operator is a sum of two Gram matrices, one per plane polarization,

    M = F_TM F_TM^T + F_TE F_TE^T,

with every factor entry nonnegative, so M is symmetric positive
semidefinite and log det(1 - M) follows from a Cholesky factorization.
A Cholesky breakdown means the round trip has spectral radius >= 1,
which no physical configuration reaches.

The propagation measure runs over the plane-side wave number
kappa >= xi/c with weight exp(-2 kappa Lc), where Lc is the distance
from the plane to the sphere center.  Gauss-Laguerre nodes in
t = 2 Lc (kappa - xi/c) resolve it.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg as sla
from scipy.constants import c as C_LIGHT
from scipy.special import roots_laguerre

from ._accel import USE_NUMBA, maybe_njit
from .materials import MirrorSpec, fresnel, fresnel_static
from .mie import MieCoefficients, mie_coefficients, mie_static
from .specfun import angular_tables

__all__ = [
    "CasphereError",
    "ConvergenceError",
    "Geometry",
    "ComputeConfig",
    "RoundTripBlock",
    "required_lmax",
    "assemble_block",
    "logdet_block",
    "logdet_xi",
    "logdet_static",
]


class CasphereError(Exception):
    """Base error for this package."""


class ConvergenceError(CasphereError):
    """Raised when a factorization or series fails to converge."""


@dataclass(frozen=True)
class Geometry:
    """Sphere of radius ``radius`` at surface-to-plane gap ``separation`` (meters)."""

    radius: float
    separation: float

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("radius must be positive")
        if self.separation <= 0.0:
            raise ValueError("separation must be positive")

    @property
    def center_distance(self) -> float:
        """Distance from the plane to the sphere center."""
        return self.radius + self.separation

    @property
    def aspect(self) -> float:
        """Gap to radius ratio L/R."""
        return self.separation / self.radius


@dataclass(frozen=True)
class ComputeConfig:
    """Numerical knobs shared by the energy, force and spectrum routines.

    ``lmax`` and ``n_quad`` default to geometry-driven choices; ``rel_tol``
    stops the frequency and azimuthal sums; ``n_xi`` is the node count of
    the zero-temperature frequency quadrature.
    """

    lmax: int | None = None
    n_quad: int | None = None
    rel_tol: float = 1e-8
    n_xi: int = 40
    lmax_cap: int = 80
    mmax: int | None = None
    fd_step_rel: float = 1e-3
    fd_step_min: float = 1e-12
    dT_rel: float = 0.01
    quad_check: bool = False
    keep_terms: bool = False

    def resolved_lmax(self, geometry: Geometry) -> int:
        if self.lmax is not None:
            return self.lmax
        return min(required_lmax(geometry), self.lmax_cap)

    def resolved_n_quad(self, lmax: int) -> int:
        if self.n_quad is not None:
            return self.n_quad
        return max(40, 2 * lmax)


@dataclass
class RoundTripBlock:
    """One (xi, m) block of the round-trip operator in the balanced basis."""

    xi: float
    m: int
    lmax: int
    matrix: np.ndarray
    n_quad: int = 0


def required_lmax(geometry: Geometry) -> int:
    """Multipole cutoff rule: ceil(10 + 7 R / L)."""
    return math.ceil(10.0 + 7.0 * geometry.radius / geometry.separation)


@lru_cache(maxsize=32)
def _laguerre_nodes(n: int):
    t, w = roots_laguerre(n)
    with np.errstate(divide="ignore"):
        log_w = np.log(w)
    return t, log_w


@maybe_njit
def _gram_pair_kernel(f_tm, f_te):
    dim, n = f_tm.shape
    out = np.zeros((dim, dim))
    for i in range(dim):
        for j in range(i + 1):
            acc = 0.0
            for k in range(n):
                acc += f_tm[i, k] * f_tm[j, k] + f_te[i, k] * f_te[j, k]
            out[i, j] = acc
            out[j, i] = acc
    return out


def _gram_pair_numpy(f_tm, f_te):
    out = f_tm @ f_tm.T + f_te @ f_te.T
    return 0.5 * (out + out.T)


_gram_pair = _gram_pair_kernel if USE_NUMBA else _gram_pair_numpy


def _log_norm(ells: np.ndarray) -> np.ndarray:
    # remaining multipole normalization 1/sqrt(l(l+1)) per factor side
    return -0.5 * np.log(ells * (ells + 1.0))


def _guarded_signs(mie: MieCoefficients, lmax: int):
    # the all-positive Gram assembly relies on positive electric and
    # negative magnetic amplitudes; verify where the magnitudes matter
    sl = slice(1, lmax + 1)
    for name, sign, logmag in (
        ("electric", mie.sign_e[sl], mie.log_e[sl]),
        ("magnetic", mie.sign_m[sl], mie.log_m[sl]),
    ):
        finite = np.isfinite(logmag)
        if not np.any(finite):
            continue
        cutoff = logmag[finite].max() - 120.0
        relevant = finite & (logmag > cutoff)
        expected = 1.0 if name == "electric" else -1.0
        if not np.all(sign[relevant] == expected):
            raise CasphereError(f"unexpected sign in {name} amplitudes")


class _XiContext:
    """Shared per-frequency tables reused across azimuthal orders."""

    def __init__(
        self,
        geometry: Geometry,
        sphere: MirrorSpec,
        plane: MirrorSpec,
        xi: float,
        lmax: int,
        n_quad: int,
    ):
        if xi <= 0.0:
            raise ValueError("xi must be positive; the zero mode has its own path")
        self.geometry = geometry
        self.xi = xi
        self.lmax = lmax
        self.n_quad = n_quad
        lc = geometry.center_distance
        t, log_w = _laguerre_nodes(n_quad)
        zeta = xi * lc / C_LIGHT
        kappa = xi / C_LIGHT + t / (2.0 * lc)
        du = t / (2.0 * zeta)
        u = 1.0 + du
        s = np.sqrt(du * (2.0 + du))
        # measure: (c/xi) dkappa exp(-2 kappa Lc)
        self.log_meas = log_w + math.log(C_LIGHT / xi) - math.log(2.0 * lc) - 2.0 * zeta
        r_te, r_tm = fresnel(plane, xi, kappa)
        with np.errstate(divide="ignore"):
            self.log_r_te = np.log(-r_te) if np.all(r_te <= 0.0) else None
            self.log_r_tm = np.log(r_tm) if np.all(r_tm >= 0.0) else None
        if self.log_r_te is None or self.log_r_tm is None:
            raise CasphereError("reflection coefficients changed sign unexpectedly")
        self.mie = mie_coefficients(sphere, geometry.radius, xi, lmax)
        _guarded_signs(self.mie, lmax)
        pi, tau, logs = angular_tables(lmax, u, s)
        self.pi = pi
        self.tau = tau
        self.logs = logs

    def block_matrix(self, m: int) -> np.ndarray:
        ma = abs(m)
        if ma > self.lmax:
            raise ValueError("need |m| <= lmax")
        lmin = max(ma, 1)
        ells = np.arange(lmin, self.lmax + 1)
        dim = ells.size
        log_norm = _log_norm(ells.astype(float))
        with np.errstate(divide="ignore"):
            log_pi = np.log(self.pi[ma, lmin:, :]) + self.logs[ma, lmin:, :]
            log_tau = np.log(self.tau[ma, lmin:, :]) + self.logs[ma, lmin:, :]
        half_e = 0.5 * self.mie.log_e[ells] + log_norm
        half_m = 0.5 * self.mie.log_m[ells] + log_norm
        half_tm = 0.5 * (self.log_meas + self.log_r_tm)
        half_te = 0.5 * (self.log_meas + self.log_r_te)
        f_tm = np.exp(
            np.vstack(
                [
                    half_e[:, None] + log_tau + half_tm[None, :],
                    half_m[:, None] + log_pi + half_tm[None, :],
                ]
            )
        )
        f_te = np.exp(
            np.vstack(
                [
                    half_e[:, None] + log_pi + half_te[None, :],
                    half_m[:, None] + log_tau + half_te[None, :],
                ]
            )
        )
        mat = _gram_pair(f_tm, f_te)
        if m < 0:
            mat = mat.copy()
            mat[:dim, dim:] *= -1.0
            mat[dim:, :dim] *= -1.0
        return mat


def assemble_block(
    geometry: Geometry,
    sphere: MirrorSpec,
    plane: MirrorSpec,
    xi: float,
    m: int,
    config: ComputeConfig | None = None,
) -> RoundTripBlock:
    """Build one (xi, m) round-trip block in the balanced multipole basis."""
    config = config or ComputeConfig()
    lmax = config.resolved_lmax(geometry)
    n_quad = config.resolved_n_quad(lmax)
    ctx = _XiContext(geometry, sphere, plane, xi, lmax, n_quad)
    return RoundTripBlock(xi=xi, m=m, lmax=lmax, matrix=ctx.block_matrix(m), n_quad=n_quad)


def _logdet_one_minus(mat: np.ndarray, xi: float, m: int) -> float:
    b = np.eye(mat.shape[0]) - mat
    try:
        cf, _ = sla.cho_factor(b, lower=True, check_finite=False)
    except sla.LinAlgError as exc:
        raise ConvergenceError(
            f"round-trip spectral radius >= 1 at xi={xi:.6e} rad/s, m={m}"
        ) from exc
    return 2.0 * float(np.sum(np.log(np.diag(cf))))


def logdet_block(block: RoundTripBlock) -> float:
    """log det(1 - M) for one block; negative for any physical setup."""
    return _logdet_one_minus(block.matrix, block.xi, block.m)


def _m_sum(per_m, lmax: int, rel_tol: float, mmax: int | None, xi: float, collect) -> float:
    # azimuthal sum with weight 1 for m = 0 and 2 for m >= 1, stopping once
    # two consecutive orders are negligible against the accumulated sum
    total = per_m(0)
    if collect is not None:
        collect.append((xi, 0, total))
    top = lmax if mmax is None else min(mmax, lmax)
    small = 0
    for m in range(1, top + 1):
        term = per_m(m)
        if collect is not None:
            collect.append((xi, m, term))
        total += 2.0 * term
        if abs(term) < 0.005 * rel_tol * max(abs(total), 1e-300):
            small += 1
            if small >= 2:
                break
        else:
            small = 0
    return total


def logdet_xi(
    geometry: Geometry,
    sphere: MirrorSpec,
    plane: MirrorSpec,
    xi: float,
    config: ComputeConfig | None = None,
    collect: list | None = None,
) -> float:
    """Azimuth-summed log det(1 - M) at one positive imaginary frequency.

    ``collect``, when given, receives one (xi, m, logdet) tuple per block.
    """
    config = config or ComputeConfig()
    lmax = config.resolved_lmax(geometry)
    n_quad = config.resolved_n_quad(lmax)
    ctx = _XiContext(geometry, sphere, plane, xi, lmax, n_quad)

    def per_m(m: int) -> float:
        return _logdet_one_minus(ctx.block_matrix(m), xi, m)

    return _m_sum(per_m, lmax, config.rel_tol, config.mmax, xi, collect)


def _log_angular_static(ells: np.ndarray, m: int) -> np.ndarray:
    # log of the large-argument angular strength per factor side:
    # N_lm l D_lm / sqrt(l(l+1)) with D_lm = (2l)! / (2^l l! (l-m)!)
    out = np.empty(ells.size)
    for idx, l in enumerate(ells):
        out[idx] = (
            0.5 * (math.log(2.0 * l + 1.0) + math.lgamma(l - m + 1.0) - math.lgamma(l + m + 1.0))
            + math.log(l)
            + math.lgamma(2.0 * l + 1.0)
            - l * math.log(2.0)
            - math.lgamma(l + 1.0)
            - math.lgamma(l - m + 1.0)
            - 0.5 * math.log(l * (l + 1.0))
        )
    return out


def logdet_static(
    geometry: Geometry,
    sphere: MirrorSpec,
    plane: MirrorSpec,
    config: ComputeConfig | None = None,
    collect: list | None = None,
) -> float:
    """Azimuth-summed log det(1 - M) of the zero-frequency round trip.

    In the static limit the electric and magnetic blocks decouple and the
    propagation reduces to moments of exp(-2 kappa Lc) against the static
    reflection coefficients; each block is again a Gram matrix.
    """
    config = config or ComputeConfig()
    lmax = config.resolved_lmax(geometry)
    n_quad = config.resolved_n_quad(lmax)
    lc = geometry.center_distance
    t, log_w = _laguerre_nodes(n_quad)
    kappa = t / (2.0 * lc)
    kappa[kappa == 0.0] = np.finfo(float).tiny
    log_kappa = np.log(kappa)
    r_te, r_tm = fresnel_static(plane, kappa)
    with np.errstate(divide="ignore"):
        log_r_te = np.log(-r_te)
        log_r_tm = np.log(r_tm)
    stat = mie_static(sphere, geometry.radius, lmax)
    if np.any(stat.sign_e[1:] < 0.0) or np.any(stat.sign_m[1:] > 0.0):
        raise CasphereError("unexpected sign in static amplitudes")
    base = log_w - math.log(2.0 * lc)

    def per_m(m: int) -> float:
        lmin = max(m, 1)
        ells = np.arange(lmin, lmax + 1)
        ang = _log_angular_static(ells.astype(float), m)
        radial = ells[:, None] * log_kappa[None, :]
        total = 0.0
        for logmag, log_r in ((stat.log_e[ells], log_r_tm), (stat.log_m[ells], log_r_te)):
            f = np.exp(0.5 * logmag[:, None] + ang[:, None] + radial + 0.5 * (base + log_r)[None, :])
            gram = f @ f.T
            total += _logdet_one_minus(0.5 * (gram + gram.T), 0.0, m)
        return total

    return _m_sum(per_m, lmax, config.rel_tol, config.mmax, 0.0, collect)
