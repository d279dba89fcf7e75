r"""Beyond-PFA correction factors and their quadratic extrapolation.

The central object is the series rho(x) = exact / PFA over the aspect
ratio x = L/R for one of the quantities E, F, G.  Since rho(0) = 1 by
construction, the leading corrections are extracted from the constrained
quadratic model

    rho(x) = 1 + beta x + gamma x^2,

fitted by least squares on a window of small x.  The module also provides
the thermal correction factor theta = F(T)/F(0) and the plasma-over-Drude
force ratio used to quantify the role of dissipation.
"""

import math
from dataclasses import dataclass

import numpy as np

from .materials import MirrorSpec
from .pfa import pfa_energy, pfa_force, pfa_gradient, pp_energy_per_area
from .roundtrip import CasphereError, ComputeConfig, Geometry
from .spectrum import energy_T0, force, force_gradient, free_energy

__all__ = [
    "RhoSeries",
    "BetaFit",
    "fit_beta",
    "rho",
    "rho_series",
    "min_trusted_aspect",
    "theta_factor",
    "theta_factor_pfa",
    "dissipation_ratio",
    "dissipation_ratio_pfa",
]

_QUANTITIES = ("E", "F", "G")


@dataclass(frozen=True)
class RhoSeries:
    """Correction factors rho = exact/PFA over ascending aspect ratios x = L/R."""

    x: np.ndarray
    rho: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in _QUANTITIES:
            raise ValueError(f"kind must be one of {_QUANTITIES}")
        x = np.asarray(self.x, dtype=float)
        r = np.asarray(self.rho, dtype=float)
        if x.ndim != 1 or x.shape != r.shape:
            raise ValueError("x and rho must be matching 1-d arrays")
        if np.any(x <= 0.0) or np.any(np.diff(x) <= 0.0):
            raise ValueError("x must be positive and strictly increasing")
        if np.any(r <= 0.0):
            raise ValueError("rho must be positive")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "rho", r)


@dataclass(frozen=True)
class BetaFit:
    """Constrained quadratic fit rho = 1 + beta x + gamma x^2 on a window.

    ``sensitivity`` is the slope refitted on a window shrunk by 25% from
    the top; ``stable`` records whether halving the window moves beta by
    less than 10%.
    """

    beta: float
    gamma_curv: float
    window: tuple
    residual: float
    sensitivity: float
    stable: bool
    n_points: int


def min_trusted_aspect(lmax: int) -> float:
    """Smallest aspect ratio resolved by a multipole cutoff lmax.

    Inverts the cutoff rule lmax = 10 + 7/x.
    """
    if lmax <= 10:
        raise ValueError("need lmax > 10")
    return 7.0 / (lmax - 10.0)


def _constrained_quadratic(x: np.ndarray, r: np.ndarray):
    # least squares for rho - 1 = beta x + gamma x^2
    design = np.column_stack([x, x * x])
    coef, _, rank, _ = np.linalg.lstsq(design, r - 1.0, rcond=None)
    if rank < 2:
        raise CasphereError("degenerate fit system: aspect ratios collinear in x^2")
    resid = design @ coef - (r - 1.0)
    return float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(resid**2)))


def fit_beta(series: RhoSeries, window: tuple | None = None) -> BetaFit:
    """Extract the leading PFA correction slope on an aspect-ratio window.

    The slope at x = 0 is what the quadratic is for, so the default window
    keeps the leftmost points: from x_min up to the logarithmic midpoint of
    the series, never beyond x = 0.4.  A wide window lets the cubic tail
    bias the extracted slope; the stability flag catches that.  At least
    four points must fall inside the window.
    """
    if window is None:
        x_lo = float(series.x.min())
        x_hi = float(series.x.max())
        hi = min(math.sqrt(x_lo * x_hi), 0.4)
        if series.x.size >= 4:
            hi = max(hi, float(np.sort(series.x)[3]))
        window = (x_lo, hi)
    lo, hi = window
    mask = (series.x >= lo) & (series.x <= hi)
    if int(mask.sum()) < 4:
        raise CasphereError(f"need at least 4 points in window [{lo}, {hi}]")
    x = series.x[mask]
    r = series.rho[mask]
    beta, gamma, resid = _constrained_quadratic(x, r)

    def refit(scale: float) -> float:
        cap = lo + scale * (hi - lo)
        sub = (x >= lo) & (x <= cap)
        if int(sub.sum()) < 4:
            return beta
        b, _, _ = _constrained_quadratic(x[sub], r[sub])
        return b

    sens = refit(0.75)
    half = refit(0.5)
    stable = abs(half - beta) < 0.1 * abs(beta) if beta != 0.0 else True
    return BetaFit(
        beta=beta,
        gamma_curv=gamma,
        window=(lo, hi),
        residual=resid,
        sensitivity=sens,
        stable=stable,
        n_points=int(mask.sum()),
    )


def rho(exact_value: float, pfa_value: float) -> float:
    """Correction factor exact/PFA; both inputs must share sign."""
    if pfa_value == 0.0:
        raise CasphereError("PFA value vanishes; no correction factor")
    ratio = exact_value / pfa_value
    if ratio <= 0.0:
        raise CasphereError("exact and PFA values disagree in sign")
    return ratio


def _exact_value(kind, geometry, sphere, plane, temperature, config):
    if kind == "E":
        if temperature == 0.0:
            return energy_T0(geometry, sphere, plane, config).value
        return free_energy(geometry, sphere, plane, temperature, config).value
    if kind == "F":
        return force(geometry, sphere, plane, temperature, config).value
    return force_gradient(geometry, sphere, plane, temperature, config).value


def _pfa_value(kind, geometry, sphere, plane, temperature):
    if kind == "E":
        return pfa_energy(sphere, plane, geometry.radius, geometry.separation, temperature)
    if kind == "F":
        return pfa_force(sphere, plane, geometry.radius, geometry.separation, temperature)
    return pfa_gradient(sphere, plane, geometry.radius, geometry.separation, temperature)


def rho_series(
    radius: float,
    aspects: np.ndarray,
    sphere: MirrorSpec,
    plane: MirrorSpec,
    temperature: float,
    kind: str = "E",
    config: ComputeConfig | None = None,
) -> RhoSeries:
    """Compute rho(x) = exact/PFA over aspect ratios x = L/R."""
    config = config or ComputeConfig()
    aspects = np.sort(np.asarray(aspects, dtype=float))
    rhos = np.empty_like(aspects)
    for i, x in enumerate(aspects):
        geom = Geometry(radius, x * radius)
        exact = _exact_value(kind, geom, sphere, plane, temperature, config)
        approx = _pfa_value(kind, geom, sphere, plane, temperature)
        rhos[i] = rho(exact, approx)
    return RhoSeries(x=aspects, rho=rhos, kind=kind)


def theta_factor(
    geometry: Geometry,
    sphere: MirrorSpec,
    plane: MirrorSpec,
    temperature: float,
    config: ComputeConfig | None = None,
) -> float:
    """Thermal correction factor theta = F(T)/F(0) for the force."""
    config = config or ComputeConfig()
    f_t = force(geometry, sphere, plane, temperature, config).value
    f_0 = force(geometry, sphere, plane, 0.0, config).value
    return f_t / f_0


def theta_factor_pfa(
    sphere: MirrorSpec,
    plane: MirrorSpec,
    gap: float,
    temperature: float,
) -> float:
    """Proximity counterpart of theta, from the force mapping."""
    e_t = pp_energy_per_area(sphere, plane, gap, temperature)
    e_0 = pp_energy_per_area(sphere, plane, gap, 0.0)
    return e_t / e_0


def dissipation_ratio(
    geometry: Geometry,
    temperature: float,
    plasma_spec: MirrorSpec,
    drude_spec: MirrorSpec,
    config: ComputeConfig | None = None,
    separation: float | None = None,
) -> float:
    """Sphere-plane force ratio F_plasma / F_drude at one separation.

    Both mirrors dress the sphere and the plane alike; the two specs must
    share the plasma frequency so the ratio isolates dissipation.
    """
    if plasma_spec.kind != "plasma" or drude_spec.kind != "drude":
        raise ValueError("expected a plasma spec and a drude spec")
    if not math.isclose(plasma_spec.omega_p, drude_spec.omega_p, rel_tol=1e-12):
        raise ValueError("specs must share the plasma frequency")
    config = config or ComputeConfig()
    if separation is not None:
        geometry = Geometry(geometry.radius, separation)
    f_plasma = force(geometry, plasma_spec, plasma_spec, temperature, config).value
    f_drude = force(geometry, drude_spec, drude_spec, temperature, config).value
    return f_plasma / f_drude


def dissipation_ratio_pfa(
    temperature: float,
    plasma_spec: MirrorSpec,
    drude_spec: MirrorSpec,
    gap: float,
) -> float:
    """Plane-plane mapped force ratio; approaches 2 at large separation."""
    e_plasma = pp_energy_per_area(plasma_spec, plasma_spec, gap, temperature)
    e_drude = pp_energy_per_area(drude_spec, drude_spec, gap, temperature)
    return e_plasma / e_drude
