"""Acceptance gate: one test per shipped guarantee, runnable end to end.

Each test prints as a single pass/fail line under ``pytest -v``.  The
checks pin the headline physics results (PFA correction slopes, thermal
window, dissipation ratio), the closed-form anchors, the independent
dipole-order oracles and the structural properties of the round trip.
"""

import io
import json
import math

import numpy as np
import pytest
from scipy.constants import c as C_LIGHT
from scipy.constants import hbar as HBAR

from casphere.analysis import (
    dissipation_ratio,
    dissipation_ratio_pfa,
    fit_beta,
    rho_series,
    theta_factor,
    theta_factor_pfa,
)
from casphere.materials import MirrorSpec
from casphere.pfa import f_alpha, ld_free_energy_perfect, phi_thermal, pp_energy_per_area
from casphere.roundtrip import (
    ComputeConfig,
    Geometry,
    assemble_block,
    logdet_block,
    logdet_static,
    logdet_xi,
    required_lmax,
)
from casphere.spectrum import energy_T0, entropy, force, free_energy

mp = pytest.importorskip("mpmath")

from test_roundtrip import _mp_dipole_block

PEC = MirrorSpec.perfect()
PLASMA = MirrorSpec.plasma(lambda_p=136e-9)
DRUDE = MirrorSpec.drude(lambda_p=136e-9, lambda_gamma=34e-6)


@pytest.fixture(scope="module")
def energy_rho_sweep():
    aspects = np.geomspace(0.05, 0.4, 20)
    return rho_series(1e-6, aspects, PEC, PEC, 0.0, "E")


def test_01_energy_slope_beta_e(energy_rho_sweep):
    fit = fit_beta(energy_rho_sweep)
    assert -1.62 <= fit.beta <= -1.32, f"beta_E = {fit.beta:.4f}"
    assert fit.stable


def test_02_pfa_always_overestimates(energy_rho_sweep):
    assert np.all(energy_rho_sweep.rho < 1.0), energy_rho_sweep.rho


def test_03_multipole_convergence_law():
    # the cutoff needed at L/R = 0.1 is about twice the one at L/R = 0.2
    req_01 = required_lmax(Geometry(1e-6, 0.1e-6))
    req_02 = required_lmax(Geometry(1e-6, 0.2e-6))
    assert 1.6 <= req_01 / req_02 <= 2.6
    geom = Geometry(1e-6, 0.2e-6)
    e20 = energy_T0(geom, PEC, PEC, ComputeConfig(lmax=20)).value
    e30 = energy_T0(geom, PEC, PEC, ComputeConfig(lmax=30)).value
    change = abs(e30 / e20 - 1.0)
    assert change < 1e-3, f"relative change 20 -> 30 is {change:.3e}"


def test_04_large_distance_anchor():
    radius = 1e-7
    errors = []
    for ratio in (10.0, 20.0, 50.0):
        center = ratio * radius
        exact = free_energy(Geometry(radius, center - radius), PEC, PEC, 300.0).value
        closed = ld_free_energy_perfect(radius, center, 300.0)
        errors.append(abs(exact / closed - 1.0))
    assert all(err < 0.05 for err in errors), errors
    assert errors[0] > errors[1] > errors[2]


def test_05_plasma_gradient_slope_beta_g():
    aspects = np.geomspace(0.1, 0.8, 16)
    series = rho_series(1e-7, aspects, PLASMA, PLASMA, 0.0, "G")
    fit = fit_beta(series)
    assert -0.25 <= fit.beta <= -0.15, f"beta_G = {fit.beta:.4f}"
    assert abs(fit.beta) <= 0.4
    # the series turns concave: its divided-difference curvature changes sign
    x, r = series.x, series.rho
    slopes_hi = (r[2:] - r[1:-1]) / (x[2:] - x[1:-1])
    slopes_lo = (r[1:-1] - r[:-2]) / (x[1:-1] - x[:-2])
    curv = 2.0 * (slopes_hi - slopes_lo) / (x[2:] - x[:-2])
    assert np.min(curv) < 0.0 < np.max(curv)


def test_06_thermal_window_and_negative_entropy():
    gaps = (0.5e-6, 1e-6, 2e-6)
    theta_pfa = [theta_factor_pfa(PEC, PEC, gap, 300.0) for gap in gaps]
    for radius in (0.1e-6, 0.5e-6, 1e-6):
        thetas = [
            theta_factor(Geometry(radius, gap), PEC, PEC, 300.0) for gap in gaps
        ]
        assert any(t < 1.0 for t in thetas), (radius, thetas)
        assert all(t <= tp for t, tp in zip(thetas, theta_pfa)), (radius, thetas)
        s = entropy(Geometry(radius, 0.5e-6), PEC, PEC, 300.0).value
        assert s < 0.0, (radius, s)


def test_07_dissipation_ratio_reaches_plasma_factor():
    for gap in (20e-6, 25e-6):
        ratio_pp = dissipation_ratio_pfa(300.0, PLASMA, DRUDE, gap)
        assert ratio_pp == pytest.approx(2.0, rel=0.03), (gap, ratio_pp)
    for radius in (0.1e-6, 0.5e-6):
        geom = Geometry(radius, 20e-6)
        ratio_sp = dissipation_ratio(geom, 300.0, PLASMA, DRUDE)
        alpha = radius * PLASMA.omega_p / C_LIGHT
        assert ratio_sp == pytest.approx(f_alpha(alpha), rel=0.03), (radius, ratio_sp)
    grid = np.geomspace(0.05, 50.0, 20)
    vals = [f_alpha(a) for a in grid]
    assert all(1.0 < v < 1.5 for v in vals)
    assert all(lo < hi for lo, hi in zip(vals, vals[1:]))


def test_08_closed_form_anchors():
    gap = 1e-6
    ref = -math.pi**2 * HBAR * C_LIGHT / (720.0 * gap**3)
    assert pp_energy_per_area(PEC, PEC, gap, 0.0) == pytest.approx(ref, rel=1e-6)
    assert 1e-6 * phi_thermal(1e-6) == pytest.approx(1.5, abs=1e-8)
    assert phi_thermal(40.0) == pytest.approx(0.5, abs=1e-8)
    assert f_alpha(1e-9) == pytest.approx(1.0, abs=1e-8)
    assert f_alpha(1e9) == pytest.approx(1.5, abs=1e-8)


def test_09_dipole_order_oracles():
    rng = np.random.default_rng(20260816)
    mirrors = [PEC, PLASMA, DRUDE]
    for _ in range(10):
        radius = 10.0 ** rng.uniform(math.log10(50e-9), math.log10(2e-6))
        gap = radius * 10.0 ** rng.uniform(math.log10(0.5), math.log10(20.0))
        center = radius + gap
        xi = 10.0 ** rng.uniform(math.log10(0.1), math.log10(3.0)) * C_LIGHT / center
        sphere = mirrors[rng.integers(3)]
        plane = mirrors[rng.integers(3)]
        ee, mm = _mp_dipole_block(radius, gap, xi, sphere, plane)
        blk = assemble_block(Geometry(radius, gap), sphere, plane, xi, 0,
                             ComputeConfig(lmax=1))
        diag = blk.matrix.diagonal()
        assert diag[0] == pytest.approx(ee, rel=1e-8), (radius, gap, xi)
        assert diag[1] == pytest.approx(mm, rel=1e-8), (radius, gap, xi)
    analytic = _analytic_dipole_force(0.2e-6, 1e-6)
    numeric = force(Geometry(0.2e-6, 1e-6), PEC, PEC, 0.0, ComputeConfig(lmax=1)).value
    assert numeric == pytest.approx(analytic, rel=1e-5)


def test_10_property_suite(capsys):
    # magnitude falls with separation
    mags = [
        abs(energy_T0(Geometry(0.2e-6, gap), PEC, PEC).value)
        for gap in (0.2e-6, 0.4e-6, 0.8e-6, 1.6e-6)
    ]
    assert all(hi > lo for hi, lo in zip(mags, mags[1:]))
    # every sampled log det is nonpositive
    rng = np.random.default_rng(11)
    cfg = ComputeConfig(lmax=12)
    for _ in range(5):
        radius = 10.0 ** rng.uniform(-7.0, -6.0)
        geom = Geometry(radius, radius * 10.0 ** rng.uniform(-0.5, 0.5))
        xi = 10.0 ** rng.uniform(-0.5, 0.5) * C_LIGHT / geom.center_distance
        assert logdet_xi(geom, PLASMA, PLASMA, xi, cfg) <= 0.0
    assert logdet_static(Geometry(5e-7, 5e-7), PEC, PEC, cfg) <= 0.0
    assert logdet_static(Geometry(5e-7, 5e-7), DRUDE, DRUDE, cfg) <= 0.0
    # +m and -m blocks carry the same spectrum
    geom = Geometry(5e-7, 4e-7)
    xi = C_LIGHT / geom.center_distance
    for m in (1, 2):
        plus = assemble_block(geom, PLASMA, DRUDE, xi, m, cfg)
        minus = assemble_block(geom, PLASMA, DRUDE, xi, -m, cfg)
        assert logdet_block(minus) == pytest.approx(logdet_block(plus), rel=1e-12)
    # byte-identical reruns of the same command
    from casphere.cli import main

    argv = ["sweep", "--quantity", "energy", "--R", "0.2um",
            "--L", "0.4:0.8um:log4", "--lmax", "4"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    second = capsys.readouterr().out
    assert first == second and first != ""


def _analytic_dipole_force(radius, gap, dps=20):
    """dF/dL at dipole order for ideal mirrors, by exact kappa moments.

    The m = 0 block is diagonal and the |m| = 1 block is a full 2x2; every
    entry is a polynomial moment of exp(-2 kappa Lc) over kappa >= xi/c,
    so the separation derivative and the frequency integral need no
    numerical differentiation.
    """
    c = C_LIGHT

    def mp_i(l, y):
        return mp.sqrt(mp.pi / (2 * y)) * mp.besseli(l + mp.mpf(1) / 2, y)

    def mp_k(l, y):
        return mp.sqrt(2 / (mp.pi * y)) * mp.besselk(l + mp.mpf(1) / 2, y) * mp.pi / 2

    def dipole_pec(rm, xi):
        z = mp.mpf(xi) * rm / c
        sl = lambda y: y * mp_i(1, y)
        cl = lambda y: (2 / mp.pi) * y * mp_k(1, y)
        ls = mp.diff(lambda t: mp.log(sl(t)), z)
        lc = mp.diff(lambda t: mp.log(cl(t)), z)
        pref = sl(z) / cl(z)
        return -pref * ls / lc, -pref

    def kappa_moments(a, beta, pmax):
        out = []
        eab = mp.e ** (-beta * a)
        for p in range(pmax + 1):
            s = sum((beta * a) ** j / mp.factorial(j) for j in range(p + 1))
            out.append(mp.factorial(p) / beta ** (p + 1) * eab * s)
        return out

    def lndet_deriv(rm, lm, xi):
        center = rm + lm
        te, tm = dipole_pec(rm, xi)
        a_te, a_tm = abs(te), abs(tm)
        a = xi / c
        mom = kappa_moments(a, 2 * center, 3)
        cx = c / xi

        def q_int(c0, c1, c2, d_l):
            if not d_l:
                return c0 * mom[0] + c1 * cx * mom[1] + c2 * cx * cx * mom[2]
            return -2 * (c0 * mom[1] + c1 * cx * mom[2] + c2 * cx * cx * mom[3])

        th = mp.mpf(3) / 2
        ee0 = a_te * cx * q_int(-th, 0, th, 0)
        mm0 = a_tm * cx * q_int(-th, 0, th, 0)
        dee0 = a_te * cx * q_int(-th, 0, th, 1)
        dmm0 = a_tm * cx * q_int(-th, 0, th, 1)
        dln0 = -dee0 / (1 - ee0) - dmm0 / (1 - mm0)
        tq = mp.mpf(3) / 4
        ee1 = a_te * cx * q_int(tq, 0, tq, 0)
        mm1 = a_tm * cx * q_int(tq, 0, tq, 0)
        em1 = mp.sqrt(a_te * a_tm) * cx * q_int(0, 2 * tq, 0, 0)
        dee1 = a_te * cx * q_int(tq, 0, tq, 1)
        dmm1 = a_tm * cx * q_int(tq, 0, tq, 1)
        dem1 = mp.sqrt(a_te * a_tm) * cx * q_int(0, 2 * tq, 0, 1)
        det1 = (1 - ee1) * (1 - mm1) - em1 * em1
        ddet = -dee1 * (1 - mm1) - (1 - ee1) * dmm1 - 2 * em1 * dem1
        return dln0 + 2 * ddet / det1

    with mp.workdps(dps):
        scale = c / (2 * mp.mpf(gap))

        def integrand(t):
            return lndet_deriv(mp.mpf(radius), mp.mpf(gap), t * scale)

        pts = [mp.mpf("1e-8"), mp.mpf(1), mp.mpf(5), mp.mpf(20), mp.mpf(60)]
        return float(HBAR / (2 * mp.pi) * scale * mp.quad(integrand, pts, maxdegree=6))
