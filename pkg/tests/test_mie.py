"""Sphere scattering amplitudes: frozen oracle values, limits, static forms."""

import math

import numpy as np
import pytest
from scipy.constants import c as C_LIGHT

from casphere.materials import MirrorSpec
from casphere.mie import log_double_factorial, mie_coefficients, mie_static

# (l, x, eps or None for perfect, sign_e, log|T_e|, sign_m, log|T_m|).
# Frozen from a 40-digit evaluation of the Riccati log-derivative forms;
# eps is realized as a plasma mirror with omega_p = xi sqrt(eps - 1).
_MIE_ORACLE = [
    (1, 0.5, None, 1, -2.495090773484951, -1, -3.0586075686956792),
    (3, 2.0, None, 1, -1.7415866144497379, -1, -1.9278090591567593),
    (10, 0.1, None, 1, -91.902495936057254, -1, -91.997793011520111),
    (2, 30.0, None, 1, 59.10707400568433, -1, 59.106853264942693),
    (1, 0.5, 10.0, 1, -2.8152643818170243, -1, -5.2209152702087683),
    (4, 1.5, 100.0, 1, -7.4754281548419222, -1, -8.2431710421586128),
    (2, 5.0, 2.5, 1, 6.7929498606339634, -1, 6.4536362814205368),
    (1, 1e-3, 1e6, 1, -21.128734536176135, -1, -24.620497141503206),
]


def _mirror_for(x: float, eps):
    if eps is None:
        return MirrorSpec.perfect()
    xi = x * C_LIGHT
    return MirrorSpec.plasma(omega_p=xi * math.sqrt(eps - 1.0))


def test_against_oracle():
    for l, x, eps, se, le, sm, lm in _MIE_ORACLE:
        mc = mie_coefficients(_mirror_for(x, eps), 1.0, x * C_LIGHT, l)
        assert mc.sign_e[l] == se and mc.sign_m[l] == sm, (l, x, eps)
        assert abs(mc.log_e[l] - le) < 1e-10, (l, x, eps)
        assert abs(mc.log_m[l] - lm) < 1e-10, (l, x, eps)


def test_small_x_dipole_limits():
    # electric 2x^3/3, magnetic -x^3/3, ratio -> -2
    x = 1e-4
    mc = mie_coefficients(MirrorSpec.perfect(), 1.0, x * C_LIGHT, 1)
    assert mc.sign_e[1] == 1.0 and mc.sign_m[1] == -1.0
    assert math.exp(mc.log_e[1]) / x**3 == pytest.approx(2.0 / 3.0, rel=1e-6)
    assert math.exp(mc.log_m[1]) / x**3 == pytest.approx(1.0 / 3.0, rel=1e-6)
    ratio = mc.sign_e[1] * math.exp(mc.log_e[1]) / (mc.sign_m[1] * math.exp(mc.log_m[1]))
    assert ratio == pytest.approx(-2.0, rel=1e-7)


def test_radius_scaling():
    # T_l depends on radius only through x = xi R / c
    xi = 3e14
    a = mie_coefficients(MirrorSpec.perfect(), 1e-6, xi, 5)
    b = mie_coefficients(MirrorSpec.perfect(), 2e-6, 0.5 * xi, 5)
    assert np.allclose(a.log_e[1:], b.log_e[1:], rtol=0, atol=1e-12)
    assert a.x == b.x


def _plasma_pec_sup(alpha: float) -> float:
    radius = 1.0
    omega_p = alpha * C_LIGHT / radius
    sup = 0.0
    for x in (0.5, 1.0):
        xi = x * C_LIGHT
        pl = mie_coefficients(MirrorSpec.plasma(omega_p=omega_p), radius, xi, 20)
        pe = mie_coefficients(MirrorSpec.perfect(), radius, xi, 20)
        assert np.all(pl.sign_e[1:] == pe.sign_e[1:])
        assert np.all(pl.sign_m[1:] == pe.sign_m[1:])
        for log_pl, log_pe in ((pl.log_e, pe.log_e), (pl.log_m, pe.log_m)):
            diff = np.abs(np.exp(log_pl[1:]) - np.exp(log_pe[1:]))
            sup = max(sup, float(np.max(diff)))
            # per-l relative deviation shrinks like (2l+1) c / (omega_p R),
            # so the low multipoles must already sit inside the bound
            rel = np.abs(np.expm1(log_pl[1:4] - log_pe[1:4]))
            assert np.all(rel < 3.0 * (2.0 * np.arange(1, 4) + 1.0) / alpha), x
    return sup


def test_plasma_reaches_perfect_mirror():
    sup4 = _plasma_pec_sup(1e4)
    assert sup4 < 1e-3
    # the gap closes linearly in c / (omega_p R)
    assert _plasma_pec_sup(1e5) < 0.2 * sup4


def test_drude_tracks_plasma_at_low_loss():
    xi = 2e15
    pl = mie_coefficients(MirrorSpec.plasma(omega_p=1e16), 1e-6, xi, 10)
    dr = mie_coefficients(MirrorSpec.drude(omega_p=1e16, gamma=1e-6 * 1e16), 1e-6, xi, 10)
    assert np.max(np.abs(np.expm1(dr.log_e[1:] - pl.log_e[1:]))) < 1e-4
    assert np.max(np.abs(np.expm1(dr.log_m[1:] - pl.log_m[1:]))) < 1e-4


def test_static_perfect():
    radius = 0.3e-6
    ms = mie_static(MirrorSpec.perfect(), radius, 6)
    for l in range(1, 7):
        # electric (l+1)/l and magnetic 1 over (2l+1)!!(2l-1)!!, R^(2l+1)
        base = -(log_double_factorial(2 * l + 1) + log_double_factorial(2 * l - 1))
        want_e = math.log((l + 1.0) / l) + base + (2 * l + 1) * math.log(radius)
        assert ms.sign_e[l] == 1.0 and ms.sign_m[l] == -1.0
        assert ms.log_e[l] == pytest.approx(want_e, abs=1e-12)
        assert ms.log_e[l] - ms.log_m[l] == pytest.approx(math.log((l + 1.0) / l), abs=1e-12)


def test_static_plasma_screening():
    radius = 1e-6
    # alpha -> 0: magnetic dipole strength falls as alpha^2 R^3 / 45
    alpha = 1e-3
    ms = mie_static(MirrorSpec.plasma(omega_p=alpha * C_LIGHT / radius), radius, 3)
    assert ms.sign_m[1] == -1.0
    want = math.log(alpha**2 / 45.0) + 3.0 * math.log(radius)
    assert ms.log_m[1] == pytest.approx(want, abs=1e-5)
    # alpha -> inf: ideal-conductor value recovered
    big = mie_static(MirrorSpec.plasma(omega_p=1e4 * C_LIGHT / radius), radius, 3)
    pec = mie_static(MirrorSpec.perfect(), radius, 3)
    assert np.max(np.abs(np.expm1(big.log_m[1:] - pec.log_m[1:]))) < 1e-3
    # electric strength saturates for any metal
    assert np.allclose(ms.log_e[1:], pec.log_e[1:], rtol=0, atol=1e-12)


def test_static_drude_no_magnetic():
    ms = mie_static(MirrorSpec.drude(omega_p=1e16, gamma=1e13), 1e-6, 4)
    assert np.all(ms.sign_m[1:] == 0.0)
    assert np.all(np.isneginf(ms.log_m[1:]))
    assert np.all(ms.sign_e[1:] == 1.0)


def test_input_validation():
    with pytest.raises(ValueError):
        mie_coefficients(MirrorSpec.perfect(), 1.0, 0.0, 3)
    with pytest.raises(ValueError):
        mie_coefficients(MirrorSpec.perfect(), -1.0, 1e14, 3)
    with pytest.raises(ValueError):
        mie_static(MirrorSpec.perfect(), 0.0, 3)
