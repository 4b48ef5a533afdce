import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from surftrap import _kernels
from surftrap.constants import CODATA, SurfaceMaterial, rb87_default
from surftrap.errors import DomainError, SubcriticalAngle
from surftrap.potentials import (Z_FLOOR, EvanescentBeam, MagneticTrap, TrapConfiguration,
                                 check_evanescent, dipole_u0, grad_total, mean_detuning,
                                 peak_intensity, penetration_depth, tir_enhancement, u_cp,
                                 u_terms, u_total)


def test_penetration_depth_reference():
    beam = EvanescentBeam()
    k = 2 * math.pi / beam.wavelength
    oracle = 1.0 / (k * math.sqrt(1.5 ** 2 * math.sin(math.radians(47.5)) ** 2 - 1))
    got = penetration_depth(beam, SurfaceMaterial())
    assert got == pytest.approx(oracle, rel=1e-12)
    assert got == pytest.approx(257.8e-9, abs=0.1e-9)
    assert penetration_depth(beam, SurfaceMaterial(n_index=1.52)) == pytest.approx(243e-9, rel=0.01)


def test_subcritical_angle_rejected():
    beam = EvanescentBeam(angle=math.radians(30))
    with pytest.raises(SubcriticalAngle):
        check_evanescent(beam, SurfaceMaterial())
    with pytest.raises(SubcriticalAngle):
        TrapConfiguration(rb87_default(), SurfaceMaterial(), beam, MagneticTrap())
    TrapConfiguration(rb87_default(), SurfaceMaterial(), beam, MagneticTrap(), ew_enabled=False)


def test_tir_enhancement_te():
    n, th = 1.5, math.radians(47.5)
    te = tir_enhancement(EvanescentBeam(), SurfaceMaterial())
    assert te == pytest.approx(4 * n * n * math.cos(th) ** 2 / (n * n - 1), rel=1e-12)
    assert tir_enhancement(EvanescentBeam(enhancement_override=4.0), SurfaceMaterial()) == 4.0


def test_blue_detuning_gives_repulsive_u0():
    beam, sp, s = EvanescentBeam(), rb87_default(), SurfaceMaterial()
    assert mean_detuning(beam, sp) > 0
    u0 = dipole_u0(beam, sp, s)
    i0 = peak_intensity(beam, s)
    c, g = CODATA.c, sp.gamma
    w1 = 2 * math.pi * c / sp.lambda_d1
    w2 = 2 * math.pi * c / sp.lambda_d2
    wl = 2 * math.pi * c / beam.wavelength
    w0 = 0.5 * (w1 + w2)
    ref = math.pi * c * c * g / (2 * w0 ** 3) * i0 / (wl - w0)
    assert u0 > 0
    assert u0 == pytest.approx(ref, rel=0.02)


def test_u_cp_domain():
    with pytest.raises(DomainError):
        u_cp(0.5 * Z_FLOOR, 1e-55)
    assert u_cp(1e-6, 1e-55) == pytest.approx(-1e-55 / 1e-24)


@settings(max_examples=60, deadline=None)
@given(x=st.floats(-100e-6, 100e-6), y=st.floats(-100e-6, 100e-6), z=st.floats(2e-9, 40e-6))
def test_total_is_sum_of_terms(fig2, x, y, z):
    terms = u_terms(x, y, z, fig2)
    total = float(u_total(x, y, z, fig2))
    s = terms["cp"] + terms["ew"] + terms["magn"] + terms["g"]
    assert total == pytest.approx(float(s), rel=1e-12, abs=1e-40)


@settings(max_examples=30, deadline=None)
@given(x=st.floats(-80e-6, 80e-6), z=st.floats(50e-9, 20e-6))
def test_gradient_matches_finite_difference(fig2, x, z):
    g = grad_total(x, 0.0, z, fig2)
    hx, hz = 1e-9, 1e-11 * max(z / 1e-7, 1)
    fx = (u_total(x + hx, 0, z, fig2) - u_total(x - hx, 0, z, fig2)) / (2 * hx)
    fz = (u_total(x, 0, z + hz, fig2) - u_total(x, 0, z - hz, fig2)) / (2 * hz)
    scale = abs(fig2.species.mass * fig2.consts.g_accel) * 10
    assert abs(float(g[0]) - float(fx)) < 1e-4 * scale + 1e-4 * abs(float(fx))
    assert abs(float(g[2]) - float(fz)) < 1e-4 * scale + 1e-4 * abs(float(fz))


def test_gravity_sign_lowers_potential_toward_surface(fig2):
    t = u_terms(0, 0, np.array([1e-6, 2e-6]), fig2)
    assert t["g"][1] < t["g"][0]


@pytest.mark.skipif(not _kernels.HAS_NUMBA, reason="numba not installed")
def test_numba_and_numpy_paths_agree(fig2):
    p = fig2.params()
    rng = np.random.default_rng(3)
    x, y = rng.uniform(-1e-4, 1e-4, (2, 5000))
    z = rng.uniform(2e-9, 3e-5, 5000)
    a = _kernels.potential_points(x, y, z, p, use_numba=True)
    b = _kernels.potential_points(x, y, z, p, use_numba=False)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=0)
    xs, ys, zs = np.linspace(-1e-4, 1e-4, 17), np.linspace(-1e-4, 1e-4, 9), np.linspace(1e-8, 1e-5, 33)
    ga = _kernels.potential_grid(xs, ys, zs, p, use_numba=True)
    gb = _kernels.potential_grid(xs, ys, zs, p, use_numba=False)
    np.testing.assert_allclose(ga, gb, rtol=1e-13)
    mask = ga < np.median(ga)
    ea = _kernels.excess_sum(ga, mask, float(np.median(ga)), use_numba=True)
    eb = _kernels.excess_sum(ga, mask, float(np.median(ga)), use_numba=False)
    assert ea == pytest.approx(eb, rel=1e-12)


def test_grazing_limit_penetration_depth():
    beam = EvanescentBeam(angle=math.pi / 2)
    assert penetration_depth(beam, SurfaceMaterial()) == pytest.approx(108.9e-9, abs=0.1e-9)
