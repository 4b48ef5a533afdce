import numpy as np
import pytest

from surftrap.errors import InsufficientData
from surftrap.landscape import (SweepRecord, analyze_landscape, find_minimum_on_axis,
                                fit_two_regimes, locate_saddle, sweep_z0)
from surftrap.potentials import u_total


def dense_axis_oracle(cfg, lo, hi, n=2_000_001):
    z = np.geomspace(lo, hi, n)
    u = u_total(0.0, 0.0, z, cfg)
    imin = int(np.argmin(np.where(z > 500e-9, u, np.inf)))
    ibar = int(np.argmax(np.where(z < z[imin], u, -np.inf)))
    return z[imin], u[imin], z[ibar], u[ibar]


def saddle_stencil_oracle(cfg, rep):
    """Grid point where |grad U| is locally smallest and the Hessian is indefinite."""
    xs = np.linspace(20e-6, 150e-6, 1301)
    zs = np.linspace(0.3 * rep.z_barrier, 3.0 * rep.z_barrier, 1201)
    u = u_total(xs[:, None], 0.0, zs[None, :], cfg)
    ux, uz = np.gradient(u, xs, zs)
    uxx = np.gradient(ux, xs, axis=0)
    uzz = np.gradient(uz, zs, axis=1)
    uxz = np.gradient(ux, zs, axis=1)
    g2 = (ux / np.abs(ux).max()) ** 2 + (uz / np.abs(uz).max()) ** 2
    g2 = np.where(uxx * uzz - uxz ** 2 < 0, g2, np.inf)
    g2[[0, -1], :] = np.inf
    g2[:, [0, -1]] = np.inf
    i, k = np.unravel_index(np.argmin(g2), g2.shape)
    return xs[i], zs[k], u[i, k]


def test_minimum_and_barrier_match_dense_grid(fig2):
    rep = find_minimum_on_axis(fig2)
    zmin, umin, zbar, ubar = dense_axis_oracle(fig2, 1e-9, 60e-6)
    assert rep.has_trap
    assert rep.z_min == pytest.approx(zmin, rel=1e-4)
    assert rep.u_min <= umin
    assert rep.u_min == pytest.approx(umin, rel=1e-8)
    assert rep.z_barrier == pytest.approx(zbar, rel=1e-4)
    assert rep.u_barrier >= ubar
    assert rep.u_barrier == pytest.approx(ubar, rel=1e-8)
    assert 100e-9 <= rep.z_barrier <= 500e-9


def test_saddle_matches_stencil_oracle(fig2):
    rep = analyze_landscape(fig2)
    xs, zs, us = saddle_stencil_oracle(fig2, rep)
    s = locate_saddle(fig2, report=find_minimum_on_axis(fig2))
    assert s.x == pytest.approx(xs, abs=1e-6)
    assert s.z == pytest.approx(zs, rel=0.01)
    assert s.energy == pytest.approx(us, rel=1e-4)
    assert abs(rep.saddle_x - 70e-6) <= 15e-6
    assert rep.trap_depth == pytest.approx(min(rep.barrier_height, rep.u_saddle - rep.u_min))


def test_gradient_vanishes_at_saddle(fig2):
    from surftrap.potentials import grad_total
    rep = analyze_landscape(fig2)
    g = grad_total(rep.saddle_x, 0.0, rep.saddle_z, fig2)
    scale = fig2.species.mass * fig2.consts.g_accel
    assert abs(float(g[0])) < 1e-3 * scale
    assert abs(float(g[2])) < 1e-3 * scale


def test_far_trap_has_infinite_depth_without_surface(harmonic_cfg):
    rep = analyze_landscape(harmonic_cfg)
    assert rep.has_trap and rep.z_barrier is None and rep.trap_depth == np.inf
    assert rep.z_min == pytest.approx(harmonic_cfg.magnet.z0 + harmonic_cfg.sag, rel=1e-6)


def test_sweep_parallel_is_identical(fig2):
    z0 = np.linspace(10e-6, -20e-6, 13)
    assert sweep_z0(fig2, z0, workers=1) == sweep_z0(fig2, z0, workers=4)


def test_sweep_requires_monotone(fig2):
    with pytest.raises(ValueError):
        sweep_z0(fig2, [0.0, 1e-6, -1e-6])


def test_two_regimes(fig2):
    recs = sweep_z0(fig2, np.linspace(40e-6, -40e-6, 81), workers=4)
    fit = fit_two_regimes(recs)
    assert fit.slope_i == pytest.approx(1.0, abs=0.02)
    assert fit.slope_ii <= 0.02
    free = [r for r in recs if r.z0 >= 20e-6]
    sag = np.mean([r.report.z_min - r.z0 for r in free])
    assert sag == pytest.approx(fig2.sag, rel=0.01)


def test_two_regimes_needs_trapped_rows():
    with pytest.raises(InsufficientData):
        fit_two_regimes([SweepRecord(0.0, None, "no_trap")] * 10)
