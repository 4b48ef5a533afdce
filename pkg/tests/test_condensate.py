import math

import numpy as np
import pytest

from surftrap.condensate import (harmonic_tf_mu, local_frequencies, tf_atom_numbers,
                                 tf_density, tf_profile)
from surftrap.errors import NoTrap
from surftrap.landscape import analyze_landscape


def test_mu_matches_closed_form(harmonic_cfg):
    sp = harmonic_cfg.species
    prof = tf_profile(harmonic_cfg, 1e5)
    ref = harmonic_tf_mu(2 * math.pi * 100, 1e5, sp.a_scatt, sp.mass, harmonic_cfg.consts.hbar)
    abar = math.sqrt(harmonic_cfg.consts.hbar / (sp.mass * 2 * math.pi * 100))
    assert ref == pytest.approx(0.5 * harmonic_cfg.consts.hbar * 2 * math.pi * 100
                                * (15 * 1e5 * sp.a_scatt / abar) ** 0.4, rel=1e-12)
    assert prof.mu == pytest.approx(ref, rel=0.005)
    assert not prof.spilled


def test_density_integrates_to_n_by_monte_carlo(harmonic_cfg):
    rep = analyze_landscape(harmonic_cfg)
    prof = tf_profile(harmonic_cfg, 1e5, rep)
    box = 1.05 * np.array(prof.tf_radii)
    rng = np.random.default_rng(12345)
    total = 0.0
    m = 0
    for _ in range(8):
        pts = rng.uniform(-1, 1, (250_000, 3)) * box
        total += prof.density_at(pts[:, 0], pts[:, 1], rep.z_min + pts[:, 2]).sum()
        m += 250_000
    n_mc = total / m * np.prod(2 * box)
    assert n_mc == pytest.approx(1e5, rel=0.005)


def test_atom_number_scaling_harmonic(harmonic_cfg):
    rep = analyze_landscape(harmonic_cfg)
    mu = tf_profile(harmonic_cfg, 1e5, rep).mu
    n1, n2 = tf_atom_numbers(harmonic_cfg, [0.5 * mu, mu], rep)
    assert n1 / n2 == pytest.approx(0.5 ** 2.5, rel=0.01)


def test_local_frequencies(harmonic_cfg):
    rep = analyze_landscape(harmonic_cfg)
    for w in local_frequencies(harmonic_cfg, rep):
        assert w == pytest.approx(2 * math.pi * 100, rel=1e-4)


def test_surface_trap_density_clipped_at_barrier(fig2):
    rep = analyze_landscape(fig2)
    prof = tf_profile(fig2, 1e5, rep)
    assert prof.mu > 0
    assert tf_density(fig2, prof.mu, 0.0, 0.0, 0.5 * rep.z_barrier, rep) == 0.0
    assert tf_density(fig2, prof.mu, 0.0, 0.0, rep.z_min, rep) == pytest.approx(prof.mu / prof.g_int)


def test_zero_atoms(harmonic_cfg):
    assert tf_profile(harmonic_cfg, 0).mu == 0.0


def test_no_trap_raises(fig2):
    from dataclasses import replace
    rep = replace(analyze_landscape(fig2), has_trap=False)
    with pytest.raises(NoTrap):
        tf_profile(fig2, 1e5, rep)
