"""Thomas-Fermi condensate in an arbitrary trap basin.

The atom number at a given fill level is a midpoint-rule quadrature of the
Thomas-Fermi density over a product grid that encloses the connected basin
around the trap minimum. The grid is clipped at the on-axis barrier so the
Casimir-Polder well at the surface is never counted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import ndimage
from scipy.optimize import brentq

from . import _kernels
from .errors import NonConvergence, NoTrap
from .landscape import LandscapeReport, analyze_landscape
from .potentials import Z_FLOOR, TrapConfiguration

N_GRID = 101
BOX_MARGIN = 1.25


def interaction_constant(cfg: TrapConfiguration) -> float:
    sp = cfg.species
    return 4.0 * math.pi * cfg.consts.hbar ** 2 * sp.a_scatt / sp.mass


def harmonic_tf_mu(omega_bar: float, n_atoms: float, a_scatt: float, mass: float,
                   hbar: float) -> float:
    """Closed-form chemical potential in a harmonic trap."""
    a_ho = math.sqrt(hbar / (mass * omega_bar))
    return 0.5 * hbar * omega_bar * (15.0 * n_atoms * a_scatt / a_ho) ** 0.4


def local_frequencies(cfg: TrapConfiguration, report: LandscapeReport) -> Tuple[float, float, float]:
    """Harmonic frequencies from finite-difference curvature at the minimum."""
    p = cfg.params()
    z = report.z_min
    m = cfg.species.mass

    def curv(axis, h):
        pts = np.zeros((3, 3))
        pts[:, 2] = z
        pts[0, axis] -= h
        pts[2, axis] += h
        u = _kernels.potential_points(pts[:, 0], pts[:, 1], pts[:, 2], p)
        return (u[0] - 2.0 * u[1] + u[2]) / (h * h)

    hz = 1e-3 * z if report.z_barrier is None else 1e-2 * (z - report.z_barrier)
    ks = (curv(0, 1e-7), curv(1, 1e-7), curv(2, hz))
    return tuple(math.sqrt(max(k, 1e-300) / m) for k in ks)


@dataclass
class BasinGrid:
    """Potential sampled on a box around the trap minimum."""

    cfg: TrapConfiguration
    report: LandscapeReport
    xs: np.ndarray
    ys: np.ndarray
    zs: np.ndarray
    v: np.ndarray  # potential relative to u_min
    basin: np.ndarray
    cell_volume: float
    z_cut: bool  # lower z face sits on the barrier

    @classmethod
    def build(cls, cfg, report, extents, n=N_GRID, cap=None):
        """extents = (rx, ry, z_lo, z_hi); basin is the component below ``cap``."""
        rx, ry, z_lo, z_hi = extents
        xs = np.linspace(-rx, rx, n)
        ys = np.linspace(-ry, ry, n)
        zs = np.linspace(z_lo, z_hi, n)
        v = _kernels.potential_grid(xs, ys, zs, cfg.params()) - report.u_min
        cell = (xs[1] - xs[0]) * (ys[1] - ys[0]) * (zs[1] - zs[0])
        labels, _ = ndimage.label(v < cap)
        centre = (n // 2, n // 2, int(np.argmin(np.abs(zs - report.z_min))))
        lab = labels[centre]
        basin = labels == lab if lab else np.zeros_like(v, dtype=bool)
        z_cut = report.z_barrier is not None and z_lo <= report.z_barrier * (1 + 1e-12)
        return cls(cfg, report, xs, ys, zs, v, basin, cell, z_cut)

    def number(self, level: float, g_int: float) -> float:
        return _kernels.excess_sum(self.v, self.basin, level) * self.cell_volume / g_int

    def touches(self, level: float):
        """Box faces reached by the basin cloud at this level (x, y, z_lo, z_hi)."""
        occ = self.basin & (self.v < level)
        hit_x = occ[0].any() or occ[-1].any()
        hit_y = occ[:, 0].any() or occ[:, -1].any()
        hit_zlo = occ[:, :, 0].any() and not self.z_cut
        hit_zhi = occ[:, :, -1].any()
        return hit_x, hit_y, hit_zlo, hit_zhi


def _axis_reach(f, z_from, level, step, limit):
    """Distance along one direction at which f rises by ``level`` (capped at limit)."""
    d = step
    while d < limit:
        if f(d) >= level:
            return brentq(lambda s: f(s) - level, 0.0, d, xtol=1e-3 * step)
        d *= 2.0
    return limit


def basin_extents(cfg: TrapConfiguration, report: LandscapeReport, level: float):
    p = cfg.params()
    zm, um = report.z_min, report.u_min

    def along(dx, dy, dz):
        return lambda s: float(_kernels.potential_points(dx * s, dy * s, zm + dz * s, p)) - um

    rx = _axis_reach(along(1, 0, 0), zm, level, 1e-7, 5e-3)
    ry = _axis_reach(along(0, 1, 0), zm, level, 1e-7, 5e-3)
    up = _axis_reach(along(0, 0, 1), zm, level, 1e-9, 5e-3)
    floor = report.z_barrier if report.z_barrier is not None else Z_FLOOR
    down = _axis_reach(along(0, 0, -1), zm, level, 1e-9, zm - floor)
    z_lo = max(zm - BOX_MARGIN * down, floor)
    return BOX_MARGIN * rx, BOX_MARGIN * ry, z_lo, zm + BOX_MARGIN * up


def _expand(extents, hits, zm, floor, factor=1.5):
    rx, ry, z_lo, z_hi = extents
    if hits[0]:
        rx *= factor
    if hits[1]:
        ry *= factor
    if hits[2]:
        z_lo = max(zm - factor * (zm - z_lo), floor)
    if hits[3]:
        z_hi = zm + factor * (z_hi - zm)
    return rx, ry, z_lo, z_hi


def basin_grid(cfg, report, level, n=N_GRID, max_expand=8):
    """Grid whose box contains the whole cloud filled up to ``level``."""
    floor = report.z_barrier if report.z_barrier is not None else Z_FLOOR
    ext = basin_extents(cfg, report, level)
    for _ in range(max_expand):
        grid = BasinGrid.build(cfg, report, ext, n, cap=level * (1 + 1e-9))
        hits = grid.touches(level)
        if not any(hits):
            return grid
        ext = _expand(ext, hits, report.z_min, floor)
    raise NonConvergence("basin keeps reaching the integration box")


@dataclass(frozen=True)
class TFProfile:
    mu: float
    n_atoms: float
    g_int: float
    u_min: float
    z_min: float
    z_barrier: Optional[float]
    tf_radii: Tuple[float, float, float]
    spilled: bool
    density_at: Callable = field(repr=False, compare=False)


def _density_fn(cfg, mu, u_min, g_int, z_barrier):
    p = cfg.params()

    def density_at(x, y, z):
        z = np.asarray(z, dtype=np.float64)
        u = _kernels.potential_points(x, y, z, p) - u_min
        n = np.maximum(mu - u, 0.0) / g_int
        if z_barrier is not None:
            n = np.where(z > z_barrier, n, 0.0)
        return float(n) if np.ndim(n) == 0 else n

    return density_at


def _trapped_report(cfg, report):
    if report is None:
        report = analyze_landscape(cfg)
    if not report.has_trap:
        raise NoTrap("landscape has no trap")
    return report


def tf_profile(cfg: TrapConfiguration, n_atoms: float,
               report: Optional[LandscapeReport] = None, n_grid: int = N_GRID,
               rtol: float = 1e-4) -> TFProfile:
    """Chemical potential by bisection on the quadrature atom number."""
    report = _trapped_report(cfg, report)
    g_int = interaction_constant(cfg)
    freqs = local_frequencies(cfg, report)
    m, hbar = cfg.species.mass, cfg.consts.hbar

    def radii(mu):
        return tuple(math.sqrt(2.0 * mu / (m * w * w)) for w in freqs)

    density = None
    if n_atoms <= 0:
        density = _density_fn(cfg, 0.0, report.u_min, g_int, report.z_barrier)
        return TFProfile(0.0, 0.0, g_int, report.u_min, report.z_min, report.z_barrier,
                         (0.0, 0.0, 0.0), False, density)

    wbar = (freqs[0] * freqs[1] * freqs[2]) ** (1.0 / 3.0)
    level = 1.5 * harmonic_tf_mu(wbar, n_atoms, cfg.species.a_scatt, m, hbar)
    for _ in range(12):
        grid = basin_grid(cfg, report, level, n_grid)
        if grid.number(level, g_int) >= n_atoms:
            lo, hi = 0.0, level
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if grid.number(mid, g_int) < n_atoms:
                    lo = mid
                else:
                    hi = mid
                if hi - lo <= 1e-13 * hi:
                    break
            mu = 0.5 * (lo + hi)
            if abs(grid.number(mu, g_int) / n_atoms - 1.0) > rtol:
                raise NonConvergence("atom number not matched within tolerance")
            density = _density_fn(cfg, mu, report.u_min, g_int, report.z_barrier)
            return TFProfile(mu, float(n_atoms), g_int, report.u_min, report.z_min,
                             report.z_barrier, radii(mu), mu > report.trap_depth, density)
        level *= 1.6
    raise NonConvergence("could not bracket the chemical potential")


def tf_chemical_potential(cfg: TrapConfiguration, n_atoms: float,
                          report: Optional[LandscapeReport] = None, **kw) -> float:
    return tf_profile(cfg, n_atoms, report, **kw).mu


def energy_spread(cfg: TrapConfiguration, n_atoms: float,
                  report: Optional[LandscapeReport] = None, **kw) -> float:
    """Energy width of the condensate: its chemical potential."""
    return tf_chemical_potential(cfg, n_atoms, report, **kw)


def tf_density(cfg: TrapConfiguration, mu: float, x, y, z,
               report: Optional[LandscapeReport] = None):
    """Thomas-Fermi density at (x, y, z); zero on the surface side of the barrier."""
    report = _trapped_report(cfg, report)
    if mu < 0:
        raise ValueError("mu must be >= 0")
    f = _density_fn(cfg, mu, report.u_min, interaction_constant(cfg), report.z_barrier)
    return f(x, y, z)


def tf_atom_numbers(cfg: TrapConfiguration, levels, report: Optional[LandscapeReport] = None,
                    n_grid: int = N_GRID):
    """Basin atom numbers at several fill levels, all on one shared grid."""
    report = _trapped_report(cfg, report)
    levels = [float(v) for v in levels]
    grid = basin_grid(cfg, report, max(levels), n_grid)
    g_int = interaction_constant(cfg)
    return [grid.number(v, g_int) for v in levels]
