"""Stationary points of the total potential, z0 sweeps and the two-regime fit."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from . import _kernels
from .errors import (InsufficientData, NoSaddle, NoStationaryPoint, SurftrapError)
from .potentials import Z_FLOOR, TrapConfiguration
from .regression import hinge_fit

N_COARSE = 4000
Z_TOL = 1e-12


@dataclass(frozen=True)
class LandscapeReport:
    z_min: float
    u_min: float
    z_barrier: Optional[float]
    u_barrier: Optional[float]
    barrier_height: Optional[float]
    saddle_x: Optional[float]
    trap_depth: float
    has_trap: bool
    u_saddle: Optional[float] = None
    saddle_z: Optional[float] = None


@dataclass(frozen=True)
class Saddle:
    x: float
    z: float
    energy: float


@dataclass(frozen=True)
class SweepRecord:
    z0: float
    report: Optional[LandscapeReport]
    error: Optional[str] = None

    @property
    def has_trap(self) -> bool:
        return self.report is not None and self.report.has_trap


SweepTable = List[SweepRecord]


@dataclass(frozen=True)
class RegimeFit:
    slope_i: float
    intercept_i: float
    slope_ii: float
    breakpoint_z0: float
    residuals: float


def default_window(cfg: TrapConfiguration) -> Tuple[float, float]:
    return Z_FLOOR, max(cfg.magnet.z0, 0.0) + cfg.sag + 60e-6


def _refine(fun, lo, hi, sign=1.0):
    """Local minimum of sign*fun on [lo, hi]; returns (z, fun(z))."""
    res = minimize_scalar(lambda z: sign * fun(z), bounds=(lo, hi), method="bounded",
                          options={"xatol": Z_TOL, "maxiter": 500})
    return float(res.x), float(fun(res.x))


def _local_extrema(u):
    d = np.diff(u)
    interior = np.arange(1, u.size - 1)
    minima = interior[(d[:-1] < 0) & (d[1:] >= 0)]
    maxima = interior[(d[:-1] > 0) & (d[1:] <= 0)]
    return minima, maxima


def find_minimum_on_axis(cfg: TrapConfiguration,
                         search_window: Optional[Tuple[float, float]] = None,
                         n_coarse: int = N_COARSE) -> LandscapeReport:
    """Trap minimum and the surface-side barrier along x = y = 0.

    A log-spaced coarse grid brackets the extrema, bounded Brent refines
    them to 1 pm. ``saddle_x`` is left empty; see ``analyze_landscape``.
    """
    lo, hi = search_window if search_window is not None else default_window(cfg)
    lo = max(lo, Z_FLOOR)
    if not hi > lo:
        raise ValueError("empty search window")
    p = cfg.params()
    z = np.geomspace(lo, hi, n_coarse)
    u = _kernels.potential_points(0.0, 0.0, z, p)
    minima, maxima = _local_extrema(u)
    if minima.size == 0 and maxima.size == 0:
        raise NoStationaryPoint(f"no stationary point on axis in [{lo:.3g}, {hi:.3g}] m")

    def f(zz):
        return float(_kernels.potential_points(0.0, 0.0, zz, p))

    if minima.size == 0:
        i = int(maxima[-1])
        zb, ub = _refine(f, z[i - 1], z[i + 1], -1.0)
        return LandscapeReport(math.nan, math.nan, zb, ub, None, None, 0.0, False)

    i_min = int(minima[np.argmin(u[minima])])
    zm, um = _refine(f, z[i_min - 1], z[i_min + 1])
    below = maxima[maxima < i_min]
    if below.size == 0:
        return LandscapeReport(zm, um, None, None, None, None, math.inf, True)
    j = int(below[-1])
    zb, ub = _refine(f, z[j - 1], z[j + 1], -1.0)
    height = ub - um
    return LandscapeReport(zm, um, zb, ub, height, None, height, True)


def _crest(cfg_params, x, z_guess, span=2.0, n=400):
    """Barrier crest along z at transverse offset x, near z_guess."""
    zz = np.geomspace(max(z_guess / span, Z_FLOOR), z_guess * span, n)
    u = _kernels.potential_points(x, 0.0, zz, cfg_params)
    k = int(np.argmax(u))
    if k == 0 or k == n - 1:
        return None

    def f(z):
        return float(_kernels.potential_points(x, 0.0, z, cfg_params))

    return _refine(f, zz[k - 1], zz[k + 1], -1.0)


def crest_profile(cfg: TrapConfiguration, xs, z_hi: float, nz: int = 1500):
    """Coarse crest position and energy along z for each x (NaN where no crest)."""
    p = cfg.params()
    zs = np.geomspace(Z_FLOOR, z_hi, nz)
    grid = _kernels.potential_grid(np.asarray(xs, dtype=np.float64), np.zeros(1), zs, p)[:, 0, :]
    d = np.diff(grid, axis=1)
    is_max = (d[:, :-1] > 0) & (d[:, 1:] <= 0)
    has = is_max.any(axis=1)
    first = np.argmax(is_max, axis=1) + 1
    rows = np.arange(grid.shape[0])
    zc = np.where(has, zs[first], np.nan)
    uc = np.where(has, grid[rows, first], np.nan)
    return zc, uc


def locate_saddle(cfg: TrapConfiguration, x_window: Tuple[float, float] = (0.0, 200e-6),
                  report: Optional[LandscapeReport] = None, nx: int = 201) -> Saddle:
    """Lowest pass over the surface barrier away from the beam axis.

    For each x the barrier crest along z is found; the saddle is the interior
    minimum of the crest energy as a function of x > 0.
    """
    if report is None:
        report = find_minimum_on_axis(cfg)
    if not report.has_trap or report.z_barrier is None:
        raise NoSaddle("no on-axis barrier")
    x_lo, x_hi = max(x_window[0], 0.0), x_window[1]
    xs = np.linspace(x_lo, x_hi, nx)
    zc, uc = crest_profile(cfg, xs, report.z_min + 5e-6)
    finite = np.isfinite(uc)
    cand = [i for i in range(1, nx - 1)
            if finite[i - 1] and finite[i] and finite[i + 1]
            and uc[i] < uc[i - 1] and uc[i] <= uc[i + 1]]
    if not cand:
        raise NoSaddle("crest energy has no interior minimum in the x window")
    i = min(cand, key=lambda k: uc[k])
    p = cfg.params()

    def crest_energy(x):
        c = _crest(p, x, float(zc[i]))
        return math.inf if c is None else c[1]

    xsad, _ = _refine(crest_energy, xs[i - 1], xs[i + 1])
    c = _crest(p, xsad, float(zc[i]))
    if c is None:
        raise NoSaddle("crest lost during refinement")
    return Saddle(xsad, c[0], c[1])


def find_saddle_points(cfg: TrapConfiguration, x_window: Tuple[float, float] = (0.0, 200e-6),
                       report: Optional[LandscapeReport] = None) -> float:
    """Positive x of the symmetric saddle pair."""
    return locate_saddle(cfg, x_window, report).x


def analyze_landscape(cfg: TrapConfiguration, search_window=None,
                      x_window: Tuple[float, float] = (0.0, 200e-6),
                      saddles: bool = True) -> LandscapeReport:
    """On-axis report completed with the saddle and the resulting trap depth."""
    rep = find_minimum_on_axis(cfg, search_window)
    if not (saddles and rep.has_trap and rep.z_barrier is not None):
        return rep
    try:
        s = locate_saddle(cfg, x_window, rep)
    except NoSaddle:
        return rep
    depth = min(rep.barrier_height, s.energy - rep.u_min)
    return LandscapeReport(rep.z_min, rep.u_min, rep.z_barrier, rep.u_barrier,
                           rep.barrier_height, s.x, depth, True, s.energy, s.z)


def _sweep_one(args):
    cfg, z0, kw = args
    try:
        return SweepRecord(float(z0), analyze_landscape(cfg.with_z0(z0), **kw))
    except SurftrapError as exc:
        return SweepRecord(float(z0), None, exc.code)


def sweep_z0(cfg_base: TrapConfiguration, z0_list: Sequence[float], workers: int = 1,
             **kw) -> SweepTable:
    """One record per z0, in input order; failures are recorded in-row."""
    z0s = [float(z) for z in z0_list]
    if not z0s:
        raise InsufficientData("empty z0 list")
    d = np.diff(z0s)
    if not (np.all(d > 0) or np.all(d < 0)):
        raise ValueError("z0_list must be strictly monotone")
    jobs = [(cfg_base, z0, kw) for z0 in z0s]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_one, jobs))
    return [_sweep_one(j) for j in jobs]


def fit_two_regimes(table: SweepTable, min_side: int = 4) -> RegimeFit:
    """Continuous two-line fit of z_min against z0 over the trapped records."""
    pts = [(r.z0, r.report.z_min) for r in table if r.has_trap]
    if len(pts) < 2 * min_side - 1:
        raise InsufficientData("sweep has too few trapped records for a two-regime fit")
    x, y = np.array(pts).T
    h = hinge_fit(x, y, min_side=min_side)
    return RegimeFit(slope_i=h.slope_right,
                     intercept_i=h.level - h.slope_right * h.breakpoint,
                     slope_ii=h.slope_left,
                     breakpoint_z0=h.breakpoint,
                     residuals=h.residual_rms)
