"""Ramp trajectories and a minimal atom-loss model.

Losses at the closest approach of the magnetic minimum are split into
evaporation (the part of the Thomas-Fermi cloud above the trap depth) and
tunnelling through the surface barrier (WKB, with an attempt rate).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .condensate import tf_atom_numbers, tf_profile, N_GRID
from .errors import AboveBarrier, NoBarrier, SurftrapError, ValidationError
from .landscape import LandscapeReport, analyze_landscape
from .potentials import Z_FLOOR, TrapConfiguration, u_total

RAMP_SHAPES = ("MonotoneHalfPeriod", "PaperSinSquared")


@dataclass(frozen=True)
class RampSpec:
    z0_start: float = 34e-6
    z0_end: float = 0.0
    tau: float = 0.2
    hold: float = 0.0
    return_time: float = 0.1
    shape: str = "MonotoneHalfPeriod"

    def __post_init__(self):
        if not self.tau > 0:
            raise ValidationError("ramp.tau must be > 0")
        if not self.return_time > 0:
            raise ValidationError("ramp.return_time must be > 0")
        if not self.hold >= 0:
            raise ValidationError("ramp.hold must be >= 0")
        if self.shape not in RAMP_SHAPES:
            raise ValidationError(f"ramp.shape must be one of {RAMP_SHAPES}")


@dataclass(frozen=True)
class SurvivalRecord:
    z0: float
    fraction: float
    evap_loss: float
    tunnel_loss: float
    z_min: Optional[float] = None
    mu: Optional[float] = None
    transmission: Optional[float] = None


def ramp_position(t: float, ramp: RampSpec) -> float:
    """Position of the magnetic minimum during the approach, 0 <= t <= tau."""
    if not 0.0 <= t <= ramp.tau:
        raise ValueError(f"t = {t} outside [0, tau]")
    if ramp.shape == "PaperSinSquared":
        s = math.sin(math.pi * t / ramp.tau) ** 2
    else:
        s = math.sin(0.5 * math.pi * t / ramp.tau) ** 2
    return ramp.z0_start + (ramp.z0_end - ramp.z0_start) * s


def exposure_time(ramp: RampSpec, threshold: float) -> float:
    """Total time the magnetic minimum spends at or beyond ``threshold``.

    Covers approach, hold and return for the monotone shape; the printed
    sin^2(pi t / tau) shape already returns to its start within tau.
    """
    span = ramp.z0_end - ramp.z0_start
    if span == 0.0:
        frac = 1.0 if ramp.z0_end <= threshold else 0.0
        return frac * (ramp.tau + ramp.hold + ramp.return_time)
    s = (threshold - ramp.z0_start) / span
    if s > 1.0:
        return 0.0
    s = max(s, 0.0)
    phase = math.asin(math.sqrt(s)) / math.pi
    if ramp.shape == "PaperSinSquared":
        return ramp.tau * (1.0 - 2.0 * phase)
    return (ramp.tau + ramp.return_time) * (1.0 - 2.0 * phase) + ramp.hold


def evaporation_fraction(cfg: TrapConfiguration, report: LandscapeReport, mu: float,
                         n_grid: int = N_GRID) -> float:
    """Fraction of the cloud filled to ``mu`` that lies above the trap depth."""
    if not report.has_trap:
        return 1.0
    if mu < 0:
        raise ValueError("mu must be >= 0")
    depth = report.trap_depth
    if mu <= depth:
        return 0.0
    if depth <= 0:
        return 1.0
    n_depth, n_mu = tf_atom_numbers(cfg, [depth, mu], report, n_grid)
    if n_mu <= 0:
        return 0.0
    return float(min(max(1.0 - n_depth / n_mu, 0.0), 1.0))


def forbidden_intervals(potential: Callable, energy: float, z_lo: float, z_hi: float,
                        n_scan: int = 4001, log: bool = False):
    """Sub-intervals of [z_lo, z_hi] where potential(z) > energy."""
    z = np.geomspace(z_lo, z_hi, n_scan) if log else np.linspace(z_lo, z_hi, n_scan)
    above = np.array([potential(v) for v in z]) > energy
    out = []
    i = 0
    while i < z.size:
        if not above[i]:
            i += 1
            continue
        j = i
        while j + 1 < z.size and above[j + 1]:
            j += 1
        f = lambda v: potential(v) - energy  # noqa: E731
        a = z_lo if i == 0 else brentq(f, z[i - 1], z[i], xtol=1e-15, rtol=1e-14)
        b = z_hi if j == z.size - 1 else brentq(f, z[j], z[j + 1], xtol=1e-15, rtol=1e-14)
        out.append((a, b))
        i = j + 1
    return out


def wkb_action(potential: Callable, energy: float, mass: float, a: float, b: float,
               points=None) -> float:
    """Integral of sqrt(2 m (V - E)) between turning points a and b."""
    def integrand(z):
        d = potential(z) - energy
        return math.sqrt(2.0 * mass * d) if d > 0 else 0.0

    inner = None if points is None else [p for p in points if a < p < b]
    val, _ = quad(integrand, a, b, points=inner or None, limit=400,
                  epsabs=0.0, epsrel=1e-9)
    return val


def wkb_transmission_profile(potential: Callable, energy: float, mass: float, hbar: float,
                             z_lo: float, z_hi: float, n_scan: int = 4001) -> float:
    """exp(-2/hbar * action) summed over every forbidden interval in the window."""
    total = 0.0
    for a, b in forbidden_intervals(potential, energy, z_lo, z_hi, n_scan):
        total += wkb_action(potential, energy, mass, a, b)
    return math.exp(-2.0 * total / hbar)


def wkb_transmission(cfg: TrapConfiguration, energy: float,
                     report: Optional[LandscapeReport] = None) -> float:
    """On-axis WKB transmission through the surface barrier at ``energy``."""
    if report is None:
        report = analyze_landscape(cfg, saddles=False)
    if not report.has_trap or report.z_barrier is None:
        raise NoBarrier("no surface barrier on axis")
    if energy >= report.u_barrier:
        raise AboveBarrier("energy is at or above the barrier top")
    if energy < report.u_min:
        raise ValueError("energy below the trap minimum")
    p = cfg.params()

    def v(z):
        return u_total(0.0, 0.0, z, cfg, p)

    zb = report.z_barrier
    f = lambda z: v(z) - energy  # noqa: E731
    z1 = brentq(f, Z_FLOOR, zb, xtol=1e-16, rtol=1e-14)
    z2 = brentq(f, zb, report.z_min, xtol=1e-16, rtol=1e-14) if f(report.z_min) < 0 else report.z_min
    action = wkb_action(v, energy, cfg.species.mass, z1, z2, points=[zb])
    return math.exp(-2.0 * action / cfg.consts.hbar)


def _survival_one(args):
    cfg, ramp, n_atoms, z0, rate, n_grid = args
    c = cfg.with_z0(z0)
    try:
        rep = analyze_landscape(c)
    except SurftrapError:
        rep = None
    if rep is None or not rep.has_trap:
        return SurvivalRecord(z0, 0.0, 1.0, 0.0)
    prof = tf_profile(c, n_atoms, rep, n_grid=n_grid)
    evap = evaporation_fraction(c, rep, prof.mu, n_grid)
    transmission = 0.0
    tunnel = 0.0
    if rep.z_barrier is not None:
        energy = rep.u_min + prof.mu
        try:
            transmission = wkb_transmission(c, energy, rep)
        except AboveBarrier:
            transmission = 1.0
        rate_hz = rate if rate is not None else c.magnet.omega_z / (2.0 * math.pi)
        r = RampSpec(ramp.z0_start, z0, ramp.tau, ramp.hold, ramp.return_time, ramp.shape)
        t_exp = exposure_time(r, rep.z_min - c.sag)
        tunnel = -math.expm1(-rate_hz * transmission * t_exp)
    fraction = min(max(1.0 - evap - tunnel, 0.0), 1.0)
    return SurvivalRecord(z0, fraction, evap, tunnel, rep.z_min, prof.mu, transmission)


def survival_curve(cfg_base: TrapConfiguration, ramp: RampSpec, n_atoms: float,
                   z0_list: Sequence[float], attempt_rate: Optional[float] = None,
                   workers: int = 1, n_grid: int = N_GRID) -> List[SurvivalRecord]:
    """Remaining fraction after approaching each z0 and returning.

    ``attempt_rate`` defaults to omega_z / 2 pi. Tunnelling is evaluated at
    the top of the Thomas-Fermi distribution, E = u_min + mu, for the time the
    magnetic minimum spends beyond the pinned trap position.
    """
    jobs = [(cfg_base, ramp, n_atoms, float(z0), attempt_rate, n_grid) for z0 in z0_list]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_survival_one, jobs))
    return [_survival_one(j) for j in jobs]
