"""Trap-bottom magnetic field, RF resonance and the quadratic-rise fit."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .constants import CODATA, PhysicalConstants, Species
from .errors import DegenerateFit, InsufficientData, NoTrap
from .landscape import LandscapeReport
from .potentials import TrapConfiguration
from .regression import quadfit_vertex


@dataclass(frozen=True)
class RfPoint:
    z0: float
    b_field: float
    rf_freq: float
    rf_uncertainty: float = 0.0


@dataclass(frozen=True)
class QuadraticFitResult:
    omega_z: float
    b_offset: float
    z_ref: float
    residual_rms: float


def field_at_atoms(cfg: TrapConfiguration, report: LandscapeReport) -> float:
    """Field magnitude at the trap minimum.

    The harmonic magnetic energy at z_min, converted back to field with the
    trapped state's Zeeman factor, on top of the offset field.
    """
    if not report.has_trap:
        raise NoTrap("no trap minimum to probe")
    mg = cfg.magnet
    dz = report.z_min - mg.z0
    zeeman = cfg.species.trap_zeeman_factor * cfg.consts.muB
    return mg.b_offset + cfg.species.mass * mg.omega_z ** 2 * dz * dz / (2.0 * zeeman)


def rf_resonance(b_field, species: Species, consts: PhysicalConstants = CODATA):
    """RF frequency in Hz resonant with the Zeeman splitting at ``b_field``."""
    b = np.asarray(b_field, dtype=np.float64)
    if np.any(b < 0):
        raise ValueError("field magnitude must be >= 0")
    f = species.rf_zeeman_factor * consts.muB * b / consts.h
    return float(f) if f.ndim == 0 else f


def field_from_rf(rf_freq, species: Species, consts: PhysicalConstants = CODATA):
    return np.asarray(rf_freq) * consts.h / (species.rf_zeeman_factor * consts.muB)


def rf_point(z0: float, b_field: float, species: Species, rf_uncertainty: float = 0.0,
             consts: PhysicalConstants = CODATA) -> RfPoint:
    return RfPoint(float(z0), float(b_field), rf_resonance(b_field, species, consts),
                   float(rf_uncertainty))


def fit_quadratic_rise(points: Sequence[RfPoint], species: Species,
                       consts: PhysicalConstants = CODATA, min_points: int = 4) -> QuadraticFitResult:
    """Weighted parabola B(z0) = b_offset + m wz^2 (z_ref - z0)^2 / (2 gF mF muB).

    Weights are inverse variances of the field implied by ``rf_uncertainty``;
    all-zero uncertainties mean equal weights.
    """
    if len(points) < min_points:
        raise InsufficientData(f"need >= {min_points} points, got {len(points)}")
    z0 = np.array([p.z0 for p in points])
    b = np.array([p.b_field for p in points])
    sigma_f = np.array([p.rf_uncertainty for p in points])
    weights = None
    if np.any(sigma_f > 0):
        if np.any(sigma_f <= 0):
            raise ValueError("mix of zero and non-zero rf uncertainties")
        sigma_b = field_from_rf(sigma_f, species, consts)
        weights = 1.0 / sigma_b ** 2
    fit = quadfit_vertex(z0, b, weights, require_positive=True)
    a, z_ref, c = fit.coefficients
    zeeman = species.trap_zeeman_factor * consts.muB
    omega = math.sqrt(2.0 * a * zeeman / species.mass)
    if not omega > 0:
        raise DegenerateFit("non-positive curvature")
    return QuadraticFitResult(omega, c, z_ref, fit.residual_rms)


def parabola_field(z0, fit: QuadraticFitResult, species: Species,
                   consts: PhysicalConstants = CODATA):
    """Forward model of a QuadraticFitResult."""
    zeeman = species.trap_zeeman_factor * consts.muB
    d = np.asarray(z0, dtype=np.float64) - fit.z_ref
    return fit.b_offset + species.mass * fit.omega_z ** 2 * d * d / (2.0 * zeeman)
