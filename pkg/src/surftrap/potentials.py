"""Potential terms of the combined surface trap and derived beam quantities.

Coordinates: z is the distance from the prism surface into the vacuum,
x and y are transverse. All energies are in joules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import _kernels
from .constants import (CODATA, PhysicalConstants, Species, SurfaceMaterial,
                        compute_c4, rb87_default)
from .errors import DomainError, SubcriticalAngle, ValidationError, ZeroDetuning

Z_FLOOR = 1e-9


@dataclass(frozen=True)
class EvanescentBeam:
    wavelength: float = 765e-9
    power: float = 0.5
    angle: float = math.radians(47.5)
    waist_x: float = 170e-6
    waist_y: float = 240e-6
    polarization: str = "TE"
    enhancement_override: Optional[float] = None

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValidationError("beam.wavelength must be > 0")
        if not self.power >= 0:
            raise ValidationError("beam.power must be >= 0")
        if not (self.waist_x > 0 and self.waist_y > 0):
            raise ValidationError("beam waists must be > 0")
        if self.polarization not in ("TE", "TM"):
            raise ValidationError("beam.polarization must be TE or TM")
        if self.enhancement_override is not None and not self.enhancement_override >= 0:
            raise ValidationError("beam.enhancement_override must be >= 0")


@dataclass(frozen=True)
class MagneticTrap:
    omega_x: float = 2.0 * math.pi * 25.0
    omega_y: float = 2.0 * math.pi * 200.0
    omega_z: float = 2.0 * math.pi * 200.0
    z0: float = 0.0
    b_offset: float = 0.0

    def __post_init__(self):
        if not (self.omega_x > 0 and self.omega_y > 0 and self.omega_z > 0):
            raise ValidationError("magnetic trap frequencies must be > 0")
        if not self.b_offset >= 0:
            raise ValidationError("magnet.b_offset must be >= 0")


@dataclass(frozen=True)
class TrapConfiguration:
    species: Species = field(default_factory=rb87_default)
    surface: SurfaceMaterial = field(default_factory=SurfaceMaterial)
    beam: EvanescentBeam = field(default_factory=EvanescentBeam)
    magnet: MagneticTrap = field(default_factory=MagneticTrap)
    gravity_sign: int = -1
    ew_enabled: bool = True
    consts: PhysicalConstants = CODATA

    def __post_init__(self):
        if self.gravity_sign not in (1, -1):
            raise ValidationError("gravity_sign must be +1 or -1")
        if self.ew_enabled:
            check_evanescent(self.beam, self.surface)

    def with_z0(self, z0: float) -> "TrapConfiguration":
        return replace(self, magnet=replace(self.magnet, z0=float(z0)))

    @property
    def c4(self) -> float:
        return compute_c4(self.surface, self.species, self.consts).value

    @property
    def sag(self) -> float:
        """Gravitational displacement of a pure harmonic minimum, g / omega_z**2."""
        return self.consts.g_accel / self.magnet.omega_z ** 2

    def params(self) -> np.ndarray:
        """Packed parameter vector for the numeric kernels."""
        b, mg = self.beam, self.magnet
        ew = bool(self.ew_enabled)
        u0 = dipole_u0(b, self.species, self.surface, self.consts) if ew else 0.0
        lp = penetration_depth(b, self.surface) if ew else 1.0
        m = self.species.mass
        return _kernels.pack(self.c4, u0, lp, b.waist_x, b.waist_y, m,
                             mg.omega_x, mg.omega_y, mg.omega_z, mg.z0,
                             self.gravity_sign * m * self.consts.g_accel, ew)


def check_evanescent(beam: EvanescentBeam, surface: SurfaceMaterial) -> float:
    s = surface.n_index * math.sin(beam.angle)
    if not s > 1.0:
        raise SubcriticalAngle(
            f"n*sin(theta) = {s:.6g} <= 1: no total internal reflection "
            f"(critical angle {math.degrees(math.asin(1 / surface.n_index)):.4g} deg)")
    return s


def _check_z(z):
    zmin = np.min(z)
    if not zmin >= Z_FLOOR:
        raise DomainError(f"z = {zmin:.3g} m is below the surface cutoff {Z_FLOOR:g} m")


def u_cp(z, c4):
    """Retarded Casimir-Polder potential -C4 / z**4."""
    z = np.asarray(z, dtype=np.float64)
    _check_z(z)
    z2 = z * z
    out = -c4 / (z2 * z2)
    return float(out) if out.ndim == 0 else out


def penetration_depth(beam: EvanescentBeam, surface: SurfaceMaterial) -> float:
    """1/e decay length of the evanescent intensity."""
    s = check_evanescent(beam, surface)
    k = 2.0 * math.pi / beam.wavelength
    return 1.0 / (k * math.sqrt(s * s - 1.0))


def line_detunings(beam: EvanescentBeam, species: Species,
                   consts: PhysicalConstants = CODATA):
    """Angular detunings (D1, D2); positive means blue of the line."""
    d1 = 2.0 * math.pi * consts.c * (1.0 / beam.wavelength - 1.0 / species.lambda_d1)
    d2 = 2.0 * math.pi * consts.c * (1.0 / beam.wavelength - 1.0 / species.lambda_d2)
    return d1, d2


def mean_detuning(beam: EvanescentBeam, species: Species,
                  consts: PhysicalConstants = CODATA, weighting: str = "arithmetic") -> float:
    """Mean detuning from the D1 and D2 lines in rad/s.

    ``weighting="line-strength"`` returns the effective detuning of the
    2/3 (D2) + 1/3 (D1) weighted inverse detunings instead of the plain mean.
    """
    d1, d2 = line_detunings(beam, species, consts)
    if d1 == 0.0 or d2 == 0.0:
        raise ZeroDetuning("laser is resonant with a D line")
    if weighting == "arithmetic":
        return 0.5 * (d1 + d2)
    if weighting == "line-strength":
        inv = 2.0 / 3.0 / d2 + 1.0 / 3.0 / d1
        if inv == 0.0:
            raise ZeroDetuning("weighted inverse detuning vanishes")
        return 1.0 / inv
    raise ValueError(f"unknown weighting {weighting!r}")


def tir_enhancement(beam: EvanescentBeam, surface: SurfaceMaterial) -> float:
    """Intensity ratio of the evanescent field at the surface to the incident beam."""
    if beam.enhancement_override is not None:
        return float(beam.enhancement_override)
    s = check_evanescent(beam, surface) / surface.n_index  # sin(theta)
    n2 = surface.n_index ** 2
    cos2 = 1.0 - s * s
    te = 4.0 * n2 * cos2 / (n2 - 1.0)
    if beam.polarization == "TE":
        return te
    return te * (2.0 * n2 * s * s - 1.0) / ((n2 + 1.0) * s * s - 1.0)


def peak_intensity(beam: EvanescentBeam, surface: SurfaceMaterial) -> float:
    enhancement = tir_enhancement(beam, surface)
    check_evanescent(beam, surface)
    return enhancement * 2.0 * beam.power / (math.pi * beam.waist_x * beam.waist_y)


def dipole_u0(beam: EvanescentBeam, species: Species, surface: SurfaceMaterial,
              consts: PhysicalConstants = CODATA) -> float:
    """Dipole potential at the surface on the beam axis (positive = repulsive)."""
    intensity = peak_intensity(beam, surface)
    delta = mean_detuning(beam, species, consts)
    omega = 2.0 * math.pi * consts.c / beam.wavelength
    return math.pi * consts.c ** 2 * species.gamma / (2.0 * omega ** 3) * intensity / delta


def _scalar(a):
    return float(a) if np.ndim(a) == 0 else a


def u_ew(x, y, z, cfg: TrapConfiguration):
    if not cfg.ew_enabled:
        return _scalar(np.zeros(np.broadcast(x, y, z).shape))
    b = cfg.beam
    u0 = dipole_u0(b, cfg.species, cfg.surface, cfg.consts)
    lp = penetration_depth(b, cfg.surface)
    x, y, z = (np.asarray(v, dtype=np.float64) for v in (x, y, z))
    return _scalar(u0 * np.exp(-z / lp - 2.0 * x * x / (b.waist_x * b.waist_x)
                               - 2.0 * y * y / (b.waist_y * b.waist_y)))


def u_magnetic(x, y, z, cfg: TrapConfiguration):
    mg = cfg.magnet
    x, y, z = (np.asarray(v, dtype=np.float64) for v in (x, y, z))
    dz = z - mg.z0
    return _scalar(0.5 * cfg.species.mass * (mg.omega_x ** 2 * x * x + mg.omega_y ** 2 * y * y
                                             + mg.omega_z ** 2 * dz * dz))


def u_gravity(z, cfg: TrapConfiguration):
    z = np.asarray(z, dtype=np.float64)
    return _scalar(cfg.gravity_sign * cfg.species.mass * cfg.consts.g_accel * z)


def u_terms(x, y, z, cfg: TrapConfiguration) -> dict:
    """Individual terms keyed cp, ew, magn, g."""
    return {"cp": u_cp(z, cfg.c4), "ew": u_ew(x, y, z, cfg),
            "magn": u_magnetic(x, y, z, cfg), "g": u_gravity(z, cfg)}


def u_total(x, y, z, cfg: TrapConfiguration, params=None):
    """Sum of the four terms, evaluated by the compiled kernel."""
    _check_z(np.asarray(z, dtype=np.float64))
    p = cfg.params() if params is None else params
    return _scalar(_kernels.potential_points(x, y, z, p))


def grad_total(x, y, z, cfg: TrapConfiguration):
    """Analytic gradient (dU/dx, dU/dy, dU/dz)."""
    x, y, z = (np.asarray(v, dtype=np.float64) for v in (x, y, z))
    _check_z(z)
    m = cfg.species.mass
    mg = cfg.magnet
    gx = m * mg.omega_x ** 2 * x
    gy = m * mg.omega_y ** 2 * y
    gz = 4.0 * cfg.c4 / z ** 5 + m * mg.omega_z ** 2 * (z - mg.z0) \
        + cfg.gravity_sign * m * cfg.consts.g_accel
    if cfg.ew_enabled:
        b = cfg.beam
        lp = penetration_depth(b, cfg.surface)
        ew = u_ew(x, y, z, cfg)
        gx = gx - 4.0 * x / b.waist_x ** 2 * ew
        gy = gy - 4.0 * y / b.waist_y ** 2 * ew
        gz = gz - ew / lp
    return _scalar(gx), _scalar(gy), _scalar(gz)
