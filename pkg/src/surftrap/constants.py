"""Physical constants and species / surface parameter records (SI units)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from scipy import constants as _sc

from .errors import ValidationError

RB87_MASS_U = 86.909180527


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = _sc.hbar
    c: float = _sc.c
    eps0: float = _sc.epsilon_0
    kB: float = _sc.k
    muB: float = _sc.physical_constants["Bohr magneton"][0]
    g_accel: float = _sc.g

    def __post_init__(self):
        for name in ("hbar", "c", "eps0", "kB", "muB", "g_accel"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"constant {name} must be positive")

    @property
    def h(self) -> float:
        return 2.0 * math.pi * self.hbar


CODATA = PhysicalConstants()


@dataclass(frozen=True)
class Species:
    """Atomic parameters.

    ``gF * mF`` is the Zeeman factor of the trapped state; ``gF * delta_mF``
    is the factor of the driven RF transition.
    """

    mass: float
    alpha0: float
    gamma: float
    lambda_d1: float
    lambda_d2: float
    a_scatt: float
    gF: float = 0.5
    mF: int = 2
    delta_mF: int = 1

    def __post_init__(self):
        if not self.mass > 0:
            raise ValidationError("species.mass must be > 0")
        if not self.alpha0 > 0:
            raise ValidationError("species.alpha0 must be > 0")
        if not self.gamma > 0:
            raise ValidationError("species.gamma must be > 0")
        if not self.a_scatt > 0:
            raise ValidationError("species.a_scatt must be > 0")
        if not (self.lambda_d2 > 0 and self.lambda_d1 > self.lambda_d2):
            raise ValidationError("species requires lambda_d1 > lambda_d2 > 0")

    @property
    def trap_zeeman_factor(self) -> float:
        return self.gF * self.mF

    @property
    def rf_zeeman_factor(self) -> float:
        return self.gF * self.delta_mF


def rb87_default(**overrides) -> Species:
    """Rb-87 in |F=2, mF=2>, RF transitions with delta_mF = 1."""
    params = dict(
        mass=RB87_MASS_U * _sc.atomic_mass,
        alpha0=5.26e-39,
        gamma=2.0 * math.pi * 6e6,
        lambda_d1=794.978851e-9,
        lambda_d2=780.241209e-9,
        a_scatt=5.31e-9,
        gF=0.5,
        mF=2,
        delta_mF=1,
    )
    params.update(overrides)
    return Species(**params)


@dataclass(frozen=True)
class SurfaceMaterial:
    n_index: float = 1.5
    eps_static: float = 2.25
    phi_factor: float = 0.29
    c4_override: Optional[float] = None

    def __post_init__(self):
        if not self.n_index > 1:
            raise ValidationError("surface.n_index must be > 1")
        if not self.eps_static > 1:
            raise ValidationError("surface.eps_static must be > 1")
        if not 0 < self.phi_factor < 1:
            raise ValidationError("surface.phi_factor must lie in (0, 1)")
        if self.c4_override is not None and not self.c4_override >= 0:
            raise ValidationError("surface.c4_override must be >= 0")


PAPER_C4 = 1.78e-55


class C4Coefficient(NamedTuple):
    value: float
    source: str  # "formula" or "override"


def dielectric_factor(surface: SurfaceMaterial) -> float:
    """(eps - 1) / (eps + 1) * Phi(eps)."""
    eps = surface.eps_static
    return (eps - 1.0) / (eps + 1.0) * surface.phi_factor


def compute_c4(surface: SurfaceMaterial, species: Species,
               consts: PhysicalConstants = CODATA) -> C4Coefficient:
    if surface.c4_override is not None:
        return C4Coefficient(float(surface.c4_override), "override")
    coulomb = 1.0 / (4.0 * math.pi * consts.eps0)
    retarded = 3.0 * consts.hbar * consts.c * species.alpha0 / (8.0 * math.pi)
    return C4Coefficient(coulomb * retarded * dielectric_factor(surface), "formula")
