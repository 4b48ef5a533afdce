"""Numerical model of a magnetic + evanescent-wave surface trap for ultracold atoms."""

from .constants import (CODATA, PhysicalConstants, Species, SurfaceMaterial, compute_c4,
                        rb87_default)
from .potentials import (EvanescentBeam, MagneticTrap, TrapConfiguration, dipole_u0,
                         mean_detuning, peak_intensity, penetration_depth, u_cp, u_ew,
                         u_gravity, u_magnetic, u_total)
from .landscape import (LandscapeReport, RegimeFit, SweepRecord, analyze_landscape,
                        find_minimum_on_axis, find_saddle_points, fit_two_regimes, sweep_z0)
from .condensate import (TFProfile, energy_spread, tf_chemical_potential, tf_density,
                         tf_profile)
from .spectroscopy import (QuadraticFitResult, RfPoint, field_at_atoms, fit_quadratic_rise,
                           rf_resonance)
from .loss import (RampSpec, SurvivalRecord, evaporation_fraction, ramp_position,
                   survival_curve, wkb_transmission)
from .config import ScenarioConfig, load_config, loads_config, dumps_config
from .commands import run_subcommand

__version__ = "0.1.0"
