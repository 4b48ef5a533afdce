"""Scenario files: sectioned key = value text (INI grammar).

Units in the file: lengths m, angles deg, powers W, frequencies Hz, fields T,
energies J. Every section is optional; missing keys come from the preset
named in ``[scenario] preset`` (default ``paper-fig2``). Unknown sections or
keys are rejected. ``none`` clears an optional value.

Example::

    [scenario]
    preset = paper-fig4-sweep

    [beam]
    power = 0.8
    angle = 47.5

    [sweep]
    z0_start = 40e-6
    z0_stop = -40e-6
    z0_count = 81
"""

from __future__ import annotations

import configparser
import copy
import math
import re
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from scipy import constants as _sc

from .constants import RB87_MASS_U, PhysicalConstants, Species, SurfaceMaterial
from .errors import ParseError, SurftrapError, ValidationError
from .loss import RAMP_SHAPES, RampSpec
from .potentials import EvanescentBeam, MagneticTrap, TrapConfiguration

TWO_PI = 2.0 * math.pi

# section -> key -> kind; kinds: float, int, bool, ofloat (optional), floats (list), str:<a|b>
SCHEMA: Dict[str, Dict[str, str]] = {
    "scenario": {"preset": "str"},
    "species": {"mass": "float", "alpha0": "float", "linewidth": "float",
                "lambda_d1": "float", "lambda_d2": "float", "a_scatt": "float",
                "gF": "float", "mF": "int", "delta_mF": "int"},
    "surface": {"n_index": "float", "eps_static": "float", "phi_factor": "float",
                "c4_override": "ofloat"},
    "beam": {"enabled": "bool", "wavelength": "float", "power": "float", "angle": "float",
             "waist_x": "float", "waist_y": "float", "polarization": "str:TE|TM",
             "enhancement_override": "ofloat"},
    "magnet": {"freq_x": "float", "freq_y": "float", "freq_z": "float", "z0": "float",
               "b_offset": "float"},
    "trap": {"gravity_sign": "int"},
    "sweep": {"z0_start": "float", "z0_stop": "float", "z0_count": "int",
              "z0_values": "floats"},
    "cut": {"z_start": "float", "z_stop": "float", "n_points": "int", "x": "float",
            "y": "float", "log_spacing": "bool"},
    "map": {"x_start": "float", "x_stop": "float", "nx": "int", "z_start": "float",
            "z_stop": "float", "nz": "int"},
    "condensate": {"n_atoms": "float", "n_grid": "int", "n_points": "int"},
    "ramp": {"z0_start": "float", "tau": "float", "hold": "float", "return_time": "float",
             "shape": "str:" + "|".join(RAMP_SHAPES), "n_points": "int"},
    "loss": {"attempt_rate": "ofloat"},
    "fit": {"min_side": "int", "rf_uncertainty": "float"},
}

_FIG2: Dict[str, Dict[str, Any]] = {
    "scenario": {"preset": "paper-fig2"},
    "species": {"mass": RB87_MASS_U * _sc.atomic_mass, "alpha0": 5.26e-39,
                "linewidth": 6e6, "lambda_d1": 794.978851e-9, "lambda_d2": 780.241209e-9,
                "a_scatt": 5.31e-9, "gF": 0.5, "mF": 2, "delta_mF": 1},
    "surface": {"n_index": 1.5, "eps_static": 2.25, "phi_factor": 0.29,
                "c4_override": 1.78e-55},
    "beam": {"enabled": True, "wavelength": 765e-9, "power": 0.5, "angle": 47.5,
             "waist_x": 170e-6, "waist_y": 240e-6, "polarization": "TE",
             "enhancement_override": 4.0},
    "magnet": {"freq_x": 25.0, "freq_y": 200.0, "freq_z": 200.0, "z0": -15e-6,
               "b_offset": 1e-4},
    "trap": {"gravity_sign": -1},
    "sweep": {"z0_start": 0.0, "z0_stop": -15e-6, "z0_count": 4, "z0_values": []},
    "cut": {"z_start": 1e-9, "z_stop": 2e-6, "n_points": 400, "x": 0.0, "y": 0.0,
            "log_spacing": False},
    "map": {"x_start": -150e-6, "x_stop": 150e-6, "nx": 61, "z_start": 50e-9,
            "z_stop": 3e-6, "nz": 60},
    "condensate": {"n_atoms": 1e5, "n_grid": 101, "n_points": 200},
    "ramp": {"z0_start": 34e-6, "tau": 0.2, "hold": 0.0, "return_time": 0.1,
             "shape": "MonotoneHalfPeriod", "n_points": 101},
    "loss": {"attempt_rate": None},
    "fit": {"min_side": 4, "rf_uncertainty": 0.0},
}


def _preset(base, **sections):
    out = copy.deepcopy(base)
    for sec, vals in sections.items():
        out[sec].update(vals)
    return out


PRESETS: Dict[str, Dict[str, Dict[str, Any]]] = {
    "paper-fig2": _FIG2,
    "paper-fig4-sweep": _preset(_FIG2, scenario={"preset": "paper-fig4-sweep"},
                                sweep={"z0_start": 40e-6, "z0_stop": -40e-6, "z0_count": 81}),
    "paper-fig5-loss": _preset(_FIG2, scenario={"preset": "paper-fig5-loss"},
                               sweep={"z0_start": 40e-6, "z0_stop": -40e-6, "z0_count": 33}),
    "paper-fig5-loss-noew": _preset(_FIG2, scenario={"preset": "paper-fig5-loss-noew"},
                                    beam={"enabled": False},
                                    sweep={"z0_start": 20e-6, "z0_stop": -10e-6,
                                           "z0_count": 61}),
}


def _parse_value(kind: str, text: str):
    t = text.strip()
    if kind == "float":
        return float(t)
    if kind == "int":
        v = float(t)
        if v != int(v):
            raise ValueError(f"{t!r} is not an integer")
        return int(v)
    if kind == "bool":
        low = t.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"{t!r} is not a boolean")
    if kind == "ofloat":
        return None if t.lower() in ("none", "") else float(t)
    if kind == "floats":
        return [float(v) for v in re.split(r"[,\s]+", t) if v]
    if kind.startswith("str:"):
        choices = kind[4:].split("|")
        if t not in choices:
            raise ValueError(f"{t!r} not one of {choices}")
        return t
    return t


def _format_value(kind: str, value) -> str:
    if value is None:
        return "none"
    if kind == "bool":
        return "true" if value else "false"
    if kind == "floats":
        return ", ".join(repr(float(v)) for v in value)
    if kind in ("float", "ofloat"):
        return repr(float(value))
    return str(value)


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario in file units; physics objects are built on demand."""

    values: Dict[str, Dict[str, Any]]

    def __post_init__(self):
        self._validate()

    def __eq__(self, other):
        return isinstance(other, ScenarioConfig) and self.values == other.values

    def get(self, section: str, key: str):
        return self.values[section][key]

    # -- physics objects
    def species(self) -> Species:
        s = self.values["species"]
        return Species(mass=s["mass"], alpha0=s["alpha0"], gamma=TWO_PI * s["linewidth"],
                       lambda_d1=s["lambda_d1"], lambda_d2=s["lambda_d2"],
                       a_scatt=s["a_scatt"], gF=s["gF"], mF=s["mF"], delta_mF=s["delta_mF"])

    def trap_configuration(self) -> TrapConfiguration:
        v = self.values
        b, mg = v["beam"], v["magnet"]
        return TrapConfiguration(
            species=self.species(),
            surface=SurfaceMaterial(**v["surface"]),
            beam=EvanescentBeam(wavelength=b["wavelength"], power=b["power"],
                                angle=math.radians(b["angle"]), waist_x=b["waist_x"],
                                waist_y=b["waist_y"], polarization=b["polarization"],
                                enhancement_override=b["enhancement_override"]),
            magnet=MagneticTrap(omega_x=TWO_PI * mg["freq_x"], omega_y=TWO_PI * mg["freq_y"],
                                omega_z=TWO_PI * mg["freq_z"], z0=mg["z0"],
                                b_offset=mg["b_offset"]),
            gravity_sign=v["trap"]["gravity_sign"],
            ew_enabled=b["enabled"],
            consts=PhysicalConstants())

    def z0_list(self) -> List[float]:
        s = self.values["sweep"]
        if s["z0_values"]:
            return [float(z) for z in s["z0_values"]]
        return [float(z) for z in np.linspace(s["z0_start"], s["z0_stop"], s["z0_count"])]

    def ramp(self) -> RampSpec:
        r = self.values["ramp"]
        return RampSpec(r["z0_start"], self.values["magnet"]["z0"], r["tau"], r["hold"],
                        r["return_time"], r["shape"])

    def _validate(self):
        for sec, keys in SCHEMA.items():
            if sec not in self.values or set(self.values[sec]) != set(keys):
                raise ValidationError(f"section [{sec}] is incomplete or has unknown keys")
        try:
            self.trap_configuration()
            self.ramp()
        except ValidationError:
            raise
        except SurftrapError as exc:
            raise ValidationError(str(exc)) from exc
        v = self.values
        z0s = self.z0_list()
        if len(z0s) < 1:
            raise ValidationError("sweep needs at least one z0")
        if len(z0s) > 1:
            d = np.diff(z0s)
            if not (np.all(d > 0) or np.all(d < 0)):
                raise ValidationError("sweep z0 values must be strictly monotone")
        c = v["cut"]
        if not (c["z_stop"] > c["z_start"] >= 1e-9 and c["n_points"] >= 2):
            raise ValidationError("cut needs 1 nm <= z_start < z_stop and n_points >= 2")
        m = v["map"]
        if not (m["x_stop"] > m["x_start"] and m["z_stop"] > m["z_start"] >= 1e-9
                and m["nx"] >= 2 and m["nz"] >= 2):
            raise ValidationError("map ranges are empty or below the 1 nm cutoff")
        cd = v["condensate"]
        if not (cd["n_atoms"] >= 0 and cd["n_grid"] >= 11 and cd["n_points"] >= 2):
            raise ValidationError("condensate needs n_atoms >= 0, n_grid >= 11, n_points >= 2")
        if v["ramp"]["n_points"] < 2:
            raise ValidationError("ramp.n_points must be >= 2")
        rate = v["loss"]["attempt_rate"]
        if rate is not None and not rate >= 0:
            raise ValidationError("loss.attempt_rate must be >= 0")
        if v["fit"]["min_side"] < 2 or v["fit"]["rf_uncertainty"] < 0:
            raise ValidationError("fit.min_side must be >= 2 and rf_uncertainty >= 0")
        if v["trap"]["gravity_sign"] not in (1, -1):
            raise ValidationError("trap.gravity_sign must be +1 or -1")


def _lineno(text: str, section: str, key: Optional[str] = None) -> Optional[int]:
    current = None
    for i, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        m = re.match(r"^\[([^\]]+)\]", s)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return i
            continue
        if current == section and key is not None:
            k = re.split(r"[=:]", s, maxsplit=1)[0].strip()
            if k == key:
                return i
    return None


def parse_overrides(pairs: Sequence[str]) -> Dict[str, Dict[str, str]]:
    """``section.key=value`` strings into a nested dict of raw text."""
    out: Dict[str, Dict[str, str]] = {}
    for pair in pairs:
        if "=" not in pair or "." not in pair.split("=", 1)[0]:
            raise ParseError(f"override {pair!r} is not section.key=value")
        lhs, rhs = pair.split("=", 1)
        sec, key = lhs.strip().split(".", 1)
        out.setdefault(sec.strip(), {})[key.strip()] = rhs.strip()
    return out


def loads_config(text: str, overrides: Sequence[str] = (), preset: Optional[str] = None
                 ) -> ScenarioConfig:
    parser = configparser.ConfigParser(interpolation=None, strict=True,
                                       inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if getattr(exc, "errors", None) else None
        raise ParseError("malformed line", lineno) from exc
    except configparser.Error as exc:
        raise ParseError(exc.message.splitlines()[0], getattr(exc, "lineno", None)) from exc

    raw: Dict[str, Dict[str, tuple]] = {}
    for sec in parser.sections():
        if sec not in SCHEMA:
            raise ValidationError(f"line {_lineno(text, sec)}: unknown section [{sec}]")
        for key, value in parser.items(sec):
            if key not in SCHEMA[sec]:
                raise ValidationError(f"line {_lineno(text, sec, key)}: unknown key {sec}.{key}")
            raw.setdefault(sec, {})[key] = (value, _lineno(text, sec, key))
    for sec, keys in parse_overrides(overrides).items():
        for key, value in keys.items():
            if sec not in SCHEMA or key not in SCHEMA[sec]:
                raise ValidationError(f"unknown override key {sec}.{key}")
            raw.setdefault(sec, {})[key] = (value, None)

    name = preset
    if "scenario" in raw and "preset" in raw["scenario"]:
        name = raw["scenario"]["preset"][0].strip()
    name = name or "paper-fig2"
    if name not in PRESETS:
        raise ValidationError(f"unknown preset {name!r}; known: {sorted(PRESETS)}")
    values = copy.deepcopy(PRESETS[name])
    for sec, keys in raw.items():
        for key, (text_value, lineno) in keys.items():
            if sec == "scenario":
                continue
            try:
                values[sec][key] = _parse_value(SCHEMA[sec][key], text_value)
            except ValueError as exc:
                raise ParseError(f"{sec}.{key}: {exc}", lineno) from exc
    return ScenarioConfig(values)


def load_config(path, overrides: Sequence[str] = (), preset: Optional[str] = None
                ) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return loads_config(fh.read(), overrides, preset)


def dumps_config(cfg: ScenarioConfig) -> str:
    lines = []
    for sec, keys in SCHEMA.items():
        lines.append(f"[{sec}]")
        for key, kind in keys.items():
            lines.append(f"{key} = {_format_value(kind, cfg.values[sec][key])}")
        lines.append("")
    return "\n".join(lines)
