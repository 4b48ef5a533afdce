"""Result tables and their CSV form.

Layout: a schema tag comment line, optional ``# key = value`` metadata
comments, the header row, then data rows. Floats use 12 significant digits
in scientific notation, booleans 0/1, missing values an empty cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, List, Sequence, Tuple

SCHEMA_VERSION = "v1"

COLUMNS = {
    "potential-cut": ("z_m", "u_cp_J", "u_ew_J", "u_magn_J", "u_g_J", "u_tot_J", "u_tot_uK"),
    "potential-map": ("x_m", "z_m", "u_tot_J", "u_tot_uK"),
    "minimize": ("z0_m", "has_trap", "z_min_m", "u_min_J", "z_barrier_m", "u_barrier_J",
                 "barrier_height_J", "saddle_x_m", "u_saddle_J", "trap_depth_J",
                 "trap_depth_uK", "b_field_T"),
    "sweep-z0": ("z0_m", "has_trap", "z_min_m", "u_min_J", "z_barrier_m", "u_barrier_J",
                 "barrier_height_J", "saddle_x_m", "trap_depth_J", "b_field_T", "error"),
    "tf-density": ("z_m", "u_rel_J", "density_m3"),
    "rf-map": ("z0_m", "b_field_T", "rf_freq_Hz"),
    "loss-curve": ("z0_m", "fraction", "evap_loss", "tunnel_loss"),
    "ramp-profile": ("t_s", "z0_m"),
}


def format_cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.11e}"
    if hasattr(v, "dtype"):
        return format_cell(v.item())
    return str(v)


@dataclass
class ResultTable:
    name: str
    columns: Tuple[str, ...]
    rows: List[Sequence[Any]] = field(default_factory=list)
    meta: List[Tuple[str, Any]] = field(default_factory=list)

    @classmethod
    def for_command(cls, name: str) -> "ResultTable":
        return cls(name, COLUMNS[name])

    def add(self, *row):
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} cells, schema has {len(self.columns)}")
        self.rows.append(row)

    def to_csv(self) -> str:
        lines = [f"# surftrap-csv {SCHEMA_VERSION} {self.name}"]
        lines += [f"# {k} = {format_cell(v)}" for k, v in self.meta]
        lines.append(",".join(self.columns))
        lines += [",".join(format_cell(c) for c in row) for row in self.rows]
        return "\n".join(lines) + "\n"


def read_csv(text: str):
    """Parse a surftrap CSV back into (tag, meta dict, header, rows of str)."""
    lines = text.splitlines()
    tag = lines[0]
    meta = {}
    i = 1
    while i < len(lines) and lines[i].startswith("#"):
        k, _, v = lines[i][1:].partition("=")
        meta[k.strip()] = v.strip()
        i += 1
    header = lines[i].split(",")
    rows = [ln.split(",") for ln in lines[i + 1:]]
    return tag, meta, header, rows
