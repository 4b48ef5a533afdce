"""Subcommand pipelines: ScenarioConfig in, ResultTable out."""

from __future__ import annotations

import numpy as np

from . import potentials as pot
from .condensate import tf_profile
from .config import ScenarioConfig
from .errors import SurftrapError
from .landscape import analyze_landscape, fit_two_regimes, sweep_z0
from .loss import ramp_position, survival_curve
from .spectroscopy import field_at_atoms, fit_quadratic_rise, rf_point
from .tables import ResultTable

TWO_PI = 2.0 * np.pi


def _uk(cfg, energy):
    return energy / cfg.consts.kB * 1e6


def potential_cut(sc: ScenarioConfig, workers: int = 1) -> ResultTable:
    cfg = sc.trap_configuration()
    c = sc.values["cut"]
    space = np.geomspace if c["log_spacing"] else np.linspace
    z = space(c["z_start"], c["z_stop"], c["n_points"])
    x, y = c["x"], c["y"]
    terms = pot.u_terms(x, y, z, cfg)
    total = pot.u_total(x, y, z, cfg)
    table = ResultTable.for_command("potential-cut")
    table.meta += [("z0_m", cfg.magnet.z0), ("x_m", x), ("y_m", y)]
    for i in range(z.size):
        table.add(float(z[i]), float(terms["cp"][i]), float(terms["ew"][i]),
                  float(terms["magn"][i]), float(terms["g"][i]), float(total[i]),
                  float(_uk(cfg, total[i])))
    return table


def potential_map(sc: ScenarioConfig, workers: int = 1) -> ResultTable:
    cfg = sc.trap_configuration()
    m = sc.values["map"]
    xs = np.linspace(m["x_start"], m["x_stop"], m["nx"])
    zs = np.linspace(m["z_start"], m["z_stop"], m["nz"])
    u = pot.u_total(xs[:, None], 0.0, zs[None, :], cfg)
    table = ResultTable.for_command("potential-map")
    table.meta.append(("z0_m", cfg.magnet.z0))
    for i in range(xs.size):
        for k in range(zs.size):
            table.add(float(xs[i]), float(zs[k]), float(u[i, k]), float(_uk(cfg, u[i, k])))
    return table


def minimize(sc: ScenarioConfig, workers: int = 1) -> ResultTable:
    cfg = sc.trap_configuration()
    rep = analyze_landscape(cfg)
    b = field_at_atoms(cfg, rep) if rep.has_trap else None
    table = ResultTable.for_command("minimize")
    table.meta.append(("sag_m", cfg.sag))
    table.add(cfg.magnet.z0, rep.has_trap, rep.z_min, rep.u_min, rep.z_barrier, rep.u_barrier,
              rep.barrier_height, rep.saddle_x, rep.u_saddle, rep.trap_depth,
              _uk(cfg, rep.trap_depth), b)
    return table


def _sweep(sc: ScenarioConfig, workers: int):
    cfg = sc.trap_configuration()
    return cfg, sweep_z0(cfg, sc.z0_list(), workers=workers)


def sweep(sc: ScenarioConfig, workers: int = 1) -> ResultTable:
    cfg, records = _sweep(sc, workers)
    table = ResultTable.for_command("sweep-z0")
    table.meta.append(("sag_m", cfg.sag))
    try:
        fit = fit_two_regimes(records, sc.values["fit"]["min_side"])
        table.meta += [("slope_i", fit.slope_i), ("intercept_i_m", fit.intercept_i),
                       ("slope_ii", fit.slope_ii), ("breakpoint_z0_m", fit.breakpoint_z0),
                       ("residual_rms_m", fit.residuals)]
    except SurftrapError as exc:
        table.meta.append(("fit_error", exc.code))
    for r in records:
        rep = r.report
        if rep is None:
            table.add(r.z0, False, None, None, None, None, None, None, None, None, r.error)
            continue
        b = field_at_atoms(cfg.with_z0(r.z0), rep) if rep.has_trap else None
        table.add(r.z0, rep.has_trap, rep.z_min, rep.u_min, rep.z_barrier, rep.u_barrier,
                  rep.barrier_height, rep.saddle_x, rep.trap_depth, b, r.error)
    return table


def tf_density(sc: ScenarioConfig, workers: int = 1) -> ResultTable:
    cfg = sc.trap_configuration()
    cd = sc.values["condensate"]
    rep = analyze_landscape(cfg)
    prof = tf_profile(cfg, cd["n_atoms"], rep, n_grid=cd["n_grid"])
    rz = max(prof.tf_radii[2], 1e-9)
    floor = rep.z_barrier if rep.z_barrier is not None else pot.Z_FLOOR
    z = np.linspace(max(rep.z_min - 1.5 * rz, floor * (1 + 1e-9)), rep.z_min + 1.5 * rz,
                    cd["n_points"])
    u = pot.u_total(0.0, 0.0, z, cfg) - rep.u_min
    n = prof.density_at(0.0, 0.0, z)
    table = ResultTable.for_command("tf-density")
    table.meta += [("z0_m", cfg.magnet.z0), ("n_atoms", float(cd["n_atoms"])),
                   ("mu_J", prof.mu), ("mu_nK", prof.mu / cfg.consts.kB * 1e9),
                   ("z_min_m", rep.z_min), ("spilled", prof.spilled)]
    for i in range(z.size):
        table.add(float(z[i]), float(u[i]), float(n[i]))
    return table


def rf_map(sc: ScenarioConfig, workers: int = 1) -> ResultTable:
    cfg, records = _sweep(sc, workers)
    sigma = sc.values["fit"]["rf_uncertainty"]
    points = [rf_point(r.z0, field_at_atoms(cfg.with_z0(r.z0), r.report), cfg.species, sigma)
              for r in records if r.has_trap]
    table = ResultTable.for_command("rf-map")
    try:
        regimes = fit_two_regimes(records, sc.values["fit"]["min_side"])
        pinned = [p for p in points if p.z0 <= regimes.breakpoint_z0]
        q = fit_quadratic_rise(pinned, cfg.species)
        table.meta += [("omega_z_fit_Hz", q.omega_z / TWO_PI), ("b_offset_fit_T", q.b_offset),
                       ("z_ref_fit_m", q.z_ref), ("fit_points", len(pinned))]
    except SurftrapError as exc:
        table.meta.append(("fit_error", exc.code))
    for p in points:
        table.add(p.z0, p.b_field, p.rf_freq)
    return table


def loss_curve(sc: ScenarioConfig, workers: int = 1) -> ResultTable:
    cfg = sc.trap_configuration()
    cd = sc.values["condensate"]
    recs = survival_curve(cfg, sc.ramp(), cd["n_atoms"], sc.z0_list(),
                          sc.values["loss"]["attempt_rate"], workers=workers,
                          n_grid=cd["n_grid"])
    table = ResultTable.for_command("loss-curve")
    table.meta += [("n_atoms", float(cd["n_atoms"])), ("ew_enabled", cfg.ew_enabled)]
    for r in recs:
        table.add(r.z0, r.fraction, r.evap_loss, r.tunnel_loss)
    return table


def ramp_profile(sc: ScenarioConfig, workers: int = 1) -> ResultTable:
    ramp = sc.ramp()
    t = np.linspace(0.0, ramp.tau, sc.values["ramp"]["n_points"])
    table = ResultTable.for_command("ramp-profile")
    table.meta.append(("shape", ramp.shape))
    for v in t:
        table.add(float(v), ramp_position(float(min(v, ramp.tau)), ramp))
    return table


SUBCOMMANDS = {
    "potential-cut": potential_cut,
    "potential-map": potential_map,
    "minimize": minimize,
    "sweep-z0": sweep,
    "tf-density": tf_density,
    "rf-map": rf_map,
    "loss-curve": loss_curve,
    "ramp-profile": ramp_profile,
}


def run_subcommand(name: str, sc: ScenarioConfig, output_path=None, workers: int = 1
                   ) -> ResultTable:
    """Run one pipeline; write CSV to ``output_path`` when given ("-" is stdout)."""
    if name not in SUBCOMMANDS:
        raise ValueError(f"unknown subcommand {name!r}")
    table = SUBCOMMANDS[name](sc, workers=workers)
    if output_path is not None:
        text = table.to_csv()
        if str(output_path) == "-":
            import sys
            sys.stdout.write(text)
        else:
            with open(output_path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    return table
