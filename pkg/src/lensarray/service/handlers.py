"""Service operations shared by the HTTP endpoints and the CLI."""

from __future__ import annotations

import math
from dataclasses import replace
from typing import List, Optional

import numpy as np

from .. import config as cfgmod
from ..errors import InfeasibleConstraintError, ModelValidityError
from ..modulation import DcoOfdm, extremum_constant, snr_gap
from ..optics import beam_spot_radius, fov_from_L
from ..optimizer import DesignSolution, feasible_region, solve_global
from ..oracle import McSpec, mc_average_snr
from ..pd_model import ct_coefficient
from ..snr import avg_egc_snr, avg_mrc_snr
from . import schemas

# PD side used for the (44.81 um) calibration diagnostic ratio.
REFERENCE_D_DELTA = 44.81e-6


def _solution_model(resolved: cfgmod.ResolvedDesign,
                    sol: DesignSolution) -> schemas.SolutionModel:
    fov_lo = None
    if sol.feasible and sol.l_lo is not None:
        try:
            fov_lo = fov_from_L(resolved.fov_model, sol.l_lo)
        except ModelValidityError:
            fov_lo = None
    return schemas.SolutionModel(
        feasible=sol.feasible, n_pd=sol.n_pd, n_a=sol.n_a, case_id=sol.case_id,
        d_opt_um=None if sol.d_opt is None else sol.d_opt * 1e6,
        l_lo_um=None if sol.l_lo is None else sol.l_lo * 1e6,
        l_hi_um=None if sol.l_hi is None else sol.l_hi * 1e6,
        regime=None if sol.regime is None else sol.regime.value,
        rate_gbps=sol.rate / 1e9, snr=sol.snr, fov_at_l_lo_deg=fov_lo)


def run_design(cfg: cfgmod.DesignConfig) -> schemas.DesignReport:
    resolved = cfgmod.resolve(cfg)
    best, per_config = solve_global(resolved.optimization_context, resolved.scheme,
                                    cfgmod.pd_counts(cfg), cfgmod.array_counts(cfg))
    gap = snr_gap(cfg.constraints.ber_req) if isinstance(resolved.scheme, DcoOfdm) else None
    ct = ct_coefficient(resolved.pd_template)
    calibration = schemas.CalibrationModel(
        ct_s_per_m=ct, ax_m3=float("nan"), gamma_req=resolved.gamma_req,
        snr_gap=gap, extremum_x3=extremum_constant(3), extremum_x5=extremum_constant(5))
    slack = schemas.SlackModel()
    if best.feasible:
        octx = resolved.optimization_context(best.n_pd, best.n_a)
        d_delta = (octx.ax * octx.gamma_req) ** (1.0 / 3.0)
        calibration = replace_model(
            calibration, ax_m3=octx.ax, d_delta_um=d_delta * 1e6,
            d_delta_ratio_to_reference=d_delta / REFERENCE_D_DELTA,
            xi=octx.xi, p_lens_w=octx.p_lens)
        slack = schemas.SlackModel(
            snr_slack=best.diagnostics.get("snr_slack"),
            d_headroom_um=(octx.d_max - best.d_opt) * 1e6,
            l_headroom_um=(octx.l_max - best.l_hi) * 1e6)
    return schemas.DesignReport(
        config=schemas.ConfigPayload.from_design_config(cfg),
        solution=_solution_model(resolved, best),
        slack=slack, calibration=calibration,
        per_configuration=[_solution_model(resolved, s) for s in per_config])


def replace_model(model, **updates):
    return model.model_copy(update=updates)


def run_sweep(cfg: cfgmod.DesignConfig, fov_min: float, fov_max: float,
              fov_step: float) -> schemas.SweepResponse:
    if fov_step <= 0:
        raise ValueError("FOV step must be positive")
    rows: List[schemas.SweepRow] = []
    fov = fov_min
    while fov <= fov_max + 1e-9:
        swept = replace(cfg, constraints=replace(cfg.constraints, fov_req_deg=fov))
        resolved = cfgmod.resolve(swept)
        for n_pd in cfgmod.pd_counts(cfg):
            for n_a in cfgmod.array_counts(cfg):
                try:
                    octx = resolved.optimization_context(n_pd, n_a)
                    from ..optimizer import solve
                    sol = solve(octx, resolved.scheme)
                except (InfeasibleConstraintError, ModelValidityError):
                    sol = DesignSolution(feasible=False, n_pd=n_pd, n_a=n_a,
                                         case_id="infeasible")
                rows.append(schemas.SweepRow(
                    fov_req_deg=fov, n_pd=n_pd, n_a=n_a,
                    d_opt_um=None if sol.d_opt is None else sol.d_opt * 1e6,
                    l_lo_um=None if sol.l_lo is None else sol.l_lo * 1e6,
                    l_hi_um=None if sol.l_hi is None else sol.l_hi * 1e6,
                    rate_gbps=sol.rate / 1e9, feasible=sol.feasible))
        fov += fov_step
    return schemas.SweepResponse(rows=rows)


def _db(x: float) -> Optional[float]:
    if x is None or x <= 0:
        return None
    return 10.0 * math.log10(x)


def run_snr_curve(cfg: cfgmod.DesignConfig, combiner: str = "mrc",
                  mc_samples: int = 0, seed: int = 0,
                  l_steps: int = 60) -> schemas.SnrCurveResponse:
    if cfg.array.n_pd is None or cfg.receiver.n_a is None:
        raise cfgmod.ConfigError("snr-curve requires scalar n_pd and n_a",
                                 "array", "n_pd")
    resolved = cfgmod.resolve(cfg)
    n_pd, n_a = cfg.array.n_pd, cfg.receiver.n_a
    ctx = resolved.snr_context(n_pd, n_a)
    d = ctx.inner.pd_side
    combiners = ["mrc", "egc"] if combiner == "both" else [combiner]
    distances = np.linspace(0.0, resolved.spot.f_b, l_steps)
    rows = []
    for distance in distances:
        w2 = beam_spot_radius(resolved.spot, float(distance))
        row = {"l_um": float(distance) * 1e6}
        for comb in combiners:
            analytic = (avg_mrc_snr if comb == "mrc" else avg_egc_snr)(ctx, d, w2)
            row[f"analytic_{comb}_db"] = _db(float(analytic))
            if mc_samples > 0:
                est = mc_average_snr(ctx, d, w2, comb,
                                     McSpec(samples=mc_samples, seed=seed))
                row[f"mc_{comb}_db"] = _db(est.value)
                stderr_db = (10.0 / math.log(10) * est.stderr / est.value
                             if est.value > 0 else None)
                row[f"mc_stderr_{comb}_db"] = stderr_db
        rows.append(schemas.SnrCurveRow(**row))
    return schemas.SnrCurveResponse(rows=rows)


def run_feasible(cfg: cfgmod.DesignConfig, d_steps: int = 80,
                 l_steps: int = 80) -> schemas.FeasibleResponse:
    if cfg.array.n_pd is None or cfg.receiver.n_a is None:
        raise cfgmod.ConfigError("feasible-region dump requires scalar n_pd and n_a",
                                 "array", "n_pd")
    resolved = cfgmod.resolve(cfg)
    octx = resolved.optimization_context(cfg.array.n_pd, cfg.receiver.n_a)
    d_grid = np.linspace(octx.d_min, octx.d_max, d_steps)
    l_grid = np.linspace(0.0, resolved.spot.f_b, l_steps)
    grid = feasible_region(octx, resolved.scheme, d_grid, l_grid)
    rows = []
    for problem in (1, 2, 3):
        sat = grid.satisfies_all[problem - 1]
        for i, dv in enumerate(grid.d_values):
            for j, lv in enumerate(grid.l_values):
                rows.append(schemas.FeasibleRow(
                    d_um=dv * 1e6, l_um=lv * 1e6, problem_id=problem,
                    satisfies_all=bool(sat[i, j])))
    return schemas.FeasibleResponse(rows=rows)


def run_validate(cfg: Optional[cfgmod.DesignConfig] = None) -> schemas.ValidationReport:
    from ..validate import run_battery
    checks = run_battery(cfg)
    return schemas.ValidationReport(
        checks=[schemas.ValidationCheck(**c) for c in checks],
        all_passed=all(c["passed"] for c in checks))
