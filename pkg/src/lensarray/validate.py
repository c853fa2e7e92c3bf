"""Built-in verification battery: calibration anchors and cross-checks.

Each check carries (expected, actual, absolute tolerance).  The battery
re-derives everything from the supplied configuration (default: the
bundled OOK reference), so perturbing a physical parameter makes the
corresponding calibration check fail loudly.
"""

from __future__ import annotations

import math
from importlib import resources
from typing import Optional

import numpy as np

from . import config as cfgmod
from .array_geometry import InnerArray, OuterArray, max_pd_side
from .modulation import DcoOfdm, Ook, extremum_constant, rate_ofdm, rate_ook, snr_gap, snr_required
from .optics import TangentFovModel, beam_spot_coefficients, defocus_for_spot, fov_from_L, L_max_from_fov
from .optimizer import OptimizationContext, solve
from .oracle import GridSpec, McSpec, grid_search, mc_sum_ai_squared, rng_for
from .pd_model import PinPhotodetector, TiaConfig, bandwidth_optimal
from .snr import SnrContext, avg_mrc_snr, egc_snr_exact, mrc_snr_exact


def bundled_config(name: str = "paper_ook.cfg") -> cfgmod.DesignConfig:
    text = resources.files("lensarray.data").joinpath(name).read_text()
    return cfgmod.loads(text)


def random_octx(rng: np.random.Generator, scheme) -> OptimizationContext:
    """Randomized but well-posed optimization context for oracle checks."""
    spot_b0 = rng.uniform(0.5e-6, 2.0e-6)
    spot_b1 = rng.uniform(0.4, 0.8)
    from .optics import BeamSpotModel
    spot = BeamSpotModel(b0=spot_b0, b1=spot_b1, f_b=820e-6, eta=0.5)
    array_side = 400e-6
    n_pd = int(rng.choice([1, 4, 9, 16, 25, 36, 49, 64, 81, 100]))
    ff = rng.uniform(0.4, 1.0)
    d_max = max_pd_side(n_pd, array_side, ff)
    d_min = rng.uniform(2e-6, 0.5 * d_max)
    gamma_req = snr_required(scheme, 1e-3)
    d_delta = d_max * 10.0 ** rng.uniform(-0.7, 0.35)
    ax = d_delta ** 3 / gamma_req
    gap = nu = None
    if isinstance(scheme, DcoOfdm):
        gap = snr_gap(1e-3)
        nu = scheme.subcarrier_efficiency
    return OptimizationContext(
        n_pd=n_pd, n_a=64, ct=1.874e-6, ax=ax, gamma_req=gamma_req,
        spot=spot, fov_model=TangentFovModel(array_side, 1.45e-3, 820e-6),
        array_side=array_side, d_min=d_min, d_max=d_max,
        l_max=float(rng.uniform(0.3, 1.0)) * spot.f_b, snr_gap=gap, nu=nu)


def _check(name, expected, actual, tolerance):
    return {"name": name, "expected": float(expected), "actual": float(actual),
            "tolerance": float(tolerance),
            "passed": bool(abs(actual - expected) <= tolerance)}


def run_battery(cfg: Optional[cfgmod.DesignConfig] = None):
    if cfg is None:
        cfg = bundled_config()
    resolved = cfgmod.resolve(cfg)
    checks = []

    # Bandwidth calibration pair and the rate identities they imply.
    pd1 = resolved.pd_template.with_side(44.81e-6)
    pd2 = resolved.pd_template.with_side(53.33e-6)
    checks.append(_check("bandwidth_at_44.81um_ghz", 11.91, bandwidth_optimal(pd1) / 1e9,
                         0.005 * 11.91))
    checks.append(_check("bandwidth_at_53.33um_ghz", 10.00, bandwidth_optimal(pd2) / 1e9,
                         0.005 * 10.00))
    checks.append(_check("ook_rate_identity_gbps", 23.82,
                         rate_ook(bandwidth_optimal(pd1)) / 1e9, 0.005 * 23.82))
    checks.append(_check("ofdm_rate_identity_gbps", 21.14,
                         rate_ofdm(10e9, 11.85, DcoOfdm(512), 1e-3) / 1e9,
                         0.005 * 21.14))

    # Spot-model anchors.
    spot = resolved.spot
    checks.append(_check("defocus_for_44.81um_um", 785.0,
                         defocus_for_spot(spot, 44.81e-6).distance * 1e6, 1.0))
    checks.append(_check("defocus_for_53.33um_um", 778.0,
                         defocus_for_spot(spot, 53.33e-6).distance * 1e6, 1.0))
    analytic = beam_spot_coefficients(resolved.lens, 0.5)
    checks.append(_check("spot_slope_b1", 0.69, analytic.b1, 0.01))

    # Threshold constants.
    checks.append(_check("gamma_req_ook", 9.549, snr_required(Ook(), 1e-3), 0.01))
    checks.append(_check("snr_gap_1e-3", 3.532, snr_gap(1e-3), 0.005))
    checks.append(_check("gamma_req_ofdm", 10.60, snr_required(DcoOfdm(512), 1e-3), 0.05))
    checks.append(_check("extremum_x3", 15.80, extremum_constant(3), 0.02))
    checks.append(_check("extremum_x5", 142.32, extremum_constant(5), 0.10))

    # Geometry limits.
    checks.append(_check("d_max_49_um", 45.71,
                         max_pd_side(49, resolved.array_side, 0.64) * 1e6, 0.01))
    checks.append(_check("d_max_36_um", 53.33,
                         max_pd_side(36, resolved.array_side, 0.64) * 1e6, 0.01))

    # Tangent FOV anchors.
    fov_model = TangentFovModel(resolved.array_side, resolved.lens.f_e, resolved.lens.f_b)
    checks.append(_check("fov_at_820um_deg", 15.7, fov_from_L(fov_model, 820e-6), 0.1))
    checks.append(_check("fov_at_785um_deg", 16.1, fov_from_L(fov_model, 785e-6), 0.2))
    checks.append(_check("l_max_at_15deg_um", 820.0,
                         L_max_from_fov(fov_model, 15.0, resolved.lens.f_b) * 1e6, 0.5))

    # Averaged-SNR branch continuity at both regime boundaries.
    rng = rng_for(20240817)
    worst = 0.0
    for _ in range(50):
        ctx = _random_snr_context(rng)
        d = ctx.inner.pd_side
        from .optimizer import snr_branch
        from .snr import ax_constant
        ax = ax_constant(ctx)
        w_small = d / math.sqrt(math.pi)
        w_large = ctx.inner.side / math.sqrt(math.pi)
        b1v = snr_branch(1, ax, ctx.inner.side, d, w_small)
        b2v = snr_branch(2, ax, ctx.inner.side, d, w_small)
        worst = max(worst, abs(b1v - b2v) / b1v)
        b2v = snr_branch(2, ax, ctx.inner.side, d, w_large)
        b3v = snr_branch(3, ax, ctx.inner.side, d, w_large)
        worst = max(worst, abs(b2v - b3v) / b2v)
    checks.append(_check("snr_branch_continuity_rel", 0.0, worst, 1e-12))

    # Exact combiners: MRC never below EGC.
    violations = 0
    for _ in range(200):
        powers = rng.uniform(0.0, 1e-6, size=int(rng.integers(1, 10)) ** 2)
        if mrc_snr_exact(powers, 0.5, 1e-12) < egc_snr_exact(powers, 0.5, 1e-12) * (1 - 1e-12):
            violations += 1
    checks.append(_check("mrc_ge_egc_violations", 0, violations, 0))

    # Overlap-statistic approximation in its validity window.
    inner = InnerArray(n_pd=64, side=400e-6, pd_side=40e-6)
    w2 = 160e-6
    est = mc_sum_ai_squared(inner, w2, McSpec(samples=20_000, seed=7))
    approx = math.pi * w2 ** 2 * inner.fill_factor * inner.pd_side ** 2
    checks.append(_check("overlap_mc_vs_model_ratio", 1.0, est.value / approx,
                         0.10 + 3 * est.stderr / approx))

    # Closed form never loses to a coarse grid oracle.
    worst_ratio = 1.0
    agree = True
    for scheme in (Ook(), DcoOfdm(512)):
        for _ in range(3):
            octx = random_octx(rng, scheme)
            sol = solve(octx, scheme)
            grid = grid_search(octx, scheme, GridSpec(d_steps=100, l_steps=100))
            if grid.feasible and not sol.feasible:
                agree = False
            if grid.feasible and sol.feasible and grid.rate > 0:
                worst_ratio = min(worst_ratio, sol.rate / grid.rate)
    checks.append(_check("oracle_feasibility_agreement", 1, int(agree), 0))
    checks.append(_check("oracle_rate_ratio_min", 1.0, worst_ratio, 1e-6))

    # Rate-FOV trade-off direction on the configured receiver.
    rates = []
    for fov in (12.0, 18.0, 24.0, 30.0, 36.0):
        try:
            l_max = L_max_from_fov(resolved.fov_model, fov, resolved.spot.f_b)
        except Exception:
            rates.append(0.0)
            continue
        best = 0.0
        for n_pd in cfgmod.pd_counts(cfg):
            octx_full = resolved.optimization_context(n_pd, cfgmod.array_counts(cfg)[0])
            octx = _with_l_max(octx_full, l_max)
            s = solve(octx, resolved.scheme)
            if s.feasible:
                best = max(best, s.rate)
        rates.append(best)
    increases = sum(1 for a, b in zip(rates, rates[1:]) if b > a * (1 + 1e-9))
    checks.append(_check("rate_fov_monotone_violations", 0, increases, 0))
    return checks


def _with_l_max(octx: OptimizationContext, l_max: float) -> OptimizationContext:
    from dataclasses import replace
    return replace(octx, l_max=l_max)


def _random_snr_context(rng: np.random.Generator) -> SnrContext:
    n_pd = int(rng.choice([1, 4, 9, 16, 25, 36, 49, 64]))
    array_side = 400e-6
    d = rng.uniform(5e-6, max_pd_side(n_pd, array_side, 1.0))
    pd = PinPhotodetector(d=d, r_s=rng.uniform(5, 9), r_l=50.0,
                          eps_r=rng.uniform(5, 14), v_s=rng.uniform(3e4, 1e5),
                          responsivity=rng.uniform(0.3, 1.0))
    tia = TiaConfig(r_f=rng.uniform(100, 1000), f_n_db=rng.uniform(1, 8),
                    temperature=rng.uniform(270, 330))
    inner = InnerArray(n_pd=n_pd, side=array_side, pd_side=d)
    outer = OuterArray.from_tiling(int(rng.choice([4, 16, 64])), 0.02)
    return SnrContext(pd=pd, tia=tia, inner=inner, outer=outer,
                      xi=rng.uniform(0.05, 0.4), p_lens=10 ** rng.uniform(-7, -4))
