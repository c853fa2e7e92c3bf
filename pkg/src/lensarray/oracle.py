"""Brute-force verification: grid search and Monte-Carlo tilt averaging.

Everything here is an independent check on the closed forms: the grid
search re-evaluates the optimizer's own predicates at every node, and the
Monte-Carlo estimators average the exact geometric combiner SNR over
random beam placements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .array_geometry import InnerArray, disc_rect_overlap, pd_centers
from .modulation import ModulationScheme
from .optimizer import OptimizationContext, rate_at, avg_snr_piecewise, BOUNDARY_RTOL
from .pd_model import bandwidth_optimal, thermal_noise_variance
from .snr import SnrContext

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class GridSpec:
    d_steps: int = 400
    l_steps: int = 400

    def __post_init__(self):
        if self.d_steps < 50 or self.l_steps < 50:
            raise ValueError("grids below 50 steps are too coarse for the oracle")


@dataclass(frozen=True)
class McSpec:
    samples: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.samples < 10_000:
            raise ValueError("Monte-Carlo estimates need at least 1e4 samples")


class McEstimate(NamedTuple):
    value: float
    stderr: float
    samples: int


class GridResult(NamedTuple):
    feasible: bool
    d: Optional[float]
    distance: Optional[float]
    rate: float
    feasible_count: int


def rng_for(seed: int) -> np.random.Generator:
    """Counter-based generator (Philox) keyed by the seed.

    Sample i consumes fixed counter positions, so chunked or parallel
    evaluation that advances the counter explicitly reproduces the exact
    same stream regardless of execution order.
    """
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def grid_search(octx: OptimizationContext, scheme: ModulationScheme,
                grid: GridSpec = GridSpec()) -> GridResult:
    """Exhaustive (d, L) search using the optimizer's predicates verbatim."""
    d = np.linspace(octx.d_min, octx.d_max, grid.d_steps)
    distance = np.linspace(0.0, octx.spot.f_b, grid.l_steps)
    w2 = octx.spot.b1 * (octx.spot.f_b - distance) + octx.spot.b0
    dd = d[:, None]
    ww = w2[None, :]
    gamma = avg_snr_piecewise(octx.ax, octx.array_side, dd, ww)
    feasible = ((gamma >= octx.gamma_req * (1.0 - BOUNDARY_RTOL))
                & (distance[None, :] <= octx.l_max * (1.0 + BOUNDARY_RTOL)))
    count = int(np.count_nonzero(feasible))
    if count == 0:
        return GridResult(False, None, None, 0.0, 0)
    rate = np.asarray(rate_at(octx, scheme, dd, ww))
    rate = np.where(feasible, rate, -np.inf)
    flat = int(np.argmax(rate))
    i, j = np.unravel_index(flat, rate.shape)
    return GridResult(True, float(d[i]), float(distance[j]), float(rate[i, j]), count)


# ---------------------------------------------------------------------------
# Monte-Carlo beam placement
# ---------------------------------------------------------------------------

def _tilt_half_range(array_side: float, w2: float) -> float:
    """Largest beam-center offset keeping the spot on the detector lattice.

    Tilt within the FOV walks the spot across the array; offsets beyond
    D/2 - w2 would spill past the lattice under test, so the averaging
    window shrinks accordingly (and collapses to the centered placement
    once the spot outgrows half the array).
    """
    return max(0.0, array_side / 2.0 - w2)


def _placement_areas(inner: InnerArray, w2: float, offsets: np.ndarray) -> np.ndarray:
    """(n_samples, n_cells) exact overlap areas for each beam placement.

    For interior placements the lattice is sampled through one folded
    cell plus its neighborhood, which is equivalent to the full array and
    keeps the cost independent of n_pd.
    """
    pitch = inner.pitch
    half = inner.pd_side / 2.0
    if offsets.size == 0 or (offsets.size and np.all(offsets == 0.0)):
        centers = pd_centers(inner)
        areas = disc_rect_overlap(0.0, 0.0,
                                  centers[:, 0] - half, centers[:, 0] + half,
                                  centers[:, 1] - half, centers[:, 1] + half,
                                  w2)
        return np.broadcast_to(areas, (max(len(offsets), 1), areas.size))
    folded = (offsets + pitch / 2.0) % pitch - pitch / 2.0
    reach = int(math.ceil((w2 + half + pitch / 2.0) / pitch))
    lattice = np.arange(-reach, reach + 1) * pitch
    gx, gy = np.meshgrid(lattice, lattice)
    cx = gx.ravel()[None, :]
    cy = gy.ravel()[None, :]
    sx = folded[:, 0][:, None]
    sy = folded[:, 1][:, None]
    return disc_rect_overlap(sx, sy, cx - half, cx + half, cy - half, cy + half, w2)


def _placement_stats(inner: InnerArray, w2: float, mc: McSpec):
    """Per-sample sum(A_i) and sum(A_i^2) over the tilt distribution."""
    h = _tilt_half_range(inner.side, w2)
    if h == 0.0:
        offsets = np.zeros((1, 2))
        areas = _placement_areas(inner, w2, offsets)
        s1 = np.repeat(np.sum(areas, axis=1), mc.samples)
        s2 = np.repeat(np.sum(areas ** 2, axis=1), mc.samples)
        return s1, s2
    rng = rng_for(mc.seed)
    offsets = rng.uniform(-h, h, size=(mc.samples, 2))
    s1 = np.empty(mc.samples)
    s2 = np.empty(mc.samples)
    block = max(1, 4_000_000 // max(1, (2 * int(math.ceil((w2 + inner.pd_side / 2
                + inner.pitch / 2) / inner.pitch)) + 1) ** 2))
    for i in range(0, mc.samples, block):
        areas = _placement_areas(inner, w2, offsets[i:i + block])
        s1[i:i + block] = np.sum(areas, axis=1)
        s2[i:i + block] = np.sum(areas ** 2, axis=1)
    return s1, s2


def mc_sum_ai_squared(inner: InnerArray, w2: float, mc: McSpec,
                      check_regime: bool = True) -> McEstimate:
    """Monte-Carlo mean of sum(A_i^2) over beam placements (m^4)."""
    if check_regime:
        spi = w2 * SQRT_PI
        if not inner.pd_side < spi <= inner.side:
            raise ValueError(
                "sum(A_i^2) averaging is an intermediate-regime quantity; "
                "pass check_regime=False for diagnostics")
    _, s2 = _placement_stats(inner, w2, mc)
    return McEstimate(float(s2.mean()),
                      float(s2.std(ddof=1) / math.sqrt(s2.size)),
                      mc.samples)


def mc_average_snr(ctx: SnrContext, d: float, w2: float, combiner: str,
                   mc: McSpec) -> McEstimate:
    """Tilt-averaged exact combiner SNR for the array-of-arrays receiver.

    Mean of the exact per-placement MRC or EGC SNR of one inner array,
    scaled by the sqrt(n_a) outer-array combining factor; the noise
    bandwidth follows the PD side under test.
    """
    if combiner not in ("mrc", "egc"):
        raise ValueError(f"combiner must be 'mrc' or 'egc', got {combiner}")
    inner = InnerArray(n_pd=ctx.inner.n_pd, side=ctx.inner.side, pd_side=d)
    pd = ctx.pd.with_side(d)
    sigma2 = thermal_noise_variance(ctx.tia, bandwidth_optimal(pd))
    s1, s2 = _placement_stats(inner, w2, mc)
    intensity = ctx.xi * ctx.p_lens / (math.pi * w2 ** 2)
    scale = math.sqrt(ctx.outer.n_a) * (pd.responsivity * intensity) ** 2 / sigma2
    if combiner == "mrc":
        per_sample = scale * s2
    else:
        per_sample = scale * s1 ** 2 / inner.n_pd
    return McEstimate(float(per_sample.mean()),
                      float(per_sample.std(ddof=1) / math.sqrt(per_sample.size)),
                      mc.samples)
