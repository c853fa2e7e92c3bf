"""Exact and tilt-averaged combiner SNR for the array-of-arrays receiver.

The exact combiners operate on per-PD received powers.  The tilt-averaged
forms fold the beam-placement statistics into three piecewise regimes and
collapse all fixed factors into a single design constant A_x such that
the small-spot average MRC SNR is d^3 / A_x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .array_geometry import InnerArray, OuterArray
from .constants import BOLTZMANN
from .pd_model import PinPhotodetector, TiaConfig, bandwidth_optimal, ct_coefficient, thermal_noise_variance


@dataclass(frozen=True)
class SnrContext:
    """Everything fixed while (d, L) are being designed.

    pd carries the detector materials (its side length is the nominal
    design value); xi and p_lens describe one lensed cell of the outer
    array.
    """

    pd: PinPhotodetector
    tia: TiaConfig
    inner: InnerArray
    outer: OuterArray
    xi: float
    p_lens: float

    @property
    def bandwidth(self) -> float:
        return bandwidth_optimal(self.pd)

    @property
    def noise_variance(self) -> float:
        return thermal_noise_variance(self.tia, self.bandwidth)


def mrc_snr_exact(powers, responsivity: float, noise_variance: float) -> float:
    """Maximum ratio combining: sum of per-branch SNRs."""
    if noise_variance <= 0:
        raise ValueError("noise variance must be positive")
    p = np.asarray(powers, dtype=float)
    return float(np.sum((responsivity * p) ** 2) / noise_variance)


def egc_snr_exact(powers, responsivity: float, noise_variance: float) -> float:
    """Equal gain combining: coherent signal sum over n_pd noise branches."""
    if noise_variance <= 0:
        raise ValueError("noise variance must be positive")
    p = np.asarray(powers, dtype=float)
    return float(np.sum(responsivity * p) ** 2 / (p.size * noise_variance))


def ax_constant(ctx: SnrContext) -> float:
    """Design constant A_x (m^3) collapsing noise, geometry and link terms.

    avg_mrc_snr in the small-spot regime equals d^3 / A_x exactly.
    """
    ct = ct_coefficient(ctx.pd)
    signal = ctx.pd.responsivity * ctx.xi * ctx.p_lens
    return (4.0 * BOLTZMANN * ctx.tia.temperature * ctx.tia.f_n
            * ctx.inner.side ** 2
            / (ctx.inner.n_pd * math.sqrt(ctx.outer.n_a) * ct
               * ctx.tia.r_f * signal ** 2))


def _mrc_branches(ax: float, array_side: float, d, w2):
    spot_area = math.pi * np.square(w2)
    d = np.asarray(d, dtype=float)
    small = d ** 3 / ax
    mid = d ** 5 / (spot_area * ax)
    large = array_side ** 2 * d ** 5 / (spot_area ** 2 * ax)
    return small, mid, large


def _select_regime(array_side: float, d, w2, small, mid, large):
    d = np.asarray(d, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    spi = math.sqrt(math.pi)
    cond_small = w2 * spi <= d
    cond_mid = (w2 * spi > d) & (w2 * spi <= array_side)
    out = np.select([cond_small, cond_mid], [small, mid], default=large)
    if out.ndim == 0:
        return float(out)
    return out


def avg_mrc_snr(ctx: SnrContext, d, w2):
    """Tilt-averaged MRC SNR of the full receiver at PD side d, spot w2.

    Piecewise in the spot regime; continuous at both regime boundaries.
    The noise bandwidth tracks the design variable through C_t * d.
    Accepts scalars or arrays.
    """
    ax = ax_constant(ctx)
    small, mid, large = _mrc_branches(ax, ctx.inner.side, d, w2)
    return _select_regime(ctx.inner.side, d, w2, small, mid, large)


def avg_egc_snr(ctx: SnrContext, d, w2):
    """Tilt-averaged EGC SNR; equals MRC in the large-spot regime and is
    n_pd below it for small spots."""
    ax = ax_constant(ctx)
    small, mid, large = _mrc_branches(ax, ctx.inner.side, d, w2)
    d_arr = np.asarray(d, dtype=float)
    egc_small = small / ctx.inner.n_pd
    egc_mid = d_arr ** 5 / (ctx.inner.side ** 2 * ax)
    return _select_regime(ctx.inner.side, d, w2, egc_small, egc_mid, large)


def mrc_egc_gain_db(n_pd: int) -> float:
    """Small-spot averaged MRC advantage over EGC: 10 log10(n_pd) dB."""
    if n_pd < 1:
        raise ValueError("n_pd must be at least 1")
    return 10.0 * math.log10(n_pd)
