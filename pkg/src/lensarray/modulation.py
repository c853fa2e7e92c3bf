"""Rate models, BER-driven SNR thresholds and rate-extremum constants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

# Lowest QAM order carried by an active subcarrier; sets the OFDM SNR
# threshold gamma_req = snr_gap * (MIN_QAM_ORDER - 1).
MIN_QAM_ORDER = 4


@dataclass(frozen=True)
class Ook:
    """On-off keying; rate is Nyquist-limited to twice the bandwidth."""


@dataclass(frozen=True)
class DcoOfdm:
    """DC-biased optical OFDM with adaptive QAM loading."""

    n_sc: int = 512

    def __post_init__(self):
        if self.n_sc < 4 or self.n_sc % 2:
            raise ValueError(f"subcarrier count must be even and >= 4, got {self.n_sc}")

    @property
    def subcarrier_efficiency(self) -> float:
        """Usable fraction of subcarriers: (n_sc - 2) / n_sc."""
        return (self.n_sc - 2) / self.n_sc


ModulationScheme = Union[Ook, DcoOfdm]


def _check_ber(ber: float):
    if not 0.0 < ber < 0.5:
        raise ValueError(f"target BER must be in (0, 0.5), got {ber}")


def rate_ook(bandwidth: float) -> float:
    """OOK bit rate (bit/s) at the Nyquist limit: 2 * B."""
    if bandwidth < 0:
        raise ValueError("bandwidth must be non-negative")
    return 2.0 * bandwidth


def snr_gap(ber: float) -> float:
    """SNR gap to capacity for the target BER: -ln(5 BER) / 1.5."""
    _check_ber(ber)
    if ber >= 0.2:
        raise ValueError("SNR gap undefined for BER >= 0.2")
    return -math.log(5.0 * ber) / 1.5


def rate_ofdm(bandwidth: float, gamma: float, scheme: DcoOfdm, ber: float) -> float:
    """Achievable DCO-OFDM rate bound: nu * B * log2(1 + gamma / Gamma)."""
    if gamma < 0:
        raise ValueError("SNR must be non-negative")
    gap = snr_gap(ber)
    return scheme.subcarrier_efficiency * bandwidth * math.log2(1.0 + gamma / gap)


def _q_tail(x: float) -> float:
    """Standard normal tail probability Q(x) = erfc(x / sqrt(2)) / 2."""
    return 0.5 * math.erfc(x / _SQRT2)


# Rational approximation coefficients for the inverse normal CDF
# (Acklam's algorithm), used only as the Newton starting point.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)


def _inv_cdf_estimate(p: float) -> float:
    p_low, p_high = 0.02425, 1 - 0.02425
    if p < p_low:
        q = math.sqrt(-2.0 * math.log(p))
        return ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
                / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    if p > p_high:
        return -_inv_cdf_estimate(1.0 - p)
    q = p - 0.5
    r = q * q
    return ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
            / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))


def q_inverse(p: float) -> float:
    """Inverse of the standard normal tail: Q(q_inverse(p)) == p.

    Rational starting estimate refined by Newton iterations against the
    complementary-error-function identity; accurate to better than 1e-10
    relative in the round trip.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"tail probability must be in (0, 1), got {p}")
    x = -_inv_cdf_estimate(p)  # Q(x) = p  <=>  CDF(-x) = p
    for _ in range(4):
        err = _q_tail(x) - p
        pdf = math.exp(-0.5 * x * x) / _SQRT_2PI
        if pdf == 0.0:
            break
        x += err / pdf
    return x


def snr_required(scheme: ModulationScheme, ber: float) -> float:
    """SNR threshold meeting the target BER for the given scheme."""
    _check_ber(ber)
    if isinstance(scheme, Ook):
        return q_inverse(ber) ** 2
    return snr_gap(ber) * (MIN_QAM_ORDER - 1)


@lru_cache(maxsize=None)
def extremum_constant(k: int) -> float:
    """Positive root of k*x/(1+x) = ln(1+x), for the d^k SNR branches.

    The rate d -> (1 / d) * log2(1 + c * d^k) peaks where c * d^k equals
    this root.  Found by bisection in log space; not hard-coded.
    """
    if k not in (3, 5):
        raise ValueError(f"rate exponent must be 3 or 5, got {k}")

    def excess(x: float) -> float:
        return k * x / (1.0 + x) - math.log1p(x)

    lo, hi = math.log(1.0), math.log(1e6)
    if excess(math.exp(lo)) <= 0 or excess(math.exp(hi)) >= 0:
        raise RuntimeError("extremum bracket invalid")
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if excess(math.exp(mid)) > 0:
            lo = mid
        else:
            hi = mid
    return math.exp(0.5 * (lo + hi))
