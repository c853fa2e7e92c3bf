"""PIN photodetector area-bandwidth trade-off and TIA thermal noise.

The 3-dB bandwidth of a square PIN photodetector is limited by the RC
time of the junction capacitance on one side and by the carrier transit
time through the depletion region on the other.  The two limits pull the
optimum depletion length in opposite directions, which yields a strict
area-bandwidth hyperbola B = 1/(C_t * d) at the optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .constants import BOLTZMANN, VACUUM_PERMITTIVITY

# Transit-time bandwidth prefactor: f_3dB = 0.44 * v_s / ell.
TRANSIT_FACTOR = 0.44


@dataclass(frozen=True)
class PinPhotodetector:
    """Square PIN photodetector followed by a TIA input stage.

    d: side length (m); active area is d**2
    r_s: junction series resistance (ohm)
    r_l: TIA input/load resistance (ohm)
    eps_r: relative permittivity of the semiconductor
    v_s: carrier saturation velocity (m/s), hole-limited
    responsivity: photocurrent per optical watt (A/W)
    """

    d: float
    r_s: float = 7.0
    r_l: float = 50.0
    eps_r: float = 11.7
    v_s: float = 4.8e4
    responsivity: float = 0.5

    def __post_init__(self):
        if self.d <= 0:
            raise ValueError(f"PD side length must be positive, got {self.d}")
        if self.r_s < 0 or self.r_l < 0:
            raise ValueError("resistances must be non-negative")
        if self.eps_r <= 1:
            raise ValueError(f"relative permittivity must exceed 1, got {self.eps_r}")
        if self.v_s <= 0:
            raise ValueError("saturation velocity must be positive")
        if not 0 < self.responsivity <= 1.5:
            raise ValueError(f"responsivity out of range (0, 1.5]: {self.responsivity}")

    @property
    def total_resistance(self) -> float:
        """Bandwidth-limiting resistance: the TIA load adds to the junction."""
        return self.r_s + self.r_l

    def with_side(self, d: float) -> "PinPhotodetector":
        return replace(self, d=d)


@dataclass(frozen=True)
class TiaConfig:
    """Transimpedance amplifier noise parameters.

    r_f: feedback resistance (ohm)
    f_n_db: noise figure (dB); converted to linear once at construction
    temperature: ambient temperature (K)
    """

    r_f: float
    f_n_db: float
    temperature: float

    def __post_init__(self):
        if self.r_f <= 0:
            raise ValueError("feedback resistance must be positive")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.f_n_db < 0:
            raise ValueError("noise figure must be non-negative")

    @property
    def f_n(self) -> float:
        """Noise figure on a linear scale."""
        return 10.0 ** (self.f_n_db / 10.0)


def ct_coefficient(pd: PinPhotodetector) -> float:
    """Area-bandwidth constant C_t (s/m): optimal bandwidth is 1/(C_t * d)."""
    r = pd.total_resistance
    return math.sqrt(4.0 * math.pi * r * VACUUM_PERMITTIVITY * pd.eps_r
                     / (TRANSIT_FACTOR * pd.v_s))


def bandwidth_general(pd: PinPhotodetector, ell: float) -> float:
    """Bandwidth (Hz) for an arbitrary depletion-region length ell (m).

    Quadrature combination of the junction-capacitance limit and the
    transit-time limit.
    """
    if ell <= 0:
        raise ValueError(f"depletion length must be positive, got {ell}")
    rc_term = (2.0 * math.pi * pd.total_resistance * VACUUM_PERMITTIVITY
               * pd.eps_r * pd.d ** 2 / ell)
    transit_term = ell / (TRANSIT_FACTOR * pd.v_s)
    return 1.0 / math.hypot(rc_term, transit_term)


def optimal_depletion_length(pd: PinPhotodetector) -> float:
    """Depletion length (m) that maximizes bandwidth_general.

    At the optimum the RC and transit terms are equal, giving
    ell = d * sqrt(0.88 * pi * R * eps0 * eps_r * v_s).
    """
    r = pd.total_resistance
    return pd.d * math.sqrt(2.0 * math.pi * TRANSIT_FACTOR * r
                            * VACUUM_PERMITTIVITY * pd.eps_r * pd.v_s)


def bandwidth_optimal(pd: PinPhotodetector) -> float:
    """Bandwidth (Hz) at the optimal depletion length: B = 1/(C_t * d).

    Upper bound over all depletion lengths; B * d is constant for fixed
    materials.
    """
    return 1.0 / (ct_coefficient(pd) * pd.d)


def thermal_noise_variance(tia: TiaConfig, bandwidth: float) -> float:
    """TIA thermal-noise current variance (A^2) over the given bandwidth."""
    if bandwidth < 0:
        raise ValueError("bandwidth must be non-negative")
    return 4.0 * BOLTZMANN * tia.temperature * tia.f_n * bandwidth / tia.r_f
