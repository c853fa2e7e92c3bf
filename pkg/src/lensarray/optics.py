"""Aspheric-lens beam-spot model, FOV mappings and per-lens link budget.

The focused spot shrinks linearly from half the clear aperture at the
lens back surface down to the diffraction limit at the back focal point.
Placing the detector plane short of the focal point (defocusing) trades
per-detector power for field of view.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

from .errors import GeometryError, InfeasibleConstraintError, ModelValidityError

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class LensSpec:
    """Aspheric lens datasheet values.

    f_e: effective focal length (m), measured from the principal plane
    f_b: back focal length (m), measured from the rear surface
    ca: clear aperture diameter (m)
    outer_diameter: physical diameter (m)
    xi_r: transmission coefficient
    wavelength: operating wavelength (m)
    """

    f_e: float
    f_b: float
    ca: float
    outer_diameter: float
    xi_r: float = 0.88
    wavelength: float = 850e-9

    def __post_init__(self):
        if not 0 < self.f_b <= self.f_e:
            raise ValueError("require 0 < back focal length <= effective focal length")
        if not 0 < self.ca <= self.outer_diameter:
            raise ValueError("require 0 < clear aperture <= outer diameter")
        if not 0 < self.xi_r <= 1:
            raise ValueError("transmission coefficient must be in (0, 1]")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")


@dataclass(frozen=True)
class BeamSpotModel:
    """Linear focused-spot model W2(L) = b1 * (f_b - L) + b0.

    b0: spot radius at the back focal point (m)
    b1: shrink slope (dimensionless)
    f_b: back focal length (m)
    eta: fraction of the beam power enclosed by the spot radius
    """

    b0: float
    b1: float
    f_b: float
    eta: float

    def __post_init__(self):
        if self.b0 <= 0:
            raise ValueError("b0 must be positive")
        if not 0 < self.b1 < 1:
            raise ValueError("b1 must be in (0, 1)")
        if not 0 < self.eta < 1:
            raise ValueError("enclosed-power fraction must be in (0, 1)")
        if self.f_b <= 0:
            raise ValueError("back focal length must be positive")


class DefocusResult(NamedTuple):
    distance: float
    clamped: bool


def diffraction_limit(lens: LensSpec) -> float:
    """Smallest resolvable spot radius (m): 1.22 * lambda * f_e / CA."""
    return 1.22 * lens.wavelength * lens.f_e / lens.ca


def beam_spot_coefficients(lens: LensSpec, eta: float = 0.5) -> BeamSpotModel:
    """Derive (b0, b1) from the datasheet and the enclosed-power fraction.

    W2(0) = kappa * CA / 2 and W2(f_b) = kappa * r_DL with kappa = sqrt(eta).
    """
    if not 0 < eta < 1:
        raise ValueError("enclosed-power fraction must be in (0, 1)")
    r_dl = diffraction_limit(lens)
    if lens.ca <= 2.0 * r_dl:
        raise GeometryError(
            f"clear aperture {lens.ca} not larger than twice the diffraction "
            f"limit {r_dl}; spot model degenerates")
    kappa = math.sqrt(eta)
    b0 = r_dl * kappa
    b1 = kappa / (2.0 * lens.f_b) * (lens.ca - 2.0 * r_dl)
    return BeamSpotModel(b0=b0, b1=b1, f_b=lens.f_b, eta=eta)


def beam_spot_radius(model: BeamSpotModel, distance: float) -> float:
    """Spot radius (m) at lens-to-plane distance L in [0, f_b]."""
    if not 0 <= distance <= model.f_b:
        raise ValueError(
            f"distance {distance} outside the compact-receiver range [0, {model.f_b}]")
    return model.b1 * (model.f_b - distance) + model.b0


def defocus_for_spot(model: BeamSpotModel, target_side: float) -> DefocusResult:
    """Distance at which the spot radius equals target_side / sqrt(pi).

    Inverse of beam_spot_radius for the area-equivalent square side.  The
    result is clamped to [0, f_b]; `clamped` reports whether the requested
    spot is unreachable (too small near the focus or larger than the spot
    at the lens).
    """
    raw = model.f_b - (target_side / SQRT_PI - model.b0) / model.b1
    clamped = not 0.0 <= raw <= model.f_b
    return DefocusResult(min(max(raw, 0.0), model.f_b), clamped)


@dataclass(frozen=True)
class TangentFovModel:
    """Full-cone FOV from the imaging tangent relation.

    aperture: side length of the detector plane feature that bounds the
        image (m); f_e, f_b as in LensSpec.  Distances are measured from
        the lens rear surface, hence the f_e - f_b correction.
    """

    aperture: float
    f_e: float
    f_b: float

    def __post_init__(self):
        if self.aperture <= 0:
            raise ValueError("aperture must be positive")

    def fov_deg(self, distance: float) -> float:
        return 2.0 * math.degrees(math.atan(
            self.aperture / (2.0 * (distance + self.f_e - self.f_b))))

    def distance_for_fov(self, fov_req_deg: float) -> float:
        if not 0 < fov_req_deg < 180:
            raise ValueError("required FOV must be in (0, 180) degrees")
        half = math.radians(fov_req_deg / 2.0)
        raw = self.aperture / (2.0 * math.tan(half)) - (self.f_e - self.f_b)
        if raw < 0:
            raise InfeasibleConstraintError(
                f"no lens placement achieves a {fov_req_deg} degree FOV")
        return min(raw, self.f_b)


@dataclass(frozen=True)
class CubicFovModel:
    """Polynomial fit L(FOV) with L in micrometres and FOV in degrees.

    Only valid inside the fitted range; the fit is not extrapolated.
    Note: the default coefficients do not reproduce the tangent model and
    are kept for comparison only.
    """

    a3: float = -0.08506
    a2: float = 6.142
    a1: float = -159.5
    a0: float = 1720.0
    fov_min_deg: float = 10.0
    fov_max_deg: float = 40.0

    def _l_um(self, fov_deg: float) -> float:
        return ((self.a3 * fov_deg + self.a2) * fov_deg + self.a1) * fov_deg + self.a0

    def fov_deg(self, distance: float) -> float:
        lo, hi = self.fov_min_deg, self.fov_max_deg
        l_um = distance * 1e6
        l_lo, l_hi = self._l_um(hi), self._l_um(lo)  # L decreases with FOV
        if not l_lo <= l_um <= l_hi:
            raise ModelValidityError(
                f"distance {distance} outside the fitted FOV range "
                f"[{self.fov_min_deg}, {self.fov_max_deg}] degrees")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self._l_um(mid) > l_um:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def distance_for_fov(self, fov_req_deg: float, f_b: float) -> float:
        if not self.fov_min_deg <= fov_req_deg <= self.fov_max_deg:
            raise ModelValidityError(
                f"required FOV {fov_req_deg} outside the fitted range "
                f"[{self.fov_min_deg}, {self.fov_max_deg}] degrees")
        return min(max(self._l_um(fov_req_deg) * 1e-6, 0.0), f_b)


FovModel = Union[TangentFovModel, CubicFovModel]


def fov_from_L(model: FovModel, distance: float) -> float:
    """Full-cone FOV (degrees) at detector distance L."""
    return model.fov_deg(distance)


def L_max_from_fov(model: FovModel, fov_req_deg: float, f_b: float) -> float:
    """Largest distance (clamped to [0, f_b]) meeting the FOV requirement."""
    if isinstance(model, TangentFovModel):
        return min(model.distance_for_fov(fov_req_deg), f_b)
    return model.distance_for_fov(fov_req_deg, f_b)


def optical_efficiency(lens: LensSpec, r_lns: float, eta: float = 0.5) -> float:
    """Optical collection efficiency of one lensed array cell.

    Product of lens transmission, the enclosed-power fraction implied by
    the spot-radius definition, and the aperture fill of the lens cell,
    (CA / 2 r_lns)^2.
    """
    if r_lns < lens.ca / 2.0:
        raise GeometryError(
            f"lens pitch radius {r_lns} smaller than aperture radius {lens.ca / 2}")
    if not 0 < eta <= 1:
        raise ValueError("enclosed-power fraction must be in (0, 1]")
    return lens.xi_r * eta * (lens.ca / (2.0 * r_lns)) ** 2


def lens_received_power(p_t: float, w_rx: float, r_lns: float) -> float:
    """Power (W) collected by one lens from a wide uniform-ish beam.

    On-axis peak-intensity approximation for a Gaussian beam of radius
    w_rx much larger than the lens: P = 2 * P_t * r_lns^2 / w_rx^2.
    """
    if p_t < 0:
        raise ValueError("transmit power must be non-negative")
    if w_rx < 10.0 * r_lns:
        raise ModelValidityError(
            f"beam radius {w_rx} must be at least 10x the lens radius {r_lns} "
            "for the uniform-intensity approximation")
    return 2.0 * p_t * r_lns ** 2 / w_rx ** 2
