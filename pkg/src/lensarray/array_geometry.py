"""Inner/outer array layout and exact disc-square overlap geometry."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError

SQRT_PI = math.sqrt(math.pi)


def is_perfect_square(n: int) -> bool:
    if n < 1:
        return False
    r = math.isqrt(n)
    return r * r == n


class Regime(enum.Enum):
    """Spot size relative to detector and array (area-equivalent sides)."""

    SMALL_SPOT = "small"
    INTERMEDIATE = "intermediate"
    LARGE_SPOT = "large"


def regime_of(d: float, array_side: float, w2: float) -> Regime:
    """Classify the spot radius w2 against PD side d and array side D.

    Boundaries are closed on the smaller-spot side: w2 == d/sqrt(pi) is
    SMALL_SPOT and w2 == D/sqrt(pi) is INTERMEDIATE.
    """
    if not 0 < d <= array_side:
        raise ValueError("require 0 < d <= array side")
    if w2 * SQRT_PI <= d:
        return Regime.SMALL_SPOT
    if w2 * SQRT_PI <= array_side:
        return Regime.INTERMEDIATE
    return Regime.LARGE_SPOT


@dataclass(frozen=True)
class InnerArray:
    """Square lattice of n_pd PDs of side d on a chip of side D.

    PDs are centered in equal cells of pitch D / sqrt(n_pd).
    """

    n_pd: int
    side: float
    pd_side: float

    def __post_init__(self):
        if not is_perfect_square(self.n_pd):
            raise GeometryError(f"n_pd must be a perfect square, got {self.n_pd}")
        if self.side <= 0 or self.pd_side <= 0:
            raise ValueError("array and PD side lengths must be positive")
        if self.pd_side > self.side / math.sqrt(self.n_pd) * (1 + 1e-12):
            raise GeometryError(
                f"PD side {self.pd_side} exceeds the lattice cell "
                f"{self.side / math.sqrt(self.n_pd)} (fill factor above 1)")

    @property
    def pitch(self) -> float:
        return self.side / math.isqrt(self.n_pd)

    @property
    def fill_factor(self) -> float:
        return self.n_pd * self.pd_side ** 2 / self.side ** 2


@dataclass(frozen=True)
class OuterArray:
    """Array of n_a lensed cells tiling a receiver of side d_a."""

    n_a: int
    side: float
    r_lns: float

    def __post_init__(self):
        if not is_perfect_square(self.n_a):
            raise GeometryError(f"n_a must be a perfect square, got {self.n_a}")
        if self.side <= 0 or self.r_lns <= 0:
            raise ValueError("receiver side and lens radius must be positive")
        implied = (self.side / (2.0 * self.r_lns)) ** 2
        if abs(implied - self.n_a) > 1e-6 * self.n_a:
            raise GeometryError(
                f"lens pitch {self.r_lns} does not tile side {self.side} "
                f"into {self.n_a} cells")

    @classmethod
    def from_tiling(cls, n_a: int, side: float) -> "OuterArray":
        """Lenses tile the receiver footprint: r_lns = side / (2 sqrt(n_a))."""
        if not is_perfect_square(n_a):
            raise GeometryError(f"n_a must be a perfect square, got {n_a}")
        return cls(n_a=n_a, side=side, r_lns=side / (2.0 * math.sqrt(n_a)))


@dataclass(frozen=True)
class BeamFootprint:
    """Uniform-intensity disc on the array plane."""

    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("footprint radius must be positive")


def fill_factor(n_pd: int, d: float, array_side: float) -> float:
    """Photosensitive area fraction n_pd * d^2 / D^2."""
    ff = n_pd * d ** 2 / array_side ** 2
    if ff > 1 + 1e-12:
        raise GeometryError(f"fill factor {ff} exceeds 1")
    return ff


def max_pd_side(n_pd: int, array_side: float, ff_target: float) -> float:
    """Largest PD side honoring the fill-factor budget: D * sqrt(FF / n_pd)."""
    if not 0 < ff_target <= 1:
        raise ValueError("fill-factor target must be in (0, 1]")
    return array_side * math.sqrt(ff_target / n_pd)


def pd_centers(array: InnerArray) -> np.ndarray:
    """(n_pd, 2) centers of the PD lattice, array centered at the origin."""
    n = math.isqrt(array.n_pd)
    coords = (np.arange(n) + 0.5) * array.pitch - array.side / 2.0
    gx, gy = np.meshgrid(coords, coords)
    return np.column_stack([gx.ravel(), gy.ravel()])


def _quarter_disc_box_area(x, y, r):
    """Area of {u^2 + v^2 <= r^2} within [0, x] x [0, y] for x, y >= 0."""
    x = np.minimum(np.maximum(x, 0.0), r)
    y = np.minimum(np.maximum(y, 0.0), r)
    r2 = r * r
    corner_inside = x * x + y * y <= r2
    # Arc case: flat part up to u* = sqrt(r^2 - y^2), then under the arc.
    ustar = np.minimum(np.sqrt(np.maximum(r2 - y * y, 0.0)), x)

    def antideriv(u):
        return 0.5 * (u * np.sqrt(np.maximum(r2 - u * u, 0.0))
                      + r2 * np.arcsin(np.clip(u / r, -1.0, 1.0)))

    arc_area = y * ustar + antideriv(x) - antideriv(ustar)
    return np.where(corner_inside, x * y, arc_area)


def _signed_corner_area(x, y, r):
    return np.sign(x) * np.sign(y) * _quarter_disc_box_area(np.abs(x), np.abs(y), r)


def disc_rect_overlap(cx, cy, x1, x2, y1, y2, r):
    """Exact area of disc((cx, cy), r) intersected with [x1,x2] x [y1,y2].

    All arguments broadcast; uses the four-corner decomposition of the
    rectangle relative to the disc center.
    """
    return (_signed_corner_area(x2 - cx, y2 - cy, r)
            - _signed_corner_area(x1 - cx, y2 - cy, r)
            - _signed_corner_area(x2 - cx, y1 - cy, r)
            + _signed_corner_area(x1 - cx, y1 - cy, r))


def disc_square_overlap(footprint: BeamFootprint, square_center, side: float) -> float:
    """Exact overlap area of the beam disc with one axis-aligned square."""
    if side <= 0:
        raise ValueError("square side must be positive")
    cx, cy = footprint.center
    sx, sy = square_center
    h = side / 2.0
    return float(disc_rect_overlap(cx, cy, sx - h, sx + h, sy - h, sy + h,
                                   footprint.radius))


def per_pd_power(array: InnerArray, footprint: BeamFootprint,
                 p_lens: float, xi: float) -> np.ndarray:
    """Received power on each PD: xi * P_lens * A_i / (pi * W2^2)."""
    centers = pd_centers(array)
    h = array.pd_side / 2.0
    cx, cy = footprint.center
    areas = disc_rect_overlap(cx, cy,
                              centers[:, 0] - h, centers[:, 0] + h,
                              centers[:, 1] - h, centers[:, 1] + h,
                              footprint.radius)
    return xi * p_lens * areas / (math.pi * footprint.radius ** 2)
