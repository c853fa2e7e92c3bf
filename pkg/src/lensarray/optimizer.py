"""Closed-form receiver design optimization for OOK and DCO-OFDM.

The rate maximization over (d, L) splits into three sub-problems, one per
spot regime.  Each has a closed-form solution built from a handful of
critical PD side lengths: the SNR-constraint boundaries d_delta,
d_lambda(L), d_g(L) and the rate extrema d_star, d_star2(L), d_star3(L).
The global solution is the best feasible sub-problem solution, re-checked
numerically against the original constraints before being returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .array_geometry import Regime, regime_of
from .modulation import DcoOfdm, ModulationScheme, Ook, extremum_constant
from .optics import BeamSpotModel, FovModel, beam_spot_radius, defocus_for_spot
from .errors import InfeasibleConstraintError, ModelValidityError

SQRT_PI = math.sqrt(math.pi)

# Relative slack when testing regime and constraint boundaries; the
# closed forms place candidates exactly on boundaries where the SNR is
# continuous, so closed-boundary evaluation is safe.
BOUNDARY_RTOL = 1e-9

# Post-hoc verification slack for the returned solution.
VERIFY_RTOL = 1e-6


@dataclass(frozen=True)
class DesignConstraints:
    """User requirements; the fixed geometry lives in OptimizationContext."""

    fov_req_deg: float
    ber_req: float
    d_min: float
    ff_target: float

    def __post_init__(self):
        if self.fov_req_deg <= 0:
            raise ValueError("required FOV must be positive")
        if not 0 < self.ber_req < 0.5:
            raise ValueError("target BER must be in (0, 0.5)")
        if self.d_min <= 0:
            raise ValueError("d_min must be positive")
        if not 0 < self.ff_target <= 1:
            raise ValueError("fill-factor target must be in (0, 1]")


@dataclass(frozen=True)
class OptimizationContext:
    """Fully resolved inputs for one (n_pd, n_a) receiver configuration."""

    n_pd: int
    n_a: int
    ct: float                 # area-bandwidth constant (s/m)
    ax: float                 # SNR design constant (m^3)
    gamma_req: float          # SNR threshold for the target BER
    spot: BeamSpotModel
    fov_model: FovModel
    array_side: float         # inner-array side D (m)
    d_min: float
    d_max: float
    l_max: float              # FOV-constrained lens distance, within [0, f_b]
    snr_gap: Optional[float] = None   # Gamma; required for DCO-OFDM
    nu: Optional[float] = None        # subcarrier efficiency; DCO-OFDM only
    xi: float = float("nan")          # reporting only
    p_lens: float = float("nan")      # reporting only

    def w2(self, distance: float) -> float:
        return beam_spot_radius(self.spot, distance)


@dataclass(frozen=True)
class CriticalSides:
    """Constraint-boundary and extremum PD side lengths.

    The L-dependent members take the spot radius w2 (m).
    """

    d_delta: float
    d_max: float
    d_min: float
    d_star: Optional[float]
    ax: float
    gamma_req: float
    array_side: float
    snr_gap: Optional[float]

    def d_lambda(self, w2: float) -> float:
        return (math.pi * w2 ** 2 * self.ax * self.gamma_req) ** 0.2

    def d_g(self, w2: float) -> float:
        return (math.pi ** 2 * w2 ** 4 * self.ax * self.gamma_req
                / self.array_side ** 2) ** 0.2

    def d_star2(self, w2: float) -> float:
        x5 = extremum_constant(5)
        return (x5 * math.pi * w2 ** 2 * self.snr_gap * self.ax) ** 0.2

    def d_star3(self, w2: float) -> float:
        x5 = extremum_constant(5)
        return (x5 * math.pi ** 2 * w2 ** 4 * self.snr_gap * self.ax
                / self.array_side ** 2) ** 0.2


def critical_sides(octx: OptimizationContext) -> CriticalSides:
    d_star = None
    if octx.snr_gap is not None:
        d_star = (extremum_constant(3) * octx.snr_gap * octx.ax) ** (1.0 / 3.0)
    return CriticalSides(
        d_delta=(octx.ax * octx.gamma_req) ** (1.0 / 3.0),
        d_max=octx.d_max,
        d_min=octx.d_min,
        d_star=d_star,
        ax=octx.ax,
        gamma_req=octx.gamma_req,
        array_side=octx.array_side,
        snr_gap=octx.snr_gap,
    )


@dataclass(frozen=True)
class DesignSolution:
    feasible: bool
    n_pd: int
    n_a: int
    case_id: str
    d_opt: Optional[float] = None
    l_lo: Optional[float] = None
    l_hi: Optional[float] = None
    regime: Optional[Regime] = None
    rate: float = 0.0
    snr: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    def better_than(self, other: "DesignSolution") -> bool:
        """Rate-first ordering with deterministic tie-breaking."""
        if self.feasible != other.feasible:
            return self.feasible
        if not self.feasible:
            return False
        scale = max(abs(self.rate), abs(other.rate), 1.0)
        if abs(self.rate - other.rate) > 1e-12 * scale:
            return self.rate > other.rate
        if (self.l_hi or 0.0) != (other.l_hi or 0.0):
            return (self.l_hi or 0.0) > (other.l_hi or 0.0)
        if self.n_pd != other.n_pd:
            return self.n_pd < other.n_pd
        return self.n_a < other.n_a


# ---------------------------------------------------------------------------
# Shared constraint predicates and objectives (also used by the oracle)
# ---------------------------------------------------------------------------

def snr_branch(problem: int, ax: float, array_side: float, d, w2):
    """Averaged MRC SNR expression of the given sub-problem (1, 2 or 3)."""
    d = np.asarray(d, dtype=float)
    if problem == 1:
        return d ** 3 / ax
    spot_area = math.pi * np.square(w2)
    if problem == 2:
        return d ** 5 / (spot_area * ax)
    if problem == 3:
        return array_side ** 2 * d ** 5 / (spot_area ** 2 * ax)
    raise ValueError(f"unknown sub-problem {problem}")


def avg_snr_piecewise(ax: float, array_side: float, d, w2):
    """Regime-dispatched averaged MRC SNR (same values as snr.avg_mrc_snr)."""
    d = np.asarray(d, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    cond_small = w2 * SQRT_PI <= d
    cond_mid = ~cond_small & (w2 * SQRT_PI <= array_side)
    out = np.select(
        [cond_small, cond_mid],
        [snr_branch(1, ax, array_side, d, w2), snr_branch(2, ax, array_side, d, w2)],
        default=snr_branch(3, ax, array_side, d, w2))
    return float(out) if out.ndim == 0 else out


def regime_window_ok(problem: int, array_side: float, d, w2, rtol=BOUNDARY_RTOL):
    """Whether (d, w2) lies in the sub-problem's spot regime (boundaries closed)."""
    d = np.asarray(d, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    s = w2 * SQRT_PI
    if problem == 1:
        return s <= d * (1.0 + rtol)
    if problem == 2:
        return (s >= d * (1.0 - rtol)) & (s <= array_side * (1.0 + rtol))
    if problem == 3:
        return s >= array_side * (1.0 - rtol)
    raise ValueError(f"unknown sub-problem {problem}")


def rate_at(octx: OptimizationContext, scheme: ModulationScheme, d, w2):
    """Objective rate (bit/s) at PD side d and spot radius w2."""
    d = np.asarray(d, dtype=float)
    bandwidth = 1.0 / (octx.ct * d)
    if isinstance(scheme, Ook):
        out = 2.0 * bandwidth
        return float(out) if out.ndim == 0 else out
    gamma = avg_snr_piecewise(octx.ax, octx.array_side, d, w2)
    out = octx.nu * bandwidth * np.log2(1.0 + gamma / octx.snr_gap)
    return float(out) if np.ndim(out) == 0 else out


def constraints_satisfied(octx: OptimizationContext, d, distance,
                          rtol=BOUNDARY_RTOL):
    """The full original constraint set at a candidate point."""
    w2 = octx.w2(distance)
    gamma = avg_snr_piecewise(octx.ax, octx.array_side, d, w2)
    return (gamma >= octx.gamma_req * (1.0 - rtol)
            and octx.d_min * (1.0 - rtol) <= d <= octx.d_max * (1.0 + rtol)
            and 0.0 <= distance <= octx.l_max * (1.0 + rtol) + 1e-18)


# ---------------------------------------------------------------------------
# Sub-problem candidates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Candidate:
    problem: int
    case_id: str
    d: float
    l_lo: float
    l_hi: float

    @property
    def l_point(self) -> float:
        return self.l_hi


def _problem1_lower(octx: OptimizationContext, sides: CriticalSides):
    w2_lmax = octx.w2(octx.l_max)
    bindings = {
        "d_min": octx.d_min,
        "d_delta": sides.d_delta,
        "w2": SQRT_PI * w2_lmax,
    }
    name, value = max(bindings.items(), key=lambda kv: kv[1])
    return value, name


def _candidate_problem1(octx, sides, d_opt, binding) -> Optional[_Candidate]:
    if d_opt > octx.d_max * (1.0 + BOUNDARY_RTOL):
        return None
    l_lo = defocus_for_spot(octx.spot, d_opt).distance
    l_lo = min(l_lo, octx.l_max)
    return _Candidate(1, f"p1:{binding}", d_opt, l_lo, octx.l_max)


def _candidates_ook(octx: OptimizationContext, sides: CriticalSides):
    cands = []
    # Sub-problem 1: rate decreases with d, so take the largest lower bound.
    d1, binding = _problem1_lower(octx, sides)
    c1 = _candidate_problem1(octx, sides, d1, binding)
    if c1 is not None:
        cands.append(c1)

    # Sub-problem 2: the SNR boundary d_lambda(L) falls with L; the best L
    # is L_max unless the regime boundary d = sqrt(pi) W2(L) cuts in first,
    # which happens at L = defocus(d_delta).
    l2 = min(defocus_for_spot(octx.spot, sides.d_delta).distance, octx.l_max)
    d2 = max(octx.d_min, sides.d_lambda(octx.w2(l2)))
    l2 = min(defocus_for_spot(octx.spot, d2).distance, octx.l_max)
    w2_2 = octx.w2(l2)
    if (d2 <= octx.d_max * (1.0 + BOUNDARY_RTOL)
            and regime_window_ok(2, octx.array_side, d2, w2_2)):
        cands.append(_Candidate(2, "p2:d_lambda", d2, l2, l2))

    # Sub-problem 3: only reachable while the spot exceeds the array.
    l3 = min(defocus_for_spot(octx.spot, octx.array_side).distance, octx.l_max)
    w2_3 = octx.w2(l3)
    d3 = max(octx.d_min, sides.d_g(w2_3))
    if (d3 <= octx.d_max * (1.0 + BOUNDARY_RTOL)
            and regime_window_ok(3, octx.array_side, d3, w2_3)):
        cands.append(_Candidate(3, "p3:d_g", d3, l3, l3))
    return cands


def _ofdm_objective(octx, problem, d, w2):
    gamma = snr_branch(problem, octx.ax, octx.array_side, d, w2)
    return octx.nu / (octx.ct * d) * math.log2(1.0 + gamma / octx.snr_gap)


def _candidates_ofdm(octx: OptimizationContext, sides: CriticalSides):
    cands = []
    spot = octx.spot

    # Sub-problem 1: unimodal in d with peak d_star; clamp into the
    # feasible interval [max(d_delta, d_min, sqrt(pi) W2(L_max)), d_max].
    lower, binding = _problem1_lower(octx, sides)
    if lower <= octx.d_max * (1.0 + BOUNDARY_RTOL):
        if sides.d_star < lower:
            d1, case = lower, f"p1-row1:{binding}"
        elif sides.d_star <= octx.d_max:
            d1, case = sides.d_star, "p1-row2:d_star"
        else:
            d1, case = octx.d_max, "p1-row3:d_max"
        c = _candidate_problem1(octx, sides, d1, case.split(":", 1)[1])
        if c is not None:
            cands.append(_Candidate(1, case, c.d, c.l_lo, c.l_hi))

    # Sub-problem 2: the optimum sits on the upper-L boundary; evaluate
    # every corner and extremum point of that boundary and keep the best
    # feasible one.
    w2_lmax = octx.w2(octx.l_max)
    points = [
        ("p2-c1:(d_max,L_max)", octx.d_max, octx.l_max),
        ("p2-c2:(d_lambda,L_max)", sides.d_lambda(w2_lmax), octx.l_max),
        ("p2-c3:(sqrt_pi_w2,L_max)", SQRT_PI * w2_lmax, octx.l_max),
        ("p2-c4:(d_min,L_max)", octx.d_min, octx.l_max),
        ("p2-c5:(d_min,L(d_min))", octx.d_min,
         defocus_for_spot(spot, octx.d_min).distance),
        ("p2-c6:(d_min,L(snr))", octx.d_min,
         defocus_for_spot(
             spot, math.sqrt(octx.d_min ** 5 / (octx.ax * octx.gamma_req))).distance),
        ("p2-c7:(d_delta,L(d_delta))", sides.d_delta,
         defocus_for_spot(spot, sides.d_delta).distance),
        ("p2-c8:(d_max,L(d_max))", octx.d_max,
         defocus_for_spot(spot, octx.d_max).distance),
        ("p2-c9:(D,L(D))", octx.array_side,
         defocus_for_spot(spot, octx.array_side).distance),
        ("p2-c10:(d_star,L(d_star))", sides.d_star,
         defocus_for_spot(spot, sides.d_star).distance),
        ("p2-c11:(d_star2,L_max)", sides.d_star2(w2_lmax), octx.l_max),
    ]
    best2 = None
    for case, d, distance in points:
        if distance > octx.l_max * (1.0 + BOUNDARY_RTOL):
            continue
        distance = min(distance, octx.l_max)
        w2 = octx.w2(distance)
        if not (octx.d_min * (1.0 - BOUNDARY_RTOL) <= d
                <= octx.d_max * (1.0 + BOUNDARY_RTOL)):
            continue
        if not regime_window_ok(2, octx.array_side, d, w2):
            continue
        gamma = snr_branch(2, octx.ax, octx.array_side, d, w2)
        if gamma < octx.gamma_req * (1.0 - BOUNDARY_RTOL):
            continue
        cand = _Candidate(2, case, d, distance, distance)
        if best2 is None or _ofdm_objective(octx, 2, d, w2) > _ofdm_objective(
                octx, 2, best2.d, octx.w2(best2.l_point)):
            best2 = cand
    if best2 is not None:
        cands.append(best2)

    # Sub-problem 3: L is pinned to min(L(D), L_max); unimodal in d.
    l3 = min(defocus_for_spot(spot, octx.array_side).distance, octx.l_max)
    w2_3 = octx.w2(l3)
    if regime_window_ok(3, octx.array_side, octx.d_max, w2_3):
        lower3 = max(octx.d_min, sides.d_g(w2_3))
        if lower3 <= octx.d_max * (1.0 + BOUNDARY_RTOL):
            d_peak = sides.d_star3(w2_3)
            if d_peak < lower3:
                d3, case = lower3, "p3-row1:d_g"
            elif d_peak <= octx.d_max:
                d3, case = d_peak, "p3-row2:d_star3"
            else:
                d3, case = octx.d_max, "p3-row3:d_max"
            cands.append(_Candidate(3, case, d3, l3, l3))
    return cands


# ---------------------------------------------------------------------------
# Solvers
# ---------------------------------------------------------------------------

def _finalize(octx: OptimizationContext, scheme: ModulationScheme,
              cands: Sequence[_Candidate], infeasible_reason: str) -> DesignSolution:
    best = None
    best_rate = -math.inf
    for cand in cands:
        # Post-hoc check of the original constraints at both range ends;
        # the algebra is never trusted on its own.
        if not (constraints_satisfied(octx, cand.d, cand.l_lo, VERIFY_RTOL)
                and constraints_satisfied(octx, cand.d, cand.l_hi, VERIFY_RTOL)):
            continue
        rate = rate_at(octx, scheme, cand.d, octx.w2(cand.l_point))
        scale = max(abs(rate), abs(best_rate), 1.0)
        tied = best is not None and abs(rate - best_rate) <= 1e-12 * scale
        if (not tied and rate > best_rate) or (tied and cand.l_hi > best.l_hi):
            best, best_rate = cand, max(rate, best_rate)
    if best is None:
        return DesignSolution(
            feasible=False, n_pd=octx.n_pd, n_a=octx.n_a,
            case_id="infeasible", diagnostics={"reason": infeasible_reason})
    w2 = octx.w2(best.l_point)
    gamma = avg_snr_piecewise(octx.ax, octx.array_side, best.d, w2)
    return DesignSolution(
        feasible=True, n_pd=octx.n_pd, n_a=octx.n_a,
        case_id=best.case_id, d_opt=best.d, l_lo=best.l_lo, l_hi=best.l_hi,
        regime=regime_of(best.d, octx.array_side, w2),
        rate=best_rate, snr=float(gamma),
        diagnostics={
            "snr_slack": float(gamma - octx.gamma_req),
            "d_max": octx.d_max,
            "l_max": octx.l_max,
            "ax": octx.ax,
        })


def solve_ook(octx: OptimizationContext) -> DesignSolution:
    """Rate-optimal (d, L) for OOK: the smallest feasible PD wins."""
    sides = critical_sides(octx)
    return _finalize(octx, Ook(), _candidates_ook(octx, sides),
                     "snr constraint unreachable within fill-factor budget")


def solve_ofdm(octx: OptimizationContext) -> DesignSolution:
    """Rate-optimal (d, L) for DCO-OFDM via the three sub-problem solutions."""
    if octx.snr_gap is None or octx.nu is None:
        raise ValueError("OFDM context requires snr_gap and nu")
    sides = critical_sides(octx)
    return _finalize(octx, DcoOfdm(), _candidates_ofdm(octx, sides),
                     "snr constraint unreachable within fill-factor budget")


def solve(octx: OptimizationContext, scheme: ModulationScheme) -> DesignSolution:
    if isinstance(scheme, Ook):
        return solve_ook(octx)
    return solve_ofdm(octx)


def solve_global(context_for: Callable[[int, int], OptimizationContext],
                 scheme: ModulationScheme,
                 n_pd_set: Iterable[int],
                 n_a_set: Iterable[int]):
    """Best feasible solution over the (n_pd, n_a) configuration grid.

    `context_for` materializes the per-configuration context (A_x changes
    with both counts, and the lens pitch with n_a).  Returns the winner
    plus the per-configuration solutions for diagnostics.
    """
    per_config = []
    best = None
    for n_pd in sorted(set(int(n) for n in n_pd_set)):
        for n_a in sorted(set(int(n) for n in n_a_set)):
            try:
                octx = context_for(n_pd, n_a)
            except (InfeasibleConstraintError, ModelValidityError) as exc:
                per_config.append(DesignSolution(
                    feasible=False, n_pd=n_pd, n_a=n_a, case_id="infeasible",
                    diagnostics={"reason": str(exc)}))
                continue
            sol = solve(octx, scheme)
            per_config.append(sol)
            if best is None or sol.better_than(best):
                best = sol
    if best is None:
        best = DesignSolution(feasible=False, n_pd=0, n_a=0, case_id="infeasible",
                              diagnostics={"reason": "empty configuration set"})
    return best, per_config


@dataclass(frozen=True)
class FeasibleRegionGrid:
    """Per-sub-problem feasibility over a (d, L) grid (row-major d x L)."""

    d_values: np.ndarray
    l_values: np.ndarray
    satisfies_all: np.ndarray  # (3, len(d), len(L)) bool
    snr: np.ndarray            # (3, len(d), len(L))
    rate: np.ndarray           # (len(d), len(L))


def feasible_region(octx: OptimizationContext, scheme: ModulationScheme,
                    d_grid, l_grid) -> FeasibleRegionGrid:
    """Evaluate the solver's own predicates on every grid cell."""
    d = np.asarray(d_grid, dtype=float)
    l = np.asarray(l_grid, dtype=float)
    if d.ndim != 1 or l.ndim != 1 or np.any(np.diff(d) <= 0) or np.any(np.diff(l) <= 0):
        raise ValueError("grids must be strictly increasing 1-D arrays")
    w2 = np.array([octx.w2(x) for x in l])
    dd = d[:, None]
    ww = w2[None, :]
    sat = np.zeros((3, d.size, l.size), dtype=bool)
    snr = np.zeros((3, d.size, l.size))
    in_bounds = ((dd >= octx.d_min * (1 - BOUNDARY_RTOL))
                 & (dd <= octx.d_max * (1 + BOUNDARY_RTOL))
                 & (l[None, :] <= octx.l_max * (1 + BOUNDARY_RTOL)))
    for problem in (1, 2, 3):
        gamma = snr_branch(problem, octx.ax, octx.array_side, dd, ww)
        gamma = np.broadcast_to(gamma, (d.size, l.size))
        snr[problem - 1] = gamma
        sat[problem - 1] = (in_bounds
                            & regime_window_ok(problem, octx.array_side, dd, ww)
                            & (gamma >= octx.gamma_req * (1 - BOUNDARY_RTOL)))
    rate = rate_at(octx, scheme, dd, ww)
    return FeasibleRegionGrid(d_values=d, l_values=l, satisfies_all=sat,
                              snr=snr, rate=np.broadcast_to(rate, (d.size, l.size)))
