"""Design toolkit for lensed photodetector-array optical wireless receivers."""

from .array_geometry import (BeamFootprint, InnerArray, OuterArray, Regime,
                             disc_square_overlap, fill_factor, max_pd_side,
                             pd_centers, per_pd_power, regime_of)
from .modulation import (DcoOfdm, Ook, extremum_constant, q_inverse, rate_ofdm,
                         rate_ook, snr_gap, snr_required)
from .optics import (BeamSpotModel, CubicFovModel, LensSpec, TangentFovModel,
                     beam_spot_coefficients, beam_spot_radius, defocus_for_spot,
                     diffraction_limit, fov_from_L, L_max_from_fov,
                     lens_received_power, optical_efficiency)
from .optimizer import (DesignConstraints, DesignSolution, OptimizationContext,
                        critical_sides, feasible_region, solve, solve_global,
                        solve_ofdm, solve_ook)
from .pd_model import (PinPhotodetector, TiaConfig, bandwidth_general,
                       bandwidth_optimal, ct_coefficient,
                       optimal_depletion_length, thermal_noise_variance)
from .snr import (SnrContext, avg_egc_snr, avg_mrc_snr, ax_constant,
                  egc_snr_exact, mrc_egc_gain_db, mrc_snr_exact)

__version__ = "0.1.0"
