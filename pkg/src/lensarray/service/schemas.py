"""Pydantic request/response models for the design service.

The configuration payload mirrors the sectioned config file one to one,
so the CLI and the HTTP surface share a single resolution path.
"""

from __future__ import annotations

from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from .. import config as cfgmod


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TransmitterPayload(_Section):
    power_mw: float
    wavelength_nm: float
    beam_radius_rx_cm: float


class LensPayload(_Section):
    f_e_mm: float
    f_b_mm: float
    ca_mm: float
    outer_diameter_mm: float
    xi_r: float
    eta: float = 0.5
    b0_um: Optional[float] = None
    b1: Optional[float] = None


class PdPayload(_Section):
    r_s_ohm: float
    r_l_ohm: float
    eps_r: float
    v_s: float
    responsivity: float


class TiaPayload(_Section):
    r_f_ohm: float
    f_n_db: float
    temperature_k: float


class ArrayPayload(_Section):
    d_um: float
    ff_target: float
    d_min_um: float
    n_pd: Optional[int] = None
    n_pd_set: Optional[Tuple[int, ...]] = None


class ReceiverPayload(_Section):
    da_cm: float
    n_a: Optional[int] = None
    n_a_set: Optional[Tuple[int, ...]] = None


class ConstraintsPayload(_Section):
    fov_req_deg: float
    ber_req: float
    gamma_req_override: Optional[float] = None


class ModulationPayload(_Section):
    scheme: Literal["ook", "dco_ofdm"]
    n_sc: Optional[int] = None


class ModelsPayload(_Section):
    fov_model: Literal["tangent", "cubic"] = "tangent"
    cubic_coeffs: Optional[Tuple[float, float, float, float]] = None
    p_r_lns_override_w: Optional[float] = None


class ConfigPayload(_Section):
    transmitter: TransmitterPayload
    lens: LensPayload
    pd: PdPayload
    tia: TiaPayload
    array: ArrayPayload
    receiver: ReceiverPayload
    constraints: ConstraintsPayload
    modulation: ModulationPayload
    models: ModelsPayload = ModelsPayload()

    def to_design_config(self) -> cfgmod.DesignConfig:
        return cfgmod.DesignConfig(
            transmitter=cfgmod.TransmitterSection(**self.transmitter.model_dump()),
            lens=cfgmod.LensSection(**self.lens.model_dump()),
            pd=cfgmod.PdSection(**self.pd.model_dump()),
            tia=cfgmod.TiaSection(**self.tia.model_dump()),
            array=cfgmod.ArraySection(**self.array.model_dump()),
            receiver=cfgmod.ReceiverSection(**self.receiver.model_dump()),
            constraints=cfgmod.ConstraintsSection(**self.constraints.model_dump()),
            modulation=cfgmod.ModulationSection(**self.modulation.model_dump()),
            models=cfgmod.ModelsSection(**self.models.model_dump()),
        )

    @classmethod
    def from_design_config(cls, cfg: cfgmod.DesignConfig) -> "ConfigPayload":
        from dataclasses import asdict
        return cls(**asdict(cfg))


class SolutionModel(BaseModel):
    feasible: bool
    n_pd: int
    n_a: int
    case_id: str
    d_opt_um: Optional[float] = None
    l_lo_um: Optional[float] = None
    l_hi_um: Optional[float] = None
    regime: Optional[str] = None
    rate_gbps: float = 0.0
    snr: float = 0.0
    fov_at_l_lo_deg: Optional[float] = None


class CalibrationModel(BaseModel):
    """Derived design constants for the winning configuration."""

    ct_s_per_m: float
    ax_m3: float
    gamma_req: float
    snr_gap: Optional[float] = None
    extremum_x3: float
    extremum_x5: float
    d_delta_um: Optional[float] = None
    d_delta_ratio_to_reference: Optional[float] = None
    xi: Optional[float] = None
    p_lens_w: Optional[float] = None


class SlackModel(BaseModel):
    snr_slack: Optional[float] = None
    d_headroom_um: Optional[float] = None
    l_headroom_um: Optional[float] = None


class DesignReport(BaseModel):
    config: ConfigPayload
    solution: SolutionModel
    slack: SlackModel
    calibration: CalibrationModel
    per_configuration: List[SolutionModel]


class DesignRequest(BaseModel):
    config: ConfigPayload


class SweepRequest(BaseModel):
    config: ConfigPayload
    fov_min_deg: float
    fov_max_deg: float
    fov_step_deg: float


class SweepRow(BaseModel):
    fov_req_deg: float
    n_pd: int
    n_a: int
    d_opt_um: Optional[float] = None
    l_lo_um: Optional[float] = None
    l_hi_um: Optional[float] = None
    rate_gbps: float
    feasible: bool


class SweepResponse(BaseModel):
    rows: List[SweepRow]


class SnrCurveRequest(BaseModel):
    config: ConfigPayload
    combiner: Literal["mrc", "egc", "both"] = "mrc"
    mc_samples: int = 0
    seed: int = 0
    l_steps: int = 60


class SnrCurveRow(BaseModel):
    l_um: float
    analytic_mrc_db: Optional[float] = None
    analytic_egc_db: Optional[float] = None
    mc_mrc_db: Optional[float] = None
    mc_egc_db: Optional[float] = None
    mc_stderr_mrc_db: Optional[float] = None
    mc_stderr_egc_db: Optional[float] = None


class SnrCurveResponse(BaseModel):
    rows: List[SnrCurveRow]


class FeasibleRequest(BaseModel):
    config: ConfigPayload
    d_steps: int = 80
    l_steps: int = 80


class FeasibleRow(BaseModel):
    d_um: float
    l_um: float
    problem_id: int
    satisfies_all: bool


class FeasibleResponse(BaseModel):
    rows: List[FeasibleRow]


class ValidationCheck(BaseModel):
    name: str
    expected: float
    actual: float
    tolerance: float
    passed: bool


class ValidationReport(BaseModel):
    checks: List[ValidationCheck]
    all_passed: bool
