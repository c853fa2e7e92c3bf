"""Sectioned key-value configuration: parsing, validation, SI resolution.

The file format is INI-style with fixed sections and unit-suffixed keys;
unknown sections or keys are rejected so typos cannot silently fall back
to defaults.  All downstream computation is SI; conversion happens once
here.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .array_geometry import InnerArray, OuterArray, is_perfect_square, max_pd_side
from .errors import ConfigError
from .modulation import DcoOfdm, ModulationScheme, Ook, snr_required
from .optics import (BeamSpotModel, CubicFovModel, LensSpec, TangentFovModel,
                     beam_spot_coefficients, lens_received_power,
                     optical_efficiency)
from .optimizer import DesignConstraints, OptimizationContext
from .pd_model import PinPhotodetector, TiaConfig, ct_coefficient
from .snr import SnrContext, ax_constant
from . import optics


@dataclass(frozen=True)
class TransmitterSection:
    power_mw: float
    wavelength_nm: float
    beam_radius_rx_cm: float


@dataclass(frozen=True)
class LensSection:
    f_e_mm: float
    f_b_mm: float
    ca_mm: float
    outer_diameter_mm: float
    xi_r: float
    eta: float = 0.5
    b0_um: Optional[float] = None
    b1: Optional[float] = None


@dataclass(frozen=True)
class PdSection:
    r_s_ohm: float
    r_l_ohm: float
    eps_r: float
    v_s: float
    responsivity: float


@dataclass(frozen=True)
class TiaSection:
    r_f_ohm: float
    f_n_db: float
    temperature_k: float


@dataclass(frozen=True)
class ArraySection:
    d_um: float
    ff_target: float
    d_min_um: float
    n_pd: Optional[int] = None
    n_pd_set: Optional[tuple] = None


@dataclass(frozen=True)
class ReceiverSection:
    da_cm: float
    n_a: Optional[int] = None
    n_a_set: Optional[tuple] = None


@dataclass(frozen=True)
class ConstraintsSection:
    fov_req_deg: float
    ber_req: float
    gamma_req_override: Optional[float] = None


@dataclass(frozen=True)
class ModulationSection:
    scheme: str
    n_sc: Optional[int] = None


@dataclass(frozen=True)
class ModelsSection:
    fov_model: str = "tangent"
    cubic_coeffs: Optional[tuple] = None
    p_r_lns_override_w: Optional[float] = None


@dataclass(frozen=True)
class DesignConfig:
    transmitter: TransmitterSection
    lens: LensSection
    pd: PdSection
    tia: TiaSection
    array: ArraySection
    receiver: ReceiverSection
    constraints: ConstraintsSection
    modulation: ModulationSection
    models: ModelsSection = field(default_factory=ModelsSection)


def _parse_float(text, section, key):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}", section, key) from None


def _parse_int(text, section, key):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}", section, key) from None


def _parse_int_set(text, section, key):
    parts = text.replace(",", " ").split()
    if not parts:
        raise ConfigError("empty set", section, key)
    return tuple(_parse_int(p, section, key) for p in parts)


def _parse_float_tuple(text, section, key, count):
    parts = text.replace(",", " ").split()
    if len(parts) != count:
        raise ConfigError(f"expected {count} numbers, got {len(parts)}", section, key)
    return tuple(_parse_float(p, section, key) for p in parts)


def _parse_str(text, _section, _key):
    return text.strip()


# Section -> key -> (parser, required)
_SCHEMA = {
    "transmitter": {"power_mw": (_parse_float, True),
                    "wavelength_nm": (_parse_float, True),
                    "beam_radius_rx_cm": (_parse_float, True)},
    "lens": {"f_e_mm": (_parse_float, True), "f_b_mm": (_parse_float, True),
             "ca_mm": (_parse_float, True), "outer_diameter_mm": (_parse_float, True),
             "xi_r": (_parse_float, True), "eta": (_parse_float, False),
             "b0_um": (_parse_float, False), "b1": (_parse_float, False)},
    "pd": {"r_s_ohm": (_parse_float, True), "r_l_ohm": (_parse_float, True),
           "eps_r": (_parse_float, True), "v_s": (_parse_float, True),
           "responsivity": (_parse_float, True)},
    "tia": {"r_f_ohm": (_parse_float, True), "f_n_db": (_parse_float, True),
            "temperature_k": (_parse_float, True)},
    "array": {"d_um": (_parse_float, True), "ff_target": (_parse_float, True),
              "d_min_um": (_parse_float, True), "n_pd": (_parse_int, False),
              "n_pd_set": (_parse_int_set, False)},
    "receiver": {"da_cm": (_parse_float, True), "n_a": (_parse_int, False),
                 "n_a_set": (_parse_int_set, False)},
    "constraints": {"fov_req_deg": (_parse_float, True),
                    "ber_req": (_parse_float, True),
                    "gamma_req_override": (_parse_float, False)},
    "modulation": {"scheme": (_parse_str, True), "n_sc": (_parse_int, False)},
    "models": {"fov_model": (_parse_str, False),
               "cubic_coeffs": (lambda t, s, k: _parse_float_tuple(t, s, k, 4), False),
               "p_r_lns_override_w": (_parse_float, False)},
}

_SECTION_TYPES = {
    "transmitter": TransmitterSection, "lens": LensSection, "pd": PdSection,
    "tia": TiaSection, "array": ArraySection, "receiver": ReceiverSection,
    "constraints": ConstraintsSection, "modulation": ModulationSection,
    "models": ModelsSection,
}


def loads(text: str) -> DesignConfig:
    """Parse and validate a configuration from its text form."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError("unknown section", section)
    kwargs_by_section = {}
    for section, keys in _SCHEMA.items():
        if section not in parser:
            if section == "models":
                kwargs_by_section[section] = {}
                continue
            raise ConfigError("missing section", section)
        raw = parser[section]
        for key in raw:
            if key not in keys:
                raise ConfigError("unknown key", section, key)
        kwargs = {}
        for key, (parse, required) in keys.items():
            if key in raw:
                kwargs[key] = parse(raw[key], section, key)
            elif required:
                raise ConfigError("missing required key", section, key)
        kwargs_by_section[section] = kwargs
    cfg = DesignConfig(**{name: _SECTION_TYPES[name](**kwargs)
                          for name, kwargs in kwargs_by_section.items()})
    _validate(cfg)
    return cfg


def load_config(path) -> DesignConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return " ".join(repr(v) if isinstance(v, float) else str(v) for v in value)
    return str(value)


def dumps(cfg: DesignConfig) -> str:
    """Serialize back to the file format (lossless round trip)."""
    out = configparser.ConfigParser(interpolation=None)
    for section, keys in _SCHEMA.items():
        block = getattr(cfg, section)
        values = {}
        for key in keys:
            value = getattr(block, key)
            if value is not None:
                values[key] = _fmt(value)
        out[section] = values
    buf = io.StringIO()
    out.write(buf)
    return buf.getvalue()


def _validate(cfg: DesignConfig):
    def check(cond, message, section, key=None):
        if not cond:
            raise ConfigError(message, section, key)

    t = cfg.transmitter
    check(t.power_mw >= 0, "transmit power must be non-negative", "transmitter", "power_mw")
    check(t.wavelength_nm > 0, "wavelength must be positive", "transmitter", "wavelength_nm")
    check(t.beam_radius_rx_cm > 0, "beam radius must be positive", "transmitter",
          "beam_radius_rx_cm")
    ln = cfg.lens
    check(0 < ln.f_b_mm <= ln.f_e_mm, "require 0 < f_b <= f_e", "lens", "f_b_mm")
    check(0 < ln.ca_mm <= ln.outer_diameter_mm, "require 0 < CA <= outer diameter",
          "lens", "ca_mm")
    check(0 < ln.xi_r <= 1, "transmission coefficient in (0, 1]", "lens", "xi_r")
    check(0 < ln.eta < 1, "enclosed-power fraction in (0, 1)", "lens", "eta")
    check((ln.b0_um is None) == (ln.b1 is None),
          "b0_um and b1 must be supplied together", "lens", "b0_um")
    p = cfg.pd
    check(p.r_s_ohm >= 0 and p.r_l_ohm >= 0, "resistances must be non-negative",
          "pd", "r_s_ohm")
    check(p.eps_r > 1, "relative permittivity must exceed 1", "pd", "eps_r")
    check(p.v_s > 0, "saturation velocity must be positive", "pd", "v_s")
    check(0 < p.responsivity <= 1.5, "responsivity in (0, 1.5]", "pd", "responsivity")
    a = cfg.tia
    check(a.r_f_ohm > 0, "feedback resistance must be positive", "tia", "r_f_ohm")
    check(a.temperature_k > 0, "temperature must be positive", "tia", "temperature_k")
    check(a.f_n_db >= 0, "noise figure must be non-negative", "tia", "f_n_db")
    ar = cfg.array
    check(ar.d_um > 0, "array side must be positive", "array", "d_um")
    check(0 < ar.ff_target <= 1, "fill-factor target in (0, 1]", "array", "ff_target")
    check(ar.d_min_um > 0, "d_min must be positive", "array", "d_min_um")
    check((ar.n_pd is None) != (ar.n_pd_set is None),
          "exactly one of n_pd / n_pd_set is required", "array", "n_pd")
    for n in pd_counts(cfg):
        check(is_perfect_square(n), f"PD count {n} is not a perfect square",
              "array", "n_pd" if ar.n_pd is not None else "n_pd_set")
    r = cfg.receiver
    check(r.da_cm > 0, "receiver side must be positive", "receiver", "da_cm")
    check((r.n_a is None) != (r.n_a_set is None),
          "exactly one of n_a / n_a_set is required", "receiver", "n_a")
    for n in array_counts(cfg):
        check(is_perfect_square(n), f"array count {n} is not a perfect square",
              "receiver", "n_a" if r.n_a is not None else "n_a_set")
    c = cfg.constraints
    check(c.fov_req_deg > 0, "required FOV must be positive", "constraints", "fov_req_deg")
    check(0 < c.ber_req < 0.5, "target BER in (0, 0.5)", "constraints", "ber_req")
    if c.gamma_req_override is not None:
        check(c.gamma_req_override >= 0, "SNR threshold override must be >= 0",
              "constraints", "gamma_req_override")
    m = cfg.modulation
    check(m.scheme in ("ook", "dco_ofdm"), "scheme must be ook or dco_ofdm",
          "modulation", "scheme")
    if m.n_sc is not None:
        check(m.n_sc >= 4 and m.n_sc % 2 == 0, "n_sc must be even and >= 4",
              "modulation", "n_sc")
    mo = cfg.models
    check(mo.fov_model in ("tangent", "cubic"), "fov_model must be tangent or cubic",
          "models", "fov_model")
    if mo.p_r_lns_override_w is not None:
        check(mo.p_r_lns_override_w > 0, "collected-power override must be positive",
              "models", "p_r_lns_override_w")


def pd_counts(cfg: DesignConfig) -> tuple:
    return (cfg.array.n_pd,) if cfg.array.n_pd is not None else cfg.array.n_pd_set


def array_counts(cfg: DesignConfig) -> tuple:
    return (cfg.receiver.n_a,) if cfg.receiver.n_a is not None else cfg.receiver.n_a_set


def scheme_of(cfg: DesignConfig) -> ModulationScheme:
    if cfg.modulation.scheme == "ook":
        return Ook()
    return DcoOfdm(n_sc=cfg.modulation.n_sc or 512)


@dataclass(frozen=True)
class ResolvedDesign:
    """All configuration values in SI plus derived shared models."""

    cfg: DesignConfig
    pd_template: PinPhotodetector
    tia: TiaConfig
    lens: LensSpec
    spot: BeamSpotModel
    fov_model: object
    array_side: float          # inner-array side D (m)
    receiver_side: float       # D_a (m)
    p_t: float                 # W
    w_rx: float                # beam radius at the receiver (m)
    eta: float
    d_min: float
    ff_target: float
    gamma_req: float
    scheme: ModulationScheme
    p_lns_reference: Optional[tuple]  # (P_override, r_lns_ref) or None

    @property
    def constraints(self) -> DesignConstraints:
        return DesignConstraints(fov_req_deg=self.cfg.constraints.fov_req_deg,
                                 ber_req=self.cfg.constraints.ber_req,
                                 d_min=self.d_min, ff_target=self.ff_target)

    def r_lns(self, n_a: int) -> float:
        return self.receiver_side / (2.0 * math.sqrt(n_a))

    def xi(self, n_a: int) -> float:
        return optical_efficiency(self.lens, self.r_lns(n_a), self.eta)

    def p_lens(self, n_a: int) -> float:
        """Collected power per lens; an override pins the plane intensity.

        The override is interpreted at the reference lens pitch, then
        scaled with lens area so that enumerating n_a keeps the incident
        intensity (not the per-lens power) fixed.
        """
        r = self.r_lns(n_a)
        if self.p_lns_reference is not None:
            p_ref, r_ref = self.p_lns_reference
            return p_ref * (r / r_ref) ** 2
        return lens_received_power(self.p_t, self.w_rx, r)

    def snr_context(self, n_pd: int, n_a: int, d: Optional[float] = None) -> SnrContext:
        d_eff = d if d is not None else max_pd_side(n_pd, self.array_side, self.ff_target)
        inner = InnerArray(n_pd=n_pd, side=self.array_side, pd_side=d_eff)
        outer = OuterArray.from_tiling(n_a, self.receiver_side)
        return SnrContext(pd=self.pd_template.with_side(d_eff), tia=self.tia,
                          inner=inner, outer=outer, xi=self.xi(n_a),
                          p_lens=self.p_lens(n_a))

    def optimization_context(self, n_pd: int, n_a: int) -> OptimizationContext:
        ctx = self.snr_context(n_pd, n_a)
        nu = None
        gap = None
        if isinstance(self.scheme, DcoOfdm):
            from .modulation import snr_gap as _gap
            nu = self.scheme.subcarrier_efficiency
            gap = _gap(self.cfg.constraints.ber_req)
        l_max = optics.L_max_from_fov(self.fov_model, self.cfg.constraints.fov_req_deg,
                                      self.spot.f_b)
        return OptimizationContext(
            n_pd=n_pd, n_a=n_a,
            ct=ct_coefficient(self.pd_template),
            ax=ax_constant(ctx),
            gamma_req=self.gamma_req,
            spot=self.spot, fov_model=self.fov_model,
            array_side=self.array_side,
            d_min=self.d_min,
            d_max=max_pd_side(n_pd, self.array_side, self.ff_target),
            l_max=l_max, snr_gap=gap, nu=nu,
            xi=self.xi(n_a), p_lens=self.p_lens(n_a))


def resolve(cfg: DesignConfig) -> ResolvedDesign:
    """Convert a validated configuration to SI models."""
    lens = LensSpec(f_e=cfg.lens.f_e_mm * 1e-3, f_b=cfg.lens.f_b_mm * 1e-3,
                    ca=cfg.lens.ca_mm * 1e-3,
                    outer_diameter=cfg.lens.outer_diameter_mm * 1e-3,
                    xi_r=cfg.lens.xi_r,
                    wavelength=cfg.transmitter.wavelength_nm * 1e-9)
    if cfg.lens.b0_um is not None:
        spot = BeamSpotModel(b0=cfg.lens.b0_um * 1e-6, b1=cfg.lens.b1,
                             f_b=lens.f_b, eta=cfg.lens.eta)
    else:
        spot = beam_spot_coefficients(lens, cfg.lens.eta)
    array_side = cfg.array.d_um * 1e-6
    if cfg.models.fov_model == "tangent":
        fov_model = TangentFovModel(aperture=array_side, f_e=lens.f_e, f_b=lens.f_b)
    else:
        coeffs = cfg.models.cubic_coeffs
        fov_model = CubicFovModel(*coeffs) if coeffs else CubicFovModel()
    pd_template = PinPhotodetector(d=cfg.array.d_min_um * 1e-6,
                                   r_s=cfg.pd.r_s_ohm, r_l=cfg.pd.r_l_ohm,
                                   eps_r=cfg.pd.eps_r, v_s=cfg.pd.v_s,
                                   responsivity=cfg.pd.responsivity)
    tia = TiaConfig(r_f=cfg.tia.r_f_ohm, f_n_db=cfg.tia.f_n_db,
                    temperature=cfg.tia.temperature_k)
    scheme = scheme_of(cfg)
    if cfg.constraints.gamma_req_override is not None:
        gamma_req = cfg.constraints.gamma_req_override
    else:
        gamma_req = snr_required(scheme, cfg.constraints.ber_req)
    receiver_side = cfg.receiver.da_cm * 1e-2
    p_lns_reference = None
    if cfg.models.p_r_lns_override_w is not None:
        n_a_ref = cfg.receiver.n_a if cfg.receiver.n_a is not None \
            else max(cfg.receiver.n_a_set)
        r_ref = receiver_side / (2.0 * math.sqrt(n_a_ref))
        p_lns_reference = (cfg.models.p_r_lns_override_w, r_ref)
    return ResolvedDesign(
        cfg=cfg, pd_template=pd_template, tia=tia, lens=lens, spot=spot,
        fov_model=fov_model, array_side=array_side, receiver_side=receiver_side,
        p_t=cfg.transmitter.power_mw * 1e-3,
        w_rx=cfg.transmitter.beam_radius_rx_cm * 1e-2,
        eta=cfg.lens.eta, d_min=cfg.array.d_min_um * 1e-6,
        ff_target=cfg.array.ff_target, gamma_req=gamma_req, scheme=scheme,
        p_lns_reference=p_lns_reference)
