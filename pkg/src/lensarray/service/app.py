"""FastAPI surface for the receiver-design toolkit.

Run with: uvicorn lensarray.service.app:app
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..errors import ConfigError, DesignError
from . import handlers, schemas

app = FastAPI(title="lensarray design service",
              description="Optimal lensed PD-array receiver design for "
                          "optical wireless links")


@app.get("/health")
def health():
    return {"status": "ok"}


def _design_config(payload: schemas.ConfigPayload):
    try:
        cfg = payload.to_design_config()
        import lensarray.config as cfgmod
        cfgmod._validate(cfg)
        return cfg
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None


@app.post("/design", response_model=schemas.DesignReport)
def design(request: schemas.DesignRequest):
    cfg = _design_config(request.config)
    try:
        return handlers.run_design(cfg)
    except DesignError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None


@app.post("/sweep", response_model=schemas.SweepResponse)
def sweep(request: schemas.SweepRequest):
    cfg = _design_config(request.config)
    try:
        return handlers.run_sweep(cfg, request.fov_min_deg, request.fov_max_deg,
                                  request.fov_step_deg)
    except (DesignError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None


@app.post("/snr-curve", response_model=schemas.SnrCurveResponse)
def snr_curve(request: schemas.SnrCurveRequest):
    cfg = _design_config(request.config)
    try:
        return handlers.run_snr_curve(cfg, request.combiner, request.mc_samples,
                                      request.seed, request.l_steps)
    except (DesignError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None


@app.post("/feasible", response_model=schemas.FeasibleResponse)
def feasible(request: schemas.FeasibleRequest):
    cfg = _design_config(request.config)
    try:
        return handlers.run_feasible(cfg, request.d_steps, request.l_steps)
    except (DesignError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None


@app.get("/validate", response_model=schemas.ValidationReport)
def validate():
    return handlers.run_validate()
