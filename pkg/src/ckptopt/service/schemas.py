"""Request and response models of the HTTP API.

The API speaks canonical units only: minutes for durations, per-minute for
rates.  Unit conversion is a client concern (the bundled CLI accepts
suffixed quantities and converts before calling).
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

from ..model import ModelParams


class ParamsIn(BaseModel):
    """Utilization model parameters."""

    failure_rate_per_min: float = Field(gt=0, description="system failure rate, per minute")
    checkpoint_cost_min: float = Field(ge=0, description="checkpoint creation cost, minutes")
    recovery_cost_min: float = Field(0.0, ge=0, description="detect-and-restart cost, minutes")
    hop_delay_min: float = Field(0.0, ge=0, description="per-hop token delay, minutes")
    depth: int = Field(1, ge=1, description="operators on the critical path")

    def to_domain(self) -> ModelParams:
        return ModelParams(
            failure_rate=self.failure_rate_per_min,
            checkpoint_cost=self.checkpoint_cost_min,
            recovery_cost=self.recovery_cost_min,
            hop_delay=self.hop_delay_min,
            depth=self.depth,
        )


class OptimalRequest(BaseModel):
    failure_rate_per_min: float = Field(gt=0)
    checkpoint_cost_min: float = Field(gt=0)
    recovery_cost_min: float | None = Field(None, ge=0)
    hop_delay_min: float = Field(0.0, ge=0)
    depth: int = Field(1, ge=1)


class OptimalResponse(BaseModel):
    t_star_min: float
    u_at_t_star: float | None = None


class SimulateOptions(BaseModel):
    runs: int = Field(250, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    horizon_min: float | None = Field(None, gt=0)


class SweepRequest(BaseModel):
    params: ParamsIn
    t_start_min: float = Field(gt=0)
    t_stop_min: float = Field(gt=0)
    t_step_min: float = Field(gt=0)
    model: Literal["ideal", "single", "dag"] = "dag"
    simulate: SimulateOptions | None = None


class SweepPointOut(BaseModel):
    interval_min: float
    utilization: float
    sim_mean: float | None = None
    sim_std: float | None = None


class SweepResponse(BaseModel):
    model: Literal["ideal", "single", "dag"]
    points: list[SweepPointOut]


class CompareRequest(BaseModel):
    params: ParamsIn
    baseline_interval_min: float = Field(gt=0)


class CompareRowOut(BaseModel):
    model: Literal["proposed", "daly", "zhuang", "young", "fixed"]
    interval_min: float
    utilization: float | None
    gain_vs_baseline_pct: float | None
    feasible: bool


class CompareResponse(BaseModel):
    rows: list[CompareRowOut]


class ScaleupRequest(BaseModel):
    node_failure_rate_per_min: float = Field(gt=0)
    node_counts: list[int] = Field(min_length=1)
    checkpoint_cost_min: float = Field(gt=0)
    recovery_cost_min: float = Field(0.0, ge=0)
    hop_delay_min: float = Field(0.0, ge=0)
    depth: int = Field(1, ge=1)
    baseline_interval_min: float = Field(gt=0)


class ScaleupRowOut(BaseModel):
    nodes: int
    system_failure_rate_per_min: float
    t_star_min: float
    gain_pct: float


class ScaleupResponse(BaseModel):
    rows: list[ScaleupRowOut]


class SimulateRequest(BaseModel):
    params: ParamsIn
    intervals_min: list[float] = Field(min_length=1)
    runs: int = Field(250, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    horizon_min: float | None = Field(None, gt=0)


class SimulateRowOut(BaseModel):
    interval_min: float
    mean_utilization: float
    std_utilization: float
    runs: int


class SimulateResponse(BaseModel):
    rows: list[SimulateRowOut]


class AdviseRequest(BaseModel):
    log_text: str = Field(description="measurement log document, see the log format docs")
    current_interval_min: float = Field(gt=0)


class AdviseResponse(BaseModel):
    failure_rate_per_min: float
    rate_ci_low_per_min: float
    rate_ci_high_per_min: float
    checkpoint_cost_min: float
    stderr_checkpoint_cost_min: float
    recovery_cost_min: float
    stderr_recovery_min: float
    hop_delay_min: float
    stderr_delay_min: float
    depth: int
    t_star_min: float
    u_at_t_star: float
    current_interval_min: float
    u_at_current: float | None
    gain_pct: float | None
    current_feasible: bool


class ErrorBody(BaseModel):
    error_code: str
    detail: str
    line: int | None = None
