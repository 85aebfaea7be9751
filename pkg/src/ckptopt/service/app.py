"""FastAPI application wiring the analysis toolkit to HTTP endpoints."""

from __future__ import annotations

import math

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import (
    BracketError,
    DomainError,
    MeasurementLogError,
    NoFailureObservations,
)
from ..estimator import estimate_params, parse_measurement_log, recommend
from ..model import (
    ModelParams,
    UtilizationCurve,
    UtilizationPoint,
    utilization_dag,
    utilization_ideal,
    utilization_single,
)
from ..optimizer import compare_models, optimal_interval, scaleup_analysis
from ..simulator import SimConfig, sweep_simulation
from . import schemas

_ANALYTIC_MODELS = {
    "ideal": lambda t, p: utilization_ideal(t, p.checkpoint_cost),
    "single": utilization_single,
    "dag": utilization_dag,
}


def _interval_grid(start: float, stop: float, step: float) -> list[float]:
    """start, start + step, ... up to stop (inclusive within a tiny slack)."""
    if stop < start:
        raise DomainError(f"sweep stop {stop!r} must be >= start {start!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def create_app() -> FastAPI:
    app = FastAPI(
        title="ckptopt",
        version=__version__,
        description="Checkpoint interval analysis for checkpointed stream processing systems",
    )

    def _error(status: int, code: str, detail: str, line: int | None = None) -> JSONResponse:
        body = schemas.ErrorBody(error_code=code, detail=detail, line=line)
        return JSONResponse(status_code=status, content=body.model_dump())

    @app.exception_handler(DomainError)
    @app.exception_handler(BracketError)
    async def _domain_error(request: Request, exc: Exception) -> JSONResponse:
        return _error(400, "invalid_parameters", str(exc))

    @app.exception_handler(MeasurementLogError)
    async def _log_error(request: Request, exc: MeasurementLogError) -> JSONResponse:
        return _error(400, "log_parse_error", str(exc), line=exc.line)

    @app.exception_handler(NoFailureObservations)
    async def _no_failures(request: Request, exc: NoFailureObservations) -> JSONResponse:
        return _error(400, "no_failure_observations", str(exc))

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/api/optimal", response_model=schemas.OptimalResponse)
    def optimal(req: schemas.OptimalRequest) -> schemas.OptimalResponse:
        t_star = optimal_interval(req.checkpoint_cost_min, req.failure_rate_per_min)
        u = None
        if req.recovery_cost_min is not None:
            params = ModelParams(
                failure_rate=req.failure_rate_per_min,
                checkpoint_cost=req.checkpoint_cost_min,
                recovery_cost=req.recovery_cost_min,
                hop_delay=req.hop_delay_min,
                depth=req.depth,
            )
            u = utilization_dag(t_star, params)
        return schemas.OptimalResponse(t_star_min=t_star, u_at_t_star=u)

    @app.post("/api/sweep", response_model=schemas.SweepResponse)
    def sweep(req: schemas.SweepRequest) -> schemas.SweepResponse:
        params = req.params.to_domain()
        if req.t_start_min <= params.checkpoint_cost:
            raise DomainError(
                f"sweep start {req.t_start_min!r} must exceed checkpoint cost "
                f"{params.checkpoint_cost!r}"
            )
        grid = _interval_grid(req.t_start_min, req.t_stop_min, req.t_step_min)
        evaluate = _ANALYTIC_MODELS[req.model]
        curve: UtilizationCurve = tuple(
            UtilizationPoint(t, evaluate(t, params)) for t in grid
        )
        points = [
            schemas.SweepPointOut(interval_min=p.interval, utilization=p.utilization)
            for p in curve
        ]
        if req.simulate is not None:
            if req.model != "dag":
                raise DomainError(
                    "simulation follows the full process; use model='dag' "
                    "(depth=1 covers the single-operator case)"
                )
            base = SimConfig(
                params=params,
                interval=grid[0],
                horizon=req.simulate.horizon_min,
                runs=req.simulate.runs,
                seed=req.simulate.seed,
            )
            for point, (_, result) in zip(points, sweep_simulation(base, grid)):
                point.sim_mean = result.mean_utilization
                point.sim_std = result.std_utilization
        return schemas.SweepResponse(model=req.model, points=points)

    @app.post("/api/compare", response_model=schemas.CompareResponse)
    def compare(req: schemas.CompareRequest) -> schemas.CompareResponse:
        rows = compare_models(req.params.to_domain(), req.baseline_interval_min)
        return schemas.CompareResponse(
            rows=[
                schemas.CompareRowOut(
                    model=row.model,
                    interval_min=row.interval,
                    utilization=row.utilization,
                    gain_vs_baseline_pct=row.gain_vs_baseline_pct,
                    feasible=row.feasible,
                )
                for row in rows
            ]
        )

    @app.post("/api/scaleup", response_model=schemas.ScaleupResponse)
    def scaleup(req: schemas.ScaleupRequest) -> schemas.ScaleupResponse:
        points = scaleup_analysis(
            node_failure_rate=req.node_failure_rate_per_min,
            node_counts=req.node_counts,
            checkpoint_cost=req.checkpoint_cost_min,
            recovery_cost=req.recovery_cost_min,
            hop_delay=req.hop_delay_min,
            depth=req.depth,
            baseline_interval=req.baseline_interval_min,
        )
        return schemas.ScaleupResponse(
            rows=[
                schemas.ScaleupRowOut(
                    nodes=p.nodes,
                    system_failure_rate_per_min=p.system_failure_rate,
                    t_star_min=p.t_star,
                    gain_pct=p.gain_pct,
                )
                for p in points
            ]
        )

    @app.post("/api/simulate", response_model=schemas.SimulateResponse)
    def simulate(req: schemas.SimulateRequest) -> schemas.SimulateResponse:
        params = req.params.to_domain()
        base = SimConfig(
            params=params,
            interval=req.intervals_min[0],
            horizon=req.horizon_min,
            runs=req.runs,
            seed=req.seed,
        )
        rows = []
        for t, result in sweep_simulation(base, req.intervals_min):
            rows.append(
                schemas.SimulateRowOut(
                    interval_min=t,
                    mean_utilization=result.mean_utilization,
                    std_utilization=result.std_utilization,
                    runs=result.runs,
                )
            )
        return schemas.SimulateResponse(rows=rows)

    @app.post("/api/advise", response_model=schemas.AdviseResponse)
    def advise(req: schemas.AdviseRequest) -> schemas.AdviseResponse:
        log = parse_measurement_log(req.log_text)
        est = estimate_params(log)
        rec = recommend(est, req.current_interval_min)
        params = est.params
        return schemas.AdviseResponse(
            failure_rate_per_min=params.failure_rate,
            rate_ci_low_per_min=est.rate_ci_low,
            rate_ci_high_per_min=est.rate_ci_high,
            checkpoint_cost_min=params.checkpoint_cost,
            stderr_checkpoint_cost_min=est.stderr_checkpoint_cost,
            recovery_cost_min=params.recovery_cost,
            stderr_recovery_min=est.stderr_recovery,
            hop_delay_min=params.hop_delay,
            stderr_delay_min=est.stderr_delay,
            depth=params.depth,
            t_star_min=rec.t_star,
            u_at_t_star=rec.u_at_t_star,
            current_interval_min=rec.current_interval,
            u_at_current=rec.u_at_current,
            gain_pct=rec.gain_pct,
            current_feasible=rec.current_feasible,
        )

    return app
