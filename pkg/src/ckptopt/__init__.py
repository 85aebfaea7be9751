"""Checkpoint interval analysis for checkpointed stream processing systems.

Core pieces:

- :mod:`ckptopt.model` evaluates the analytic utilization of a checkpointed
  process or operator DAG under a Poisson failure process.
- :mod:`ckptopt.optimizer` computes the closed-form optimal checkpoint
  interval and compares it with first-order baselines.
- :mod:`ckptopt.simulator` validates the model by seeded Monte Carlo
  simulation of the checkpoint / failure / restart timeline.
- :mod:`ckptopt.estimator` turns measured logs into model parameters and
  interval recommendations.
- :mod:`ckptopt.service` exposes everything over HTTP;
  :mod:`ckptopt.cli` is a thin client over the same API.
"""

__version__ = "0.1.0"

from .errors import (
    BracketError,
    CkptoptError,
    ConvergenceError,
    DomainError,
    MeasurementLogError,
    NoFailureObservations,
)
from .estimator import (
    EstimatedParams,
    LambdaEstimate,
    MeasurementLog,
    Recommendation,
    aggregate_failure_rate,
    estimate_lambda,
    estimate_params,
    parse_measurement_log,
    recommend,
)
from .model import (
    ModelParams,
    UtilizationCurve,
    UtilizationPoint,
    effective_period_dag,
    expected_consecutive_failures,
    expected_restarts,
    mean_failure_time_within,
    utilization_dag,
    utilization_dag_ideal,
    utilization_failures_only,
    utilization_ideal,
    utilization_single,
)
from .numerics import Tolerance, lambert_w0, maximize_unimodal
from .optimizer import (
    ComparisonRow,
    ScaleupPoint,
    compare_models,
    daly_interval,
    optimal_interval,
    optimal_interval_numeric,
    scaleup_analysis,
    young_interval,
    zhuang_interval,
)
from .simulator import (
    FailureProcess,
    SimConfig,
    SimResult,
    simulate_batch,
    simulate_run,
    sweep_simulation,
)

__all__ = [
    "__version__",
    "BracketError",
    "CkptoptError",
    "ConvergenceError",
    "DomainError",
    "MeasurementLogError",
    "NoFailureObservations",
    "EstimatedParams",
    "LambdaEstimate",
    "MeasurementLog",
    "Recommendation",
    "aggregate_failure_rate",
    "estimate_lambda",
    "estimate_params",
    "parse_measurement_log",
    "recommend",
    "ModelParams",
    "UtilizationCurve",
    "UtilizationPoint",
    "effective_period_dag",
    "expected_consecutive_failures",
    "expected_restarts",
    "mean_failure_time_within",
    "utilization_dag",
    "utilization_dag_ideal",
    "utilization_failures_only",
    "utilization_ideal",
    "utilization_single",
    "Tolerance",
    "lambert_w0",
    "maximize_unimodal",
    "ComparisonRow",
    "ScaleupPoint",
    "compare_models",
    "daly_interval",
    "optimal_interval",
    "optimal_interval_numeric",
    "scaleup_analysis",
    "young_interval",
    "zhuang_interval",
    "FailureProcess",
    "SimConfig",
    "SimResult",
    "simulate_batch",
    "simulate_run",
    "sweep_simulation",
]
