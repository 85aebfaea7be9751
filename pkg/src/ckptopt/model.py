"""Analytic utilization model for a checkpointed system.

Utilization is the fraction of wall-clock time spent on useful work, i.e.
everything except checkpoint creation, rework lost to failures and
detect-and-restart phases.  The model covers a single checkpointed process
and a DAG of operators checkpointed by a propagating token, under a Poisson
failure process.

All times are minutes, all rates per minute.  Every function here is pure
and every type immutable, so concurrent use is unrestricted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "ModelParams",
    "UtilizationPoint",
    "UtilizationCurve",
    "mean_failure_time_within",
    "expected_consecutive_failures",
    "expected_restarts",
    "utilization_ideal",
    "utilization_failures_only",
    "utilization_single",
    "utilization_dag_ideal",
    "effective_period_dag",
    "utilization_dag",
]

# Above this, exp() of the combined exponent overflows a double and the
# DAG utilization is evaluated in log space instead.
_LOG_SPACE_THRESHOLD = 700.0

# Below this value of rate*window the closed form of the conditional mean
# failure time loses precision to cancellation; a series expansion takes over.
_SMALL_EXPONENT = 1e-6


@dataclass(frozen=True)
class ModelParams:
    """Parameter vector of the utilization model.

    failure_rate     failures per minute for the system as a whole (> 0)
    checkpoint_cost  minutes spent creating one checkpoint (>= 0)
    recovery_cost    minutes to detect a failure and restart (>= 0)
    hop_delay        minutes for the checkpoint token to cross one hop (>= 0)
    depth            operator count on the critical path (>= 1); the token
                     crosses depth - 1 hops before the checkpoint commits
    """

    failure_rate: float
    checkpoint_cost: float
    recovery_cost: float = 0.0
    hop_delay: float = 0.0
    depth: int = 1

    def __post_init__(self) -> None:
        if not (self.failure_rate > 0.0 and math.isfinite(self.failure_rate)):
            raise DomainError(f"failure_rate must be finite and > 0, got {self.failure_rate!r}")
        for name in ("checkpoint_cost", "recovery_cost", "hop_delay"):
            value = getattr(self, name)
            if not (value >= 0.0 and math.isfinite(value)):
                raise DomainError(f"{name} must be finite and >= 0, got {value!r}")
        if self.depth < 1:
            raise DomainError(f"depth must be >= 1, got {self.depth!r}")

    @property
    def commit_lag(self) -> float:
        """Wall-clock delay between token emission and system-wide commit."""
        return (self.depth - 1) * self.hop_delay


@dataclass(frozen=True)
class UtilizationPoint:
    """One (interval, utilization) sample of a model sweep."""

    interval: float
    utilization: float


UtilizationCurve = tuple[UtilizationPoint, ...]


def _check_interval(interval: float, checkpoint_cost: float) -> None:
    if not math.isfinite(interval):
        raise DomainError(f"interval must be finite, got {interval!r}")
    if interval < checkpoint_cost:
        raise DomainError(
            f"interval {interval!r} must be >= checkpoint cost {checkpoint_cost!r}"
        )
    if interval <= 0.0:
        raise DomainError(f"interval must be > 0, got {interval!r}")


def mean_failure_time_within(window: float, failure_rate: float) -> float:
    """Mean failure time conditioned on a failure inside a window.

    For exponential inter-arrivals this is
    ``(exp(r*w) - r*w - 1) / (r * (exp(r*w) - 1))``; it tends to ``w/2`` as
    the rate vanishes and stays strictly below the unconditional mean
    ``1/r``, including in floating point (saturating arguments are capped
    one ulp below the mean).
    """
    if window <= 0.0:
        raise DomainError(f"window must be > 0, got {window!r}")
    if failure_rate <= 0.0:
        raise DomainError(f"failure_rate must be > 0, got {failure_rate!r}")
    x = failure_rate * window
    if x < _SMALL_EXPONENT:
        # expm1(x) - x cancels catastrophically here; series to O(x^2).
        return window / 2.0 - failure_rate * window * window / 12.0
    if x > 36.0:
        # The closed form saturates: 1 - x/expm1(x) rounds to 1.  Evaluate
        # the deviation directly and keep the bound strict.
        value = (1.0 - x * math.exp(-x)) / failure_rate
        cap = 1.0 / failure_rate
        return value if value < cap else math.nextafter(cap, 0.0)
    em1 = math.expm1(x)
    return (em1 - x) / (failure_rate * em1)


def expected_consecutive_failures(task_time: float, failure_rate: float) -> float:
    """Expected number of failed attempts before a span of task_time completes.

    The attempt count is geometric with success probability ``exp(-r*t)``,
    so the expectation is ``exp(r*t) - 1``.
    """
    if task_time < 0.0:
        raise DomainError(f"task_time must be >= 0, got {task_time!r}")
    if failure_rate <= 0.0:
        raise DomainError(f"failure_rate must be > 0, got {failure_rate!r}")
    x = failure_rate * task_time
    # math.expm1 raises past the double range; the true value is over it.
    return math.expm1(x) if x <= _LOG_SPACE_THRESHOLD else math.inf


def expected_restarts(recovery_cost: float, failure_rate: float) -> float:
    """Expected number of restart attempts until one survives, ``exp(r*R) >= 1``."""
    if recovery_cost < 0.0:
        raise DomainError(f"recovery_cost must be >= 0, got {recovery_cost!r}")
    if failure_rate <= 0.0:
        raise DomainError(f"failure_rate must be > 0, got {failure_rate!r}")
    x = failure_rate * recovery_cost
    return math.exp(x) if x <= _LOG_SPACE_THRESHOLD else math.inf


def utilization_ideal(interval: float, checkpoint_cost: float) -> float:
    """Utilization with no failures: ``(T - c) / T``."""
    if checkpoint_cost < 0.0:
        raise DomainError(f"checkpoint_cost must be >= 0, got {checkpoint_cost!r}")
    _check_interval(interval, checkpoint_cost)
    return (interval - checkpoint_cost) / interval


def _utilization_core(
    interval: float, checkpoint_cost: float, failure_rate: float, overhead_time: float
) -> float:
    """Shared kernel ``r * (T - c) * exp(-r*o) / expm1(r*T)`` where o is the
    failure-exposed overhead beyond the interval (recovery plus any commit
    lag).  Switches to log space when the exponents leave the double range,
    underflowing cleanly to 0.0.
    """
    work = interval - checkpoint_cost
    if work == 0.0:
        return 0.0
    x = failure_rate * interval
    if x + failure_rate * overhead_time > _LOG_SPACE_THRESHOLD:
        if x > 36.0:
            log_growth = x + math.log1p(-math.exp(-x))
        else:
            log_growth = math.log(math.expm1(x))
        exponent = (
            math.log(failure_rate)
            + math.log(work)
            - failure_rate * overhead_time
            - log_growth
        )
        # math.exp underflows to 0.0 silently, which is the correct limit.
        return math.exp(exponent)
    return (
        failure_rate
        * work
        * math.exp(-failure_rate * overhead_time)
        / math.expm1(x)
    )


def utilization_failures_only(
    interval: float, checkpoint_cost: float, failure_rate: float
) -> float:
    """Utilization with failures but instantaneous recovery.

    ``r * (T - c) / (exp(r*T) - 1)``; reduces to the ideal formula as the
    failure rate tends to zero.
    """
    if failure_rate <= 0.0:
        raise DomainError(f"failure_rate must be > 0, got {failure_rate!r}")
    if checkpoint_cost < 0.0:
        raise DomainError(f"checkpoint_cost must be >= 0, got {checkpoint_cost!r}")
    _check_interval(interval, checkpoint_cost)
    return _utilization_core(interval, checkpoint_cost, failure_rate, 0.0)


def utilization_single(interval: float, params: ModelParams) -> float:
    """Utilization of a single checkpointed process with restart cost.

    ``r * (T - c) / (exp(r*(R + T)) - exp(r*R))``, evaluated in the stable
    form ``r * (T - c) * exp(-r*R) / expm1(r*T)``.  Ignores hop_delay and
    depth.
    """
    _check_interval(interval, params.checkpoint_cost)
    return _utilization_core(
        interval, params.checkpoint_cost, params.failure_rate, params.recovery_cost
    )


def utilization_dag_ideal(interval: float, params: ModelParams) -> float:
    """Failure-free utilization of a token-checkpointed DAG before the
    cross-interval overlap is accounted for: ``(T - c) / (T + (n-1)*d)``.

    This is the transient (pipeline-fill) view; in steady state consecutive
    intervals overlap with the token propagation and the ideal limit is
    ``(T - c) / T`` again, which is what :func:`utilization_dag` tends to as
    the failure rate vanishes.
    """
    _check_interval(interval, params.checkpoint_cost)
    return (interval - params.checkpoint_cost) / (interval + params.commit_lag)


def _attempt_overhead(span: float, params: ModelParams) -> float:
    """Expected time lost to failures while completing an uninterrupted span.

    Each of the ``exp(r*s) - 1`` expected failed attempts loses the
    conditional mean failure time of the span plus a full recovery, where the
    recovery itself suffers ``exp(r*R) - 1`` expected aborted restarts.
    """
    r = params.failure_rate
    R = params.recovery_cost
    if span == 0.0:
        return 0.0
    restart_loss = 0.0
    if R > 0.0:
        restart_loss = expected_consecutive_failures(R, r) * mean_failure_time_within(R, r)
    return expected_consecutive_failures(span, r) * (
        mean_failure_time_within(span, r) + R + restart_loss
    )


def effective_period_dag(interval: float, params: ModelParams) -> float:
    """Expected wall-clock time consumed per committed interval in a DAG.

    Built constructively: the span to complete is the interval plus the
    token propagation lag, expected failure losses are added for that span,
    and then the propagation lag's own share (already paid for by the
    previous interval, with which it overlaps) is subtracted out:

        span = T + (n-1)*d
        T_eff = span + loss(span) - ((n-1)*d + loss((n-1)*d))

    ``(T - c) / T_eff`` agrees with the closed form of
    :func:`utilization_dag` to within 1e-10 relative.
    """
    _check_interval(interval, params.checkpoint_cost)
    lag = params.commit_lag
    span = interval + lag
    return span + _attempt_overhead(span, params) - (lag + _attempt_overhead(lag, params))


def utilization_dag(interval: float, params: ModelParams) -> float:
    """Utilization of a token-checkpointed DAG, overlap included.

    Closed form ``r * exp(d*r) * (T - c) / (exp(r*(R+T+d*n)) - exp(r*(R+d*n)))``,
    evaluated as ``r * (T - c) * exp(-r*(R + (n-1)*d)) / expm1(r*T)``.  When
    the combined exponent exceeds the double-precision range the value is
    computed in log space, underflowing cleanly to 0.0.
    """
    _check_interval(interval, params.checkpoint_cost)
    return _utilization_core(
        interval,
        params.checkpoint_cost,
        params.failure_rate,
        params.recovery_cost + params.commit_lag,
    )
