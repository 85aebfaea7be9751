"""Parameter estimation from operational measurements and interval advice.

Measurement log format
----------------------
A measurement log is a plain text document of ``key: values`` sections.
``#`` starts a comment, blank lines are ignored, and the first meaningful
line must declare the unit every value in the file is expressed in::

    unit: seconds            # seconds | minutes | hours
    span: 72000              # length of the observation window (required)
    n: 5                     # operators on the critical path (default 1)
    failures: 1200.5 9800.2  # failure timestamps within [0, span]
        31022.7 55900.1      # list sections may continue on further lines
    checkpoint_costs: 1.5 1.7
    recoveries: 23.0 23.2
    delays: 0.027 0.028

Rates derived from the file (and the optional ``lambda:`` override) are per
declared unit.  Scalar overrides ``checkpoint_cost:``, ``recovery:``,
``delay:`` and ``lambda:`` substitute for an empty sample list; a sample
list section and its override are mutually exclusive.  Unknown section names
are rejected with the offending line number.

Estimates are sample means with standard errors; the failure rate is the
maximum-likelihood count-over-span estimate with the exact (chi-square)
Poisson confidence interval.  Everything is converted to minutes on
ingestion, so two logs describing the same data in different units estimate
identical parameters.
"""

from __future__ import annotations

import math
import re
import statistics
from dataclasses import dataclass
from typing import Sequence

from scipy.stats import chi2

from .errors import DomainError, MeasurementLogError, NoFailureObservations
from .model import ModelParams, utilization_dag
from .optimizer import optimal_interval
from .units import UNIT_WORDS, minutes_from

__all__ = [
    "MeasurementLog",
    "LambdaEstimate",
    "EstimatedParams",
    "Recommendation",
    "parse_measurement_log",
    "estimate_lambda",
    "estimate_params",
    "recommend",
    "aggregate_failure_rate",
]


@dataclass(frozen=True)
class MeasurementLog:
    """Raw measured samples, already converted to minutes.

    Sample tuples may be empty only when the corresponding scalar override
    is set.  failure_rate_override is per minute.
    """

    failure_timestamps: tuple[float, ...]
    observation_span: float
    checkpoint_cost_samples: tuple[float, ...] = ()
    recovery_samples: tuple[float, ...] = ()
    delay_samples: tuple[float, ...] = ()
    critical_path_len: int = 1
    checkpoint_cost_override: float | None = None
    recovery_override: float | None = None
    delay_override: float | None = None
    failure_rate_override: float | None = None

    def __post_init__(self) -> None:
        if self.observation_span <= 0.0:
            raise DomainError(f"observation span must be > 0, got {self.observation_span!r}")
        if self.critical_path_len < 1:
            raise DomainError(f"critical path length must be >= 1, got {self.critical_path_len!r}")
        previous = 0.0
        for t in self.failure_timestamps:
            if t < previous:
                raise DomainError("failure timestamps must be sorted and >= 0")
            if t > self.observation_span:
                raise DomainError(
                    f"failure timestamp {t!r} outside observation span {self.observation_span!r}"
                )
            previous = t
        for name, samples in (
            ("checkpoint cost", self.checkpoint_cost_samples),
            ("recovery", self.recovery_samples),
            ("delay", self.delay_samples),
        ):
            if any(s < 0.0 for s in samples):
                raise DomainError(f"{name} samples must be >= 0")
        for name, value in (
            ("checkpoint_cost_override", self.checkpoint_cost_override),
            ("recovery_override", self.recovery_override),
            ("delay_override", self.delay_override),
        ):
            if value is not None and value < 0.0:
                raise DomainError(f"{name} must be >= 0, got {value!r}")
        if self.failure_rate_override is not None and self.failure_rate_override <= 0.0:
            raise DomainError(
                f"failure_rate_override must be > 0, got {self.failure_rate_override!r}"
            )


@dataclass(frozen=True)
class LambdaEstimate:
    """Failure rate estimate with its exact Poisson confidence interval.

    rate is None when no failures were observed; the interval then carries
    only the upper bound (lower bound zero).
    """

    rate: float | None
    ci_low: float
    ci_high: float
    failures: int
    span: float
    confidence: float

    @property
    def has_point_estimate(self) -> bool:
        return self.rate is not None


@dataclass(frozen=True)
class EstimatedParams:
    """Model parameters estimated from a measurement log, with uncertainty."""

    params: ModelParams
    stderr_checkpoint_cost: float
    stderr_recovery: float
    stderr_delay: float
    rate_ci_low: float
    rate_ci_high: float


@dataclass(frozen=True)
class Recommendation:
    """Optimal interval with predicted utilization against the current one.

    u_at_current and gain_pct are None when the current interval is
    infeasible (does not exceed the checkpoint cost).
    """

    t_star: float
    u_at_t_star: float
    current_interval: float
    u_at_current: float | None
    gain_pct: float | None
    current_feasible: bool = True


def estimate_lambda(
    failure_timestamps: Sequence[float],
    observation_span: float,
    confidence: float = 0.95,
) -> LambdaEstimate:
    """Maximum-likelihood failure rate from a count over a fixed window.

    The point estimate is count / span; the interval is the exact Poisson
    one from chi-square quantiles, ``[chi2(a/2, 2k), chi2(1-a/2, 2k+2)] / (2*span)``
    with a the complement of the confidence level.  With zero observed
    failures there is no point estimate and only the upper bound is returned.
    """
    if observation_span <= 0.0:
        raise DomainError(f"observation span must be > 0, got {observation_span!r}")
    if not (0.0 < confidence < 1.0):
        raise DomainError(f"confidence must be in (0, 1), got {confidence!r}")
    count = len(failure_timestamps)
    alpha = 1.0 - confidence
    ci_high = float(chi2.ppf(1.0 - alpha / 2.0, 2 * count + 2)) / (2.0 * observation_span)
    if count == 0:
        return LambdaEstimate(None, 0.0, ci_high, 0, observation_span, confidence)
    ci_low = float(chi2.ppf(alpha / 2.0, 2 * count)) / (2.0 * observation_span)
    return LambdaEstimate(
        count / observation_span, ci_low, ci_high, count, observation_span, confidence
    )


def _mean_and_stderr(
    name: str, samples: tuple[float, ...], override: float | None
) -> tuple[float, float]:
    if override is not None:
        if samples:
            raise DomainError(f"{name}: provide samples or an override, not both")
        return override, 0.0
    if not samples:
        raise DomainError(f"{name}: no samples and no override supplied")
    if len(samples) == 1:
        return samples[0], 0.0
    return statistics.fmean(samples), statistics.stdev(samples) / math.sqrt(len(samples))


def estimate_params(log: MeasurementLog, confidence: float = 0.95) -> EstimatedParams:
    """Point estimates (sample means) and uncertainty for the model parameters.

    Raises :class:`NoFailureObservations` when the log contains no failures
    and no failure-rate override, since the model requires a positive rate.
    """
    cost, cost_err = _mean_and_stderr(
        "checkpoint cost", log.checkpoint_cost_samples, log.checkpoint_cost_override
    )
    recovery, recovery_err = _mean_and_stderr(
        "recovery", log.recovery_samples, log.recovery_override
    )
    delay, delay_err = _mean_and_stderr("delay", log.delay_samples, log.delay_override)

    if log.failure_rate_override is not None:
        rate = log.failure_rate_override
        ci_low = ci_high = rate
    else:
        estimate = estimate_lambda(log.failure_timestamps, log.observation_span, confidence)
        if not estimate.has_point_estimate:
            raise NoFailureObservations(
                f"no failures in {log.observation_span!r} minutes of observation; "
                f"{int(round(100 * confidence))}% upper bound on the rate is "
                f"{estimate.ci_high!r} per minute"
            )
        rate = estimate.rate
        ci_low, ci_high = estimate.ci_low, estimate.ci_high

    params = ModelParams(
        failure_rate=rate,
        checkpoint_cost=cost,
        recovery_cost=recovery,
        hop_delay=delay,
        depth=log.critical_path_len,
    )
    return EstimatedParams(params, cost_err, recovery_err, delay_err, ci_low, ci_high)


def recommend(est: EstimatedParams, current_interval: float) -> Recommendation:
    """Optimal interval for the estimated parameters, with the predicted gain
    over the currently configured interval.

    An infeasible current interval (at or below the checkpoint cost) still
    yields a recommendation; only the comparison fields are absent then.
    """
    params = est.params
    t_star = optimal_interval(params.checkpoint_cost, params.failure_rate)
    u_star = utilization_dag(t_star, params)
    if current_interval > params.checkpoint_cost:
        u_current = utilization_dag(current_interval, params)
        gain = 100.0 * (u_star - u_current) / u_current
        return Recommendation(t_star, u_star, current_interval, u_current, gain)
    return Recommendation(
        t_star, u_star, current_interval, None, None, current_feasible=False
    )


def aggregate_failure_rate(node_rates: Sequence[float]) -> float:
    """System failure rate of a cluster whose nodes fail independently: the sum."""
    if not node_rates:
        raise DomainError("node_rates must not be empty")
    for rate in node_rates:
        if rate <= 0.0:
            raise DomainError(f"node rates must be > 0, got {rate!r}")
    return math.fsum(node_rates)


_SCALAR_SECTIONS = {"unit", "span", "n", "checkpoint_cost", "recovery", "delay", "lambda"}
_LIST_SECTIONS = {"failures", "checkpoint_costs", "recoveries", "delays"}
_SECTION_RE = re.compile(r"^([A-Za-z_]+)\s*:\s*(.*)$")


def _parse_values(text: str, line_no: int) -> list[float]:
    values = []
    for token in text.replace(",", " ").split():
        try:
            value = float(token)
        except ValueError:
            raise MeasurementLogError(f"invalid number {token!r}", line_no) from None
        if not math.isfinite(value):
            raise MeasurementLogError(f"non-finite value {token!r}", line_no)
        values.append(value)
    return values


def parse_measurement_log(text: str) -> MeasurementLog:
    """Parse a measurement log document into a minutes-denominated log.

    See the module docstring for the grammar.  Raises
    :class:`MeasurementLogError` with a line number on malformed input.
    """
    unit: str | None = None
    scalars: dict[str, float] = {}
    lists: dict[str, list[float]] = {name: [] for name in _LIST_SECTIONS}
    seen: set[str] = set()
    current_list: str | None = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = _SECTION_RE.match(line)
        if match:
            section, rest = match.group(1), match.group(2).strip()
            if section not in _SCALAR_SECTIONS and section not in _LIST_SECTIONS:
                raise MeasurementLogError(f"unknown section {section!r}", line_no)
            if section in seen:
                raise MeasurementLogError(f"duplicate section {section!r}", line_no)
            seen.add(section)
            if unit is None and section != "unit":
                raise MeasurementLogError(
                    "the first section must declare the unit (unit: seconds|minutes|hours)",
                    line_no,
                )
            if section == "unit":
                if rest not in UNIT_WORDS:
                    raise MeasurementLogError(
                        f"unknown unit {rest!r}; expected seconds, minutes or hours", line_no
                    )
                unit = UNIT_WORDS[rest]
                current_list = None
            elif section in _SCALAR_SECTIONS:
                values = _parse_values(rest, line_no)
                if len(values) != 1:
                    raise MeasurementLogError(
                        f"section {section!r} takes exactly one value", line_no
                    )
                scalars[section] = values[0]
                current_list = None
            else:
                lists[section].extend(_parse_values(rest, line_no))
                current_list = section
        else:
            if current_list is None:
                raise MeasurementLogError(
                    "values outside any list section; expected 'key: values'", line_no
                )
            lists[current_list].extend(_parse_values(line, line_no))

    if unit is None:
        raise MeasurementLogError("empty log: missing unit declaration")
    if "span" not in scalars:
        raise MeasurementLogError("missing required section 'span'")

    depth = 1
    if "n" in scalars:
        if scalars["n"] != int(scalars["n"]):
            raise MeasurementLogError("section 'n' must be an integer")
        depth = int(scalars["n"])

    def to_minutes(value: float) -> float:
        return minutes_from(value, unit)

    def rate_to_per_minute(value: float) -> float:
        # A rate is a reciprocal time: per second scales up, per hour down.
        if unit == "s":
            return value * 60.0
        if unit == "hr":
            return value / 60.0
        return value

    try:
        return MeasurementLog(
            failure_timestamps=tuple(sorted(to_minutes(t) for t in lists["failures"])),
            observation_span=to_minutes(scalars["span"]),
            checkpoint_cost_samples=tuple(to_minutes(v) for v in lists["checkpoint_costs"]),
            recovery_samples=tuple(to_minutes(v) for v in lists["recoveries"]),
            delay_samples=tuple(to_minutes(v) for v in lists["delays"]),
            critical_path_len=depth,
            checkpoint_cost_override=(
                to_minutes(scalars["checkpoint_cost"]) if "checkpoint_cost" in scalars else None
            ),
            recovery_override=to_minutes(scalars["recovery"]) if "recovery" in scalars else None,
            delay_override=to_minutes(scalars["delay"]) if "delay" in scalars else None,
            failure_rate_override=(
                rate_to_per_minute(scalars["lambda"]) if "lambda" in scalars else None
            ),
        )
    except DomainError as exc:
        raise MeasurementLogError(str(exc)) from exc
