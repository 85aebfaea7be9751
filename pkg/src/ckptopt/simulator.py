"""Monte Carlo simulation of the checkpoint / failure / restart timeline.

Timeline semantics of one run
-----------------------------
Logical progress advances one-for-one with wall time while the system is up.
A checkpoint token is emitted whenever logical progress crosses a multiple of
the interval T; the checkpoint becomes restorable (system-wide committed)
``(depth - 1) * hop_delay`` of wall time after emission, instantaneously for a
single operator.  Processing continues while a token propagates.  Failures
arrive as one global Poisson stream.  A failure rolls logical progress back
to the newest restorable checkpoint (in-flight tokens are lost, so a failure
during token propagation falls back one checkpoint further) and starts a
restart phase of length R; a failure during the restart aborts it and a fresh
restart begins.  After recovery, tokens are again emitted at logical
multiples of T.  A commit coinciding exactly with a failure instant counts
(closed-interval rule; the tie has probability zero and the rule only pins
down floating-point coincidences).  At the horizon H the run scores
``m * (T - c) / H`` where m is the number of restorable checkpoints: each
committed interval contributes its interval minus the checkpoint cost as
useful work, partial work at the horizon contributes nothing.

These semantics collapse exactly, with no approximation: between consecutive
failures the system is up for a known duration D, during which the committed
count grows by ``floor((D - commit_lag) / T)`` (every commit needs T of
logical progress since the phase start plus the propagation lag, and each up
phase starts at a logical multiple of T).  Restart phases are runs of
failures whose gaps are shorter than R.  A run therefore reduces to drawing
the failure times and folding over the up-phase durations, which is what
:func:`simulate_run` does; an explicit event-stepping of the same semantics
yields bit-identical trajectories.

Determinism
-----------
Failure inter-arrivals are inverse-CDF transforms of uniform draws from a
counter-based Philox generator keyed by the configuration seed; run ``i``
uses the stream jumped ``i`` steps ahead (disjoint subsequences of the same
cycle), so each run is a pure function of ``(seed, run_index)``, runs may be
evaluated in any order or in parallel, and batch statistics are reproducible
bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .model import ModelParams

__all__ = [
    "SimConfig",
    "SimResult",
    "FailureProcess",
    "simulate_run",
    "simulate_batch",
    "sweep_simulation",
    "derive_sweep_seed",
]

_DEFAULT_RUNS = 250

# Default horizon picked so that a run sees on the order of 2000 failures
# regardless of rate.
_HORIZON_FAILURES = 2000.0


@dataclass(frozen=True)
class SimConfig:
    """Configuration of one Monte Carlo batch.

    horizon defaults to ``2000 / failure_rate`` minutes when omitted.
    """

    params: ModelParams
    interval: float
    horizon: float | None = None
    runs: int = _DEFAULT_RUNS
    seed: int = 0

    def __post_init__(self) -> None:
        if not math.isfinite(self.interval) or self.interval <= self.params.checkpoint_cost:
            raise DomainError(
                f"interval {self.interval!r} must be finite and exceed checkpoint cost "
                f"{self.params.checkpoint_cost!r}"
            )
        if self.horizon is not None and not (
            self.horizon > 0.0 and math.isfinite(self.horizon)
        ):
            raise DomainError(f"horizon must be finite and > 0, got {self.horizon!r}")
        if self.runs < 1:
            raise DomainError(f"runs must be >= 1, got {self.runs!r}")
        if not (0 <= self.seed < 2**64):
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    @property
    def effective_horizon(self) -> float:
        return self.horizon if self.horizon is not None else _HORIZON_FAILURES / self.params.failure_rate


@dataclass(frozen=True)
class SimResult:
    """Summary statistics over the runs of one batch.

    std_utilization is the sample standard deviation (zero for a single run).
    """

    mean_utilization: float
    std_utilization: float
    runs: int
    per_run: tuple[float, ...] | None = None


@dataclass
class FailureProcess:
    """Deterministic per-run failure stream with exponential inter-arrivals.

    Inter-arrival times are produced by the inverse CDF ``-log(1 - u) / rate``
    applied to uniform draws from the owned generator state.
    """

    rate: float
    generator: np.random.Generator = field(repr=False)

    @classmethod
    def for_run(cls, seed: int, run_index: int, rate: float) -> "FailureProcess":
        """Stream for one run: the seed-keyed Philox cycle jumped run_index steps."""
        bitgen = np.random.Philox(key=seed).jumped(run_index)
        return cls(rate=rate, generator=np.random.Generator(bitgen))

    def times_within(self, horizon: float) -> np.ndarray:
        """Sorted failure times in ``(0, horizon]``."""
        chunks = []
        elapsed = 0.0
        expected = self.rate * horizon
        block = int(expected + 6.0 * math.sqrt(expected)) + 16
        while True:
            u = self.generator.random(block)
            gaps = -np.log1p(-u) / self.rate
            gaps[0] += elapsed
            np.cumsum(gaps, out=gaps)
            if gaps[-1] > horizon:
                chunks.append(gaps[gaps <= horizon])
                break
            chunks.append(gaps)
            elapsed = float(gaps[-1])
            block = max(16, block // 4)
        return np.concatenate(chunks)


def _committed_count(up_durations: np.ndarray, interval: float, commit_lag: float) -> int:
    """Checkpoints committed across up phases that each start at a logical
    multiple of the interval; a commit lands ``k * interval + commit_lag``
    into its phase and counts if within the phase (closed end).
    """
    usable = up_durations - commit_lag
    usable = usable[usable >= 0.0]
    if usable.size == 0:
        return 0
    return int(np.floor(usable / interval).sum())


def simulate_run(config: SimConfig, run_index: int) -> float:
    """Utilization of a single run; a pure function of (config.seed, run_index)."""
    if run_index < 0:
        raise DomainError(f"run_index must be >= 0, got {run_index!r}")
    params = config.params
    horizon = config.effective_horizon
    stream = FailureProcess.for_run(config.seed, run_index, params.failure_rate)
    failures = stream.times_within(horizon)

    recovery = params.recovery_cost
    if failures.size == 0:
        up_durations = np.array([horizon])
    else:
        # Up phases: start to first failure, then one phase after every
        # restart that completes, i.e. after every inter-failure gap >= R.
        gaps = np.diff(failures)
        survived = gaps[gaps >= recovery] - recovery
        final = horizon - float(failures[-1]) - recovery
        parts = [failures[:1], survived]
        if final >= 0.0:
            parts.append(np.array([final]))
        up_durations = np.concatenate(parts)

    committed = _committed_count(up_durations, config.interval, params.commit_lag)
    return committed * (config.interval - params.checkpoint_cost) / horizon


def simulate_batch(config: SimConfig) -> SimResult:
    """Mean and sample standard deviation of utilization over config.runs runs.

    Per-run values are collected in run-index order, so the result does not
    depend on any evaluation order or degree of parallelism.
    """
    values = np.array([simulate_run(config, i) for i in range(config.runs)])
    mean = float(values.mean())
    std = float(values.std(ddof=1)) if config.runs > 1 else 0.0
    return SimResult(mean, std, config.runs, per_run=tuple(float(v) for v in values))


def derive_sweep_seed(base_seed: int, index: int) -> int:
    """Seed for the index-th point of a sweep.

    Index 0 keeps the base seed, so a single-point sweep matches
    :func:`simulate_batch` of the base configuration exactly; later points
    get statistically independent seeds by standard entropy mixing of the
    pair (base_seed, index).  Pure function of its arguments.
    """
    if index == 0:
        return base_seed
    return int(np.random.SeedSequence(entropy=(base_seed, index)).generate_state(1, np.uint64)[0])


def sweep_simulation(base: SimConfig, intervals: list[float]) -> list[tuple[float, SimResult]]:
    """One batch per interval, with per-interval derived seeds.

    All intervals are validated against the checkpoint cost before any batch
    runs.  Deterministic for a fixed base seed.
    """
    cost = base.params.checkpoint_cost
    for t in intervals:
        if t <= cost:
            raise DomainError(f"sweep interval {t!r} must exceed checkpoint cost {cost!r}")
    results = []
    for index, t in enumerate(intervals):
        config = SimConfig(
            params=base.params,
            interval=t,
            horizon=base.horizon,
            runs=base.runs,
            seed=derive_sweep_seed(base.seed, index),
        )
        results.append((t, simulate_batch(config)))
    return results
