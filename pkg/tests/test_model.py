"""Tests for the analytic utilization model.

Expected values marked as oracle-derived are computed by the independent
routes in this file (quadrature, Monte Carlo, direct arithmetic on the
defining expectations), not by the code under test.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from ckptopt.errors import DomainError
from ckptopt.model import (
    ModelParams,
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


def conditional_mean_by_quadrature(window: float, rate: float) -> float:
    """Oracle for the conditional mean failure time: direct integration of
    the truncated exponential density."""
    numerator, _ = quad(lambda t: t * rate * math.exp(-rate * t), 0.0, window)
    return numerator / (1.0 - math.exp(-rate * window))


def random_params(rng: np.random.Generator) -> ModelParams:
    return ModelParams(
        failure_rate=float(10.0 ** rng.uniform(-4, -0.5)),
        checkpoint_cost=float(rng.uniform(0.1, 10.0)),
        recovery_cost=float(rng.uniform(0.0, 30.0)),
        hop_delay=float(rng.uniform(0.0, 1.0)),
        depth=int(rng.integers(1, 100)),
    )


class TestModelParams:
    def test_validation(self):
        with pytest.raises(DomainError):
            ModelParams(failure_rate=0.0, checkpoint_cost=1.0)
        with pytest.raises(DomainError):
            ModelParams(failure_rate=-0.1, checkpoint_cost=1.0)
        with pytest.raises(DomainError):
            ModelParams(failure_rate=0.1, checkpoint_cost=-1.0)
        with pytest.raises(DomainError):
            ModelParams(failure_rate=0.1, checkpoint_cost=1.0, recovery_cost=-1.0)
        with pytest.raises(DomainError):
            ModelParams(failure_rate=0.1, checkpoint_cost=1.0, hop_delay=-0.5)
        with pytest.raises(DomainError):
            ModelParams(failure_rate=0.1, checkpoint_cost=1.0, depth=0)

    def test_commit_lag(self):
        p = ModelParams(failure_rate=0.1, checkpoint_cost=1.0, hop_delay=0.5, depth=50)
        assert p.commit_lag == 24.5
        assert ModelParams(failure_rate=0.1, checkpoint_cost=1.0, depth=1).commit_lag == 0.0


class TestMeanFailureTimeWithin:
    def test_small_rate_limit_is_half_window(self):
        assert mean_failure_time_within(10.0, 1e-9) == pytest.approx(5.0, rel=1e-6)

    def test_against_quadrature(self):
        for window, rate in [(20.0, 0.1), (5.0, 0.5), (100.0, 0.01), (1.0, 3.0)]:
            oracle = conditional_mean_by_quadrature(window, rate)
            assert mean_failure_time_within(window, rate) == pytest.approx(oracle, rel=1e-9)

    def test_known_value(self):
        # conditional_mean_by_quadrature(20, 0.1) = 6.869647145006687
        assert mean_failure_time_within(20.0, 0.1) == pytest.approx(6.869647145006687, rel=1e-12)

    def test_below_unconditional_mean(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            rate = float(10.0 ** rng.uniform(-4, 1))
            window = float(10.0 ** rng.uniform(-2, 3))
            assert mean_failure_time_within(window, rate) < 1.0 / rate

    def test_between_zero_and_half_window(self):
        rng = np.random.default_rng(6)
        for _ in range(200):
            rate = float(10.0 ** rng.uniform(-4, 1))
            window = float(10.0 ** rng.uniform(-2, 3))
            value = mean_failure_time_within(window, rate)
            assert 0.0 < value < window / 2.0

    def test_series_joins_closed_form_smoothly(self):
        # Values straddling the expansion cutoff at rate*window = 1e-6.
        below = mean_failure_time_within(1.0, 0.99e-6)
        above = mean_failure_time_within(1.0, 1.01e-6)
        assert below == pytest.approx(above, rel=1e-7)

    def test_huge_exponent_saturates(self):
        assert mean_failure_time_within(1e6, 1.0) == pytest.approx(1.0, rel=1e-12)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            mean_failure_time_within(0.0, 0.1)
        with pytest.raises(DomainError):
            mean_failure_time_within(-1.0, 0.1)
        with pytest.raises(DomainError):
            mean_failure_time_within(1.0, 0.0)


class TestGeometricExpectations:
    def test_zero_task_time(self):
        assert expected_consecutive_failures(0.0, 0.1) == 0.0

    def test_exponential_identity(self):
        assert expected_consecutive_failures(10.0, 0.1) == pytest.approx(math.e - 1.0, rel=1e-12)

    def test_against_monte_carlo_odds(self):
        # Fraction of exponential draws below x, converted to odds.
        rng = np.random.default_rng(314)
        draws = rng.exponential(1.0 / 0.005, size=4_000_000)
        fraction = float((draws < 46.452).mean())
        oracle = fraction / (1.0 - fraction)
        assert expected_consecutive_failures(46.452, 0.005) == pytest.approx(oracle, rel=5e-3)

    def test_restarts_zero_cost(self):
        assert expected_restarts(0.0, 0.1) == 1.0

    def test_restarts_identity(self):
        assert expected_restarts(10.0, 0.1) == pytest.approx(math.e, rel=1e-12)

    def test_restarts_against_monte_carlo_survival(self):
        rng = np.random.default_rng(2718)
        draws = rng.exponential(1.0 / 0.005, size=4_000_000)
        survival = float((draws >= 10.0).mean())
        assert expected_restarts(10.0, 0.005) == pytest.approx(1.0 / survival, rel=5e-3)

    def test_restarts_at_least_one(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            assert expected_restarts(float(rng.uniform(0, 50)), float(rng.uniform(1e-4, 1))) >= 1.0

    def test_saturating_expectations_return_infinity(self):
        assert expected_consecutive_failures(1e6, 1.0) == math.inf
        assert expected_restarts(1e6, 1.0) == math.inf

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            expected_consecutive_failures(-1.0, 0.1)
        with pytest.raises(DomainError):
            expected_consecutive_failures(1.0, 0.0)
        with pytest.raises(DomainError):
            expected_restarts(-1.0, 0.1)
        with pytest.raises(DomainError):
            expected_restarts(1.0, -0.1)


class TestUtilizationIdeal:
    def test_interval_equal_to_cost(self):
        assert utilization_ideal(5.0, 5.0) == 0.0

    def test_free_checkpoints(self):
        assert utilization_ideal(10.0, 0.0) == 1.0

    def test_direct_arithmetic(self):
        assert utilization_ideal(46.452, 5.0) == pytest.approx(41.452 / 46.452, rel=1e-15)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            utilization_ideal(4.0, 5.0)
        with pytest.raises(DomainError):
            utilization_ideal(0.0, 0.0)
        with pytest.raises(DomainError):
            utilization_ideal(1.0, -0.5)


class TestUtilizationFailuresOnly:
    def test_interval_equal_to_cost(self):
        assert utilization_failures_only(5.0, 5.0, 0.1) == 0.0

    def test_vanishing_rate_reduces_to_ideal(self):
        u = utilization_failures_only(30.0, 5.0, 1e-12)
        assert u == pytest.approx(utilization_ideal(30.0, 5.0), rel=1e-9)

    def test_matches_effective_period_construction(self):
        # Independent route: interval plus expected failures times the
        # conditional loss per failure.
        for interval, cost, rate in [(46.452, 5.0, 0.005), (20.0, 2.0, 0.1), (8.0, 1.0, 0.3)]:
            t_eff = interval + expected_consecutive_failures(interval, rate) * (
                mean_failure_time_within(interval, rate)
            )
            direct = (interval - cost) / t_eff
            assert utilization_failures_only(interval, cost, rate) == pytest.approx(
                direct, rel=1e-12
            )

    def test_known_value(self):
        assert utilization_failures_only(46.452, 5.0, 0.005) == pytest.approx(
            0.7927399233517394, rel=1e-12
        )


class TestUtilizationSingle:
    def test_peak_value(self):
        params = ModelParams(failure_rate=0.005, checkpoint_cost=5.0, recovery_cost=10.0)
        assert utilization_single(46.452, params) == pytest.approx(0.7541, abs=5e-4)

    def test_zero_recovery_reduces_to_failures_only(self):
        params = ModelParams(failure_rate=0.05, checkpoint_cost=3.0, recovery_cost=0.0)
        assert utilization_single(25.0, params) == utilization_failures_only(25.0, 3.0, 0.05)

    def test_known_value(self):
        params = ModelParams(failure_rate=0.1, checkpoint_cost=5.0, recovery_cost=10.0)
        # 0.1 * 15 / (e**3 - e**1), direct arithmetic.
        assert utilization_single(20.0, params) == pytest.approx(
            1.5 / (math.exp(3.0) - math.exp(1.0)), rel=1e-12
        )
        assert utilization_single(20.0, params) == pytest.approx(0.08636943442232767, rel=1e-12)

    def test_matches_effective_period_construction(self):
        for interval, params in [
            (46.452, ModelParams(0.005, 5.0, 10.0)),
            (12.0, ModelParams(0.1, 2.0, 7.0)),
        ]:
            rate = params.failure_rate
            recovery = params.recovery_cost
            loss_per_failure = (
                mean_failure_time_within(interval, rate)
                + recovery
                + expected_consecutive_failures(recovery, rate)
                * mean_failure_time_within(recovery, rate)
            )
            t_eff = interval + expected_consecutive_failures(interval, rate) * loss_per_failure
            assert utilization_single(interval, params) == pytest.approx(
                (interval - params.checkpoint_cost) / t_eff, rel=1e-12
            )

    def test_domain_error(self):
        with pytest.raises(DomainError):
            utilization_single(4.9, ModelParams(0.1, 5.0, 10.0))


class TestUtilizationDagIdeal:
    def test_single_operator_reduces_to_ideal(self):
        params = ModelParams(failure_rate=0.01, checkpoint_cost=5.0, hop_delay=0.5, depth=1)
        assert utilization_dag_ideal(30.0, params) == utilization_ideal(30.0, 5.0)

    def test_zero_delay_reduces_to_ideal(self):
        params = ModelParams(failure_rate=0.01, checkpoint_cost=5.0, hop_delay=0.0, depth=50)
        assert utilization_dag_ideal(30.0, params) == utilization_ideal(30.0, 5.0)

    def test_direct_arithmetic(self):
        params = ModelParams(failure_rate=0.005, checkpoint_cost=5.0, hop_delay=0.5, depth=50)
        assert utilization_dag_ideal(46.452, params) == pytest.approx(
            41.452 / (46.452 + 24.5), rel=1e-15
        )


class TestEffectivePeriodDag:
    PARAMS = ModelParams(
        failure_rate=0.005, checkpoint_cost=5.0, recovery_cost=10.0, hop_delay=0.5, depth=50
    )

    def test_vanishing_rate_tends_to_interval(self):
        params = ModelParams(
            failure_rate=1e-12, checkpoint_cost=5.0, recovery_cost=10.0, hop_delay=0.5, depth=50
        )
        assert effective_period_dag(40.0, params) == pytest.approx(40.0, rel=1e-6)

    def test_single_operator_matches_plain_construction(self):
        params = ModelParams(failure_rate=0.01, checkpoint_cost=2.0, recovery_cost=8.0, depth=1)
        interval = 25.0
        rate, recovery = 0.01, 8.0
        loss = (
            mean_failure_time_within(interval, rate)
            + recovery
            + expected_consecutive_failures(recovery, rate)
            * mean_failure_time_within(recovery, rate)
        )
        expected = interval + expected_consecutive_failures(interval, rate) * loss
        assert effective_period_dag(interval, params) == pytest.approx(expected, rel=1e-12)

    def test_against_collapsed_form(self):
        # Independent route: exp(r*(R + (n-1)*d)) * expm1(r*T) / r.
        p = self.PARAMS
        collapsed = (
            math.exp(p.failure_rate * (p.recovery_cost + 24.5))
            * math.expm1(p.failure_rate * 46.452)
            / p.failure_rate
        )
        assert effective_period_dag(46.452, p) == pytest.approx(collapsed, rel=1e-10)
        assert effective_period_dag(46.452, p) == pytest.approx(62.134178003644536, rel=1e-9)

    def test_consistent_with_closed_form_utilization(self):
        p = self.PARAMS
        for interval in [10.0, 46.452, 80.0, 200.0]:
            via_period = (interval - p.checkpoint_cost) / effective_period_dag(interval, p)
            assert via_period == pytest.approx(utilization_dag(interval, p), rel=1e-10)


class TestUtilizationDag:
    def test_peak_value(self):
        params = ModelParams(
            failure_rate=0.005, checkpoint_cost=5.0, recovery_cost=10.0, hop_delay=0.5, depth=50
        )
        assert utilization_dag(46.452, params) == pytest.approx(0.667, abs=2e-3)

    def test_single_operator_equals_single_process_exactly(self):
        for delay in [0.0, 0.5, 3.0]:
            params = ModelParams(
                failure_rate=0.02, checkpoint_cost=3.0, recovery_cost=12.0,
                hop_delay=delay, depth=1,
            )
            single = ModelParams(failure_rate=0.02, checkpoint_cost=3.0, recovery_cost=12.0)
            assert utilization_dag(17.0, params) == utilization_single(17.0, single)

    def test_deep_topology_decay(self):
        params = ModelParams(
            failure_rate=0.005,
            checkpoint_cost=10.0 / 60.0,
            recovery_cost=0.5,
            hop_delay=5.0 / 60.0,
            depth=15000,
        )
        # Optimal interval for this cost and rate is about 8.22 minutes.
        assert utilization_dag(8.220901435316152, params) == pytest.approx(0.0018, abs=2e-4)

    def test_log_space_path_continuous_at_threshold(self):
        # Same parameters evaluated just below and just above the exponent
        # where evaluation switches to log space.
        def params_for(recovery):
            return ModelParams(
                failure_rate=1.0, checkpoint_cost=1.0, recovery_cost=recovery, depth=1
            )

        below = utilization_dag(50.0, params_for(649.5))
        above = utilization_dag(50.0, params_for(650.5))
        ratio = below / above
        assert ratio == pytest.approx(math.exp(1.0), rel=1e-9)

    def test_extreme_arguments_underflow_to_zero(self):
        params = ModelParams(
            failure_rate=0.01, checkpoint_cost=5.0, recovery_cost=30.0, hop_delay=5.0, depth=20000
        )
        value = utilization_dag(100.0, params)
        assert value == 0.0

    def test_huge_interval_underflows_instead_of_overflowing(self):
        # exp(r*T) is far past the double range here; the result must be the
        # correctly rounded 0.0, not an overflow crash.
        params = ModelParams(failure_rate=1.0, checkpoint_cost=1.0, recovery_cost=1.0)
        assert utilization_single(800.0, params) == 0.0
        assert utilization_failures_only(800.0, 1.0, 1.0) == 0.0
        assert utilization_dag(800.0, params) == 0.0

    def test_non_finite_interval_rejected(self):
        params = ModelParams(failure_rate=0.01, checkpoint_cost=1.0)
        for bad in [float("inf"), float("nan")]:
            with pytest.raises(DomainError):
                utilization_dag(bad, params)

    def test_non_finite_params_rejected(self):
        with pytest.raises(DomainError):
            ModelParams(failure_rate=float("inf"), checkpoint_cost=1.0)
        with pytest.raises(DomainError):
            ModelParams(failure_rate=0.1, checkpoint_cost=float("nan"))


class TestModelInvariants:
    def test_reduction_chain(self):
        # Zero hop delay collapses the DAG form onto the single-process
        # form; zero recovery collapses further onto the failures-only form.
        rng = np.random.default_rng(99)
        for _ in range(1000):
            rate = float(10.0 ** rng.uniform(-4, -0.5))
            cost = float(rng.uniform(0.1, 5.0))
            recovery = float(rng.uniform(0.0, 20.0))
            depth = int(rng.integers(1, 100))
            interval = cost + float(rng.uniform(0.1, 50.0))
            dag = ModelParams(rate, cost, recovery, 0.0, depth)
            single = ModelParams(rate, cost, recovery)
            assert utilization_dag(interval, dag) == pytest.approx(
                utilization_single(interval, single), rel=1e-12
            )
            no_recovery = ModelParams(rate, cost, 0.0)
            assert utilization_single(interval, no_recovery) == pytest.approx(
                utilization_failures_only(interval, cost, rate), rel=1e-12
            )

    def test_monotone_decreasing_in_each_parameter(self):
        interval, cost = 30.0, 2.0

        def u(rate=0.01, recovery=5.0, delay=0.2, depth=20):
            return utilization_dag(
                interval, ModelParams(rate, cost, recovery, delay, depth)
            )

        rates = [0.001, 0.005, 0.02, 0.1, 0.5]
        assert all(u(rate=a) > u(rate=b) for a, b in zip(rates, rates[1:]))
        recoveries = [0.0, 2.0, 8.0, 20.0, 60.0]
        assert all(u(recovery=a) > u(recovery=b) for a, b in zip(recoveries, recoveries[1:]))
        delays = [0.0, 0.1, 0.5, 1.0, 3.0]
        assert all(u(delay=a) > u(delay=b) for a, b in zip(delays, delays[1:]))
        depths = [1, 5, 20, 100, 400]
        assert all(u(depth=a) > u(depth=b) for a, b in zip(depths, depths[1:]))

    def test_bounds(self):
        rng = np.random.default_rng(123)
        for _ in range(500):
            params = random_params(rng)
            interval = params.checkpoint_cost + float(10.0 ** rng.uniform(-2, 2))
            u = utilization_dag(interval, params)
            assert 0.0 < u < 1.0
            assert utilization_dag(params.checkpoint_cost, params) == 0.0

    def test_construction_matches_closed_form(self):
        rng = np.random.default_rng(321)
        for _ in range(1000):
            params = random_params(rng)
            interval = params.checkpoint_cost + float(10.0 ** rng.uniform(-1, 2))
            # Keep the constructive expectations within double range.
            span_exponent = params.failure_rate * (interval + params.commit_lag)
            if span_exponent > 500.0:
                continue
            via_period = (interval - params.checkpoint_cost) / effective_period_dag(
                interval, params
            )
            assert via_period == pytest.approx(utilization_dag(interval, params), rel=1e-10)

    def test_vanishing_rate_limit_is_ideal_not_pipeline_fill(self):
        # With failures gone, consecutive intervals fully overlap the token
        # propagation, so the limit has no hop-delay term.
        params = ModelParams(
            failure_rate=1e-12, checkpoint_cost=5.0, recovery_cost=10.0, hop_delay=0.5, depth=50
        )
        u = utilization_dag(40.0, params)
        assert u == pytest.approx(utilization_ideal(40.0, 5.0), rel=1e-6)
        assert abs(u - utilization_dag_ideal(40.0, params)) > 0.1
