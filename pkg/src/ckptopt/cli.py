"""Command-line client for the checkpoint interval analysis service.

Every command builds an API request, sends it to the service and renders the
response as a CSV or JSON table on stdout (diagnostics go to stderr).  By
default the service runs in-process; pass ``--server URL`` to talk to a
remote ``ckptopt serve`` instance instead.

Durations take an ``s``, ``min`` or ``hr`` suffix and rates a ``/s``,
``/min`` or ``/hr`` suffix; bare numbers are rejected.  Internally the
service works in minutes.

Exit codes: 0 on success, 2 on invalid flags or malformed input, 3 when a
measurement log contains no failures so no rate estimate exists.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import httpx

from . import __version__
from .errors import DomainError
from .service import create_app
from .tables import Cell, OutputTable
from .units import parse_duration, parse_rate

EXIT_INVALID = 2
EXIT_NO_FAILURES = 3


class DurationParam(click.ParamType):
    """Duration with a mandatory s | min | hr suffix, converted to minutes."""

    name = "duration"

    def convert(self, value, param, ctx):
        if isinstance(value, float):
            return value
        try:
            return parse_duration(value)
        except DomainError as exc:
            self.fail(str(exc), param, ctx)


class RateParam(click.ParamType):
    """Rate with a mandatory /s | /min | /hr suffix, converted to per-minute."""

    name = "rate"

    def convert(self, value, param, ctx):
        if isinstance(value, float):
            return value
        try:
            return parse_rate(value)
        except DomainError as exc:
            self.fail(str(exc), param, ctx)


DURATION = DurationParam()
RATE = RateParam()


def _open_client(server: str | None):
    if server is not None:
        return httpx.Client(base_url=server, timeout=300.0)
    # In-process transport against the bundled service; same wire format as
    # a remote server, no socket involved.
    import warnings

    with warnings.catch_warnings():
        # starlette's test client import warns; it is our supported
        # in-process transport, not a test-only shortcut.
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    return TestClient(create_app())


def _call(ctx: click.Context, path: str, payload: dict) -> dict:
    with _open_client(ctx.obj.get("server")) as client:
        try:
            response = client.post(path, json=payload)
        except httpx.HTTPError as exc:
            click.echo(f"error: cannot reach server: {exc}", err=True)
            sys.exit(1)
    if response.status_code == 200:
        return response.json()
    try:
        body = response.json()
    except ValueError:
        body = {}
    detail = body.get("detail", response.text)
    if isinstance(detail, list):
        # Schema-validation errors arrive as a list of per-field messages.
        detail = "; ".join(
            str(item.get("msg", item)) if isinstance(item, dict) else str(item)
            for item in detail
        )
    code = body.get("error_code", "")
    click.echo(f"error: {detail}", err=True)
    sys.exit(EXIT_NO_FAILURES if code == "no_failure_observations" else EXIT_INVALID)


def _emit(table: OutputTable, fmt: str) -> None:
    click.echo(table.render(fmt), nl=False)


def _bool_cell(value: bool) -> str:
    return "true" if value else "false"


_format_option = click.option(
    "--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
    help="Output table format.", show_default=True,
)


def _params_payload(lam: float, c: float, r: float | None, delta: float, n: int) -> dict:
    return {
        "failure_rate_per_min": lam,
        "checkpoint_cost_min": c,
        "recovery_cost_min": r if r is not None else 0.0,
        "hop_delay_min": delta,
        "depth": n,
    }


def _model_options(required_r: bool = False):
    r_kwargs = {"required": True} if required_r else {"default": None}

    def wrap(f):
        f = click.option("--n", "n", type=click.IntRange(min=1), default=1,
                         show_default=True, help="Operators on the critical path.")(f)
        f = click.option("--delta", "delta", type=DURATION, default="0s",
                         show_default=True, help="Per-hop token delay (duration).")(f)
        f = click.option("--r", "r", type=DURATION,
                         help="Detect-and-restart cost (duration).", **r_kwargs)(f)
        f = click.option("--c", "c", type=DURATION, required=True,
                         help="Checkpoint cost (duration).")(f)
        f = click.option("--lambda", "lam", type=RATE, required=True,
                         help="System failure rate (rate).")(f)
        return f

    return wrap


@click.group()
@click.version_option(version=__version__, prog_name="ckptopt")
@click.option("--server", default=None, metavar="URL",
              help="Base URL of a running service; default runs in-process.")
@click.pass_context
def main(ctx: click.Context, server: str | None):
    """Checkpoint interval analysis for checkpointed stream processing systems.

    Examples:

        ckptopt optimal --lambda 0.005/min --c 5min

        ckptopt sweep --lambda 0.005/min --c 5min --r 10min
        --t-start 10min --t-stop 120min --t-step 5min

        ckptopt advise measurements.log --current 30min
    """
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


@main.command()
@_model_options()
@_format_option
@click.pass_context
def optimal(ctx, lam, c, r, delta, n, fmt):
    """Compute the utilization-maximizing checkpoint interval.

    Depends only on the failure rate and the checkpoint cost.  When --r is
    given, the predicted utilization at the optimum is reported as well
    (using --delta and --n when present).

    Examples:

        ckptopt optimal --lambda 0.005/min --c 5min

        ckptopt optimal --lambda 0.0022/hr --c 1s
    """
    payload = {
        "failure_rate_per_min": lam,
        "checkpoint_cost_min": c,
        "recovery_cost_min": r,
        "hop_delay_min": delta,
        "depth": n,
    }
    data = _call(ctx, "/api/optimal", payload)
    table = OutputTable(
        columns=(("t_star", "min"), ("u_at_t_star", "")),
        rows=((data["t_star_min"], data["u_at_t_star"]),),
    )
    _emit(table, fmt)


@main.command()
@_model_options()
@click.option("--t-start", type=DURATION, required=True, help="First interval (duration).")
@click.option("--t-stop", type=DURATION, required=True, help="Last interval (duration).")
@click.option("--t-step", type=DURATION, required=True, help="Grid step (duration).")
@click.option("--model", type=click.Choice(["ideal", "single", "dag"]), default="dag",
              show_default=True, help="Analytic utilization model to sweep.")
@click.option("--simulate", is_flag=True, help="Add Monte Carlo columns (model must be dag).")
@click.option("--runs", type=click.IntRange(min=1), default=250, show_default=True,
              help="Simulation runs per grid point.")
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True,
              help="Simulation seed (unsigned 64-bit).")
@click.option("--horizon", type=DURATION, default=None,
              help="Simulated horizon per run (duration); default 2000 failures' worth.")
@_format_option
@click.pass_context
def sweep(ctx, lam, c, r, delta, n, t_start, t_stop, t_step, model, simulate, runs,
          seed, horizon, fmt):
    """Tabulate utilization over a grid of checkpoint intervals.

    Emits plot-ready (T, U) columns; with --simulate, adds the simulated mean
    and standard deviation per grid point.

    Example:

        ckptopt sweep --lambda 0.005/min --c 5min --r 10min
        --t-start 10min --t-stop 120min --t-step 5min --simulate --seed 7
    """
    payload = {
        "params": _params_payload(lam, c, r, delta, n),
        "t_start_min": t_start,
        "t_stop_min": t_stop,
        "t_step_min": t_step,
        "model": model,
    }
    if simulate:
        payload["simulate"] = {"runs": runs, "seed": seed, "horizon_min": horizon}
    data = _call(ctx, "/api/sweep", payload)
    points = data["points"]
    if simulate:
        columns = (("T", "min"), ("U", ""), ("u_sim_mean", ""), ("u_sim_std", ""))
        rows = tuple(
            (p["interval_min"], p["utilization"], p["sim_mean"], p["sim_std"])
            for p in points
        )
    else:
        columns = (("T", "min"), ("U", ""))
        rows = tuple((p["interval_min"], p["utilization"]) for p in points)
    _emit(OutputTable(columns, rows), fmt)


@main.command()
@_model_options(required_r=True)
@click.option("--baseline", type=DURATION, required=True,
              help="Currently configured fixed interval (duration).")
@_format_option
@click.pass_context
def compare(ctx, lam, c, r, delta, n, baseline, fmt):
    """Compare the proposed optimal interval against baseline policies.

    Rows cover the proposed optimum, the first-order recovery-aware interval,
    its squared-cost variant and the fixed baseline, all evaluated under the
    same utilization model.

    Example:

        ckptopt compare --lambda 11/hr --c 2min --r 5min --delta 30s --n 25
        --baseline 30min
    """
    payload = {
        "params": _params_payload(lam, c, r, delta, n),
        "baseline_interval_min": baseline,
    }
    data = _call(ctx, "/api/compare", payload)
    columns = (
        ("model", ""),
        ("T", "min"),
        ("U", ""),
        ("gain_vs_baseline", "%"),
        ("feasible", ""),
    )
    rows = tuple(
        (
            row["model"],
            row["interval_min"],
            row["utilization"],
            row["gain_vs_baseline_pct"],
            _bool_cell(row["feasible"]),
        )
        for row in data["rows"]
    )
    _emit(OutputTable(columns, rows), fmt)


@main.command()
@click.option("--node-rate", type=RATE, required=True, help="Per-node failure rate (rate).")
@click.option("--nodes", required=True,
              help="Comma-separated node counts, e.g. 1,10,100,1000.")
@click.option("--c", "c", type=DURATION, required=True, help="Checkpoint cost (duration).")
@click.option("--r", "r", type=DURATION, default="0s", show_default=True,
              help="Detect-and-restart cost (duration).")
@click.option("--delta", type=DURATION, default="0s", show_default=True,
              help="Per-hop token delay (duration).")
@click.option("--n", "n", type=click.IntRange(min=1), default=1, show_default=True,
              help="Operators on the critical path.")
@click.option("--baseline", type=DURATION, required=True,
              help="Fixed interval to compare against (duration).")
@_format_option
@click.pass_context
def scaleup(ctx, node_rate, nodes, c, r, delta, n, baseline, fmt):
    """Show how the gain of the optimal interval grows with cluster size.

    The system failure rate is the node rate times the node count; each row
    reports the optimum for that size and its utilization gain over the
    baseline interval.

    Example:

        ckptopt scaleup --node-rate 0.0022/hr --nodes 1,100,1000,2000
        --c 5s --r 30s --delta 0.05s --n 5 --baseline 30min
    """
    try:
        node_counts = [int(part) for part in nodes.split(",") if part.strip()]
    except ValueError:
        raise click.UsageError(f"invalid --nodes list {nodes!r}; expected integers")
    if not node_counts:
        raise click.UsageError("--nodes must contain at least one count")
    payload = {
        "node_failure_rate_per_min": node_rate,
        "node_counts": node_counts,
        "checkpoint_cost_min": c,
        "recovery_cost_min": r,
        "hop_delay_min": delta,
        "depth": n,
        "baseline_interval_min": baseline,
    }
    data = _call(ctx, "/api/scaleup", payload)
    columns = (
        ("nodes", ""),
        ("system_lambda", "1/min"),
        ("t_star", "min"),
        ("gain", "%"),
    )
    rows = tuple(
        (row["nodes"], row["system_failure_rate_per_min"], row["t_star_min"], row["gain_pct"])
        for row in data["rows"]
    )
    _emit(OutputTable(columns, rows), fmt)


@main.command()
@_model_options()
@click.option("--t", "intervals", type=DURATION, multiple=True, required=True,
              help="Interval to simulate (duration); repeatable.")
@click.option("--runs", type=click.IntRange(min=1), default=250, show_default=True,
              help="Runs per interval.")
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True,
              help="Simulation seed (unsigned 64-bit).")
@click.option("--horizon", type=DURATION, default=None,
              help="Simulated horizon per run (duration); default 2000 failures' worth.")
@_format_option
@click.pass_context
def simulate(ctx, lam, c, r, delta, n, intervals, runs, seed, horizon, fmt):
    """Run the Monte Carlo checkpoint/failure/restart simulation.

    Results are reproducible: the same flags and seed always produce the
    same table.

    Example:

        ckptopt simulate --lambda 0.005/min --c 5min --r 10min
        --t 20min --t 46.452min --t 100min --seed 42
    """
    payload = {
        "params": _params_payload(lam, c, r, delta, n),
        "intervals_min": list(intervals),
        "runs": runs,
        "seed": seed,
        "horizon_min": horizon,
    }
    data = _call(ctx, "/api/simulate", payload)
    columns = (("T", "min"), ("u_sim_mean", ""), ("u_sim_std", ""), ("runs", ""))
    rows = tuple(
        (row["interval_min"], row["mean_utilization"], row["std_utilization"], row["runs"])
        for row in data["rows"]
    )
    _emit(OutputTable(columns, rows), fmt)


@main.command()
@click.argument("log_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--current", type=DURATION, required=True,
              help="Currently configured checkpoint interval (duration).")
@_format_option
@click.pass_context
def advise(ctx, log_file: Path, current, fmt):
    """Estimate parameters from a measurement log and recommend an interval.

    The log declares its own unit; see the docs for the format.  Exits with
    status 3 when the log records no failures, since the failure rate then
    has no point estimate.

    Example:

        ckptopt advise cluster.log --current 30min
    """
    payload = {
        "log_text": log_file.read_text(),
        "current_interval_min": current,
    }
    data = _call(ctx, "/api/advise", payload)
    columns = (
        ("lambda", "1/min"),
        ("lambda_ci_low", "1/min"),
        ("lambda_ci_high", "1/min"),
        ("c", "min"),
        ("c_stderr", "min"),
        ("R", "min"),
        ("R_stderr", "min"),
        ("delta", "min"),
        ("delta_stderr", "min"),
        ("n", ""),
        ("t_star", "min"),
        ("u_at_t_star", ""),
        ("u_at_current", ""),
        ("gain", "%"),
    )
    row: tuple[Cell, ...] = (
        data["failure_rate_per_min"],
        data["rate_ci_low_per_min"],
        data["rate_ci_high_per_min"],
        data["checkpoint_cost_min"],
        data["stderr_checkpoint_cost_min"],
        data["recovery_cost_min"],
        data["stderr_recovery_min"],
        data["hop_delay_min"],
        data["stderr_delay_min"],
        data["depth"],
        data["t_star_min"],
        data["u_at_t_star"],
        data["u_at_current"],
        data["gain_pct"],
    )
    _emit(OutputTable(columns, (row,)), fmt)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int):
    """Run the analysis service as an HTTP server."""
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
