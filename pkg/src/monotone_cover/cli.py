"""CLI application using Typer framework."""

import json
import logging
import math
from collections.abc import Iterator
from contextlib import contextmanager
from enum import StrEnum
from pathlib import Path
from typing import Any

import typer
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from monotone_cover import __version__
from monotone_cover.bench import BenchReport, CounterFit, counter_regression, run_bench
from monotone_cover.classic.facility import solve_facility_location
from monotone_cover.classic.set_cover import solve_set_cover
from monotone_cover.cmip.solver import solve_cmip
from monotone_cover.config import Config, get_config, set_config
from monotone_cover.core.audit import audit_constraint_monotonicity, audit_cost_model
from monotone_cover.engine.greedy import ConstraintOrder, solve
from monotone_cover.engine.policies import policies
from monotone_cover.engine.trace import StepTrace
from monotone_cover.io.documents import Problem, ProblemKind, load_problem
from monotone_cover.io.schema import DOCUMENT_TYPES
from monotone_cover.online.connection import simulate_connection_caching
from monotone_cover.online.paging import EXHAUSTIVE_TRACE_LIMIT, simulate_paging
from monotone_cover.online.segments import build_segment_constraints, solve_segments
from monotone_cover.online.traces import (
    connection_inputs,
    file_inputs,
    parse_connection_trace,
    parse_file_trace,
)
from monotone_cover.online.upgradable import (
    CacheModel,
    CapacityThreshold,
    simulate_upgradable_caching,
    spend_grid,
    upgradable_opt,
)
from monotone_cover.oracle.caching import connection_opt
from monotone_cover.oracle.exact import exact_opt
from monotone_cover.oracle.facility import facility_opt
from monotone_cover.oracle.two_stage import two_stage_opt
from monotone_cover.probabilistic.solver import solve_probabilistic_cmip
from monotone_cover.randomized.montecarlo import Variant, montecarlo_ratio, run_randomized
from monotone_cover.utils.errors import (
    InfeasibleError,
    MonotoneCoverError,
    OracleUnavailableError,
    SchemaError,
    TraceParseError,
)
from monotone_cover.utils.logging import configure_logging

logger = logging.getLogger(__name__)

EXIT_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_ORACLE = 3

app = typer.Typer(
    name="monocover",
    help="Greedy Δ-approximation for monotone covering, caching simulators and exact oracles",
    add_completion=False,
    no_args_is_help=True,
)

# Reports go to stdout, diagnostics to stderr
console = Console()
err_console = Console(stderr=True)

CONFIG_FILE_OPTION = typer.Option(
    None,
    "--config",
    "-c",
    help="Path to a TOML configuration file",
)
JSON_OPTION = typer.Option(False, "--json", help="Print the report as JSON")
SEED_OPTION = typer.Option(None, "--seed", help="Random seed (defaults to Config.default_seed)")


class OnlineProblem(StrEnum):
    PAGING = "paging"
    CONNECTION = "connection"
    UPGRADABLE = "upgradable"
    SEGMENTS = "segments"


@contextmanager
def _exit_codes() -> Iterator[None]:
    """Translate library errors into messages and exit codes."""
    try:
        yield
    except SchemaError as e:
        for pointer, message in e.diagnostics:
            err_console.print(f"[red]✗[/red] {escape(pointer or '/')}: {escape(message)}")
        raise typer.Exit(EXIT_INPUT) from e
    except TraceParseError as e:
        err_console.print(f"[red]✗[/red] {escape(str(e))}")
        raise typer.Exit(EXIT_INPUT) from e
    except InfeasibleError as e:
        err_console.print(f"[red]✗[/red] Infeasible: {escape(str(e))}")
        raise typer.Exit(EXIT_INFEASIBLE) from e
    except OracleUnavailableError as e:
        err_console.print(f"[red]✗[/red] Oracle unavailable: {escape(str(e))}")
        raise typer.Exit(EXIT_ORACLE) from e
    except (MonotoneCoverError, OSError, ValueError) as e:
        err_console.print(f"[red]✗[/red] {escape(str(e))}")
        raise typer.Exit(EXIT_INPUT) from e


def _clean(value: Any) -> Any:
    """Non-finite floats become strings so the output stays valid JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_clean(v) for v in value]
    return value


def _emit(report: dict[str, Any], as_json: bool, title: str) -> None:
    if as_json:
        typer.echo(json.dumps(_clean(report), indent=2))
        return
    table = Table(title=title, show_header=True)
    table.add_column("Field", style="cyan")
    table.add_column("Value")
    for key, value in report.items():
        shown = value if isinstance(value, str) else json.dumps(_clean(value))
        table.add_row(key, escape(shown))
    console.print(table)


def _ratio(cost: float, opt: float) -> float:
    if opt == 0:
        return 1.0 if cost == 0 else math.inf
    return cost / opt


# Global options
@app.callback()
def main(
    config_file: Path | None = CONFIG_FILE_OPTION,
    log_level: str | None = typer.Option(
        None, "--log-level", help="Logging level (defaults to Config.log_level)"
    ),
) -> None:
    """Greedy Δ-approximation for monotone covering problems."""
    if config_file:
        try:
            set_config(Config.from_toml(config_file))
        except (OSError, ValueError) as e:
            err_console.print(f"[red]✗[/red] Failed to load config: {escape(str(e))}")
            raise typer.Exit(EXIT_INPUT) from e
    configure_logging(log_level or get_config().log_level, err_console)


@app.command()
def version() -> None:
    """Show version information.

    Example:
        $ monocover version
    """
    console.print(f"[bold]monocover[/bold] version {__version__}")


@app.command("config")
def show_config(as_json: bool = JSON_OPTION) -> None:
    """Show the effective configuration.

    Example:
        $ MONOCOVER_EPSILON=1e-12 monocover config
    """
    _emit(get_config().to_dict(), as_json, "Configuration")


@app.command()
def schema(
    document: str | None = typer.Argument(None, help=f"Document type ({', '.join(DOCUMENT_TYPES)})"),
) -> None:
    """Print the JSON schema of an instance file type (all types by default).

    Example:
        $ monocover schema cmip
    """
    if document is not None and document not in DOCUMENT_TYPES:
        err_console.print(
            f"[red]✗[/red] unknown document type {escape(document)!r}; "
            f"expected one of {', '.join(DOCUMENT_TYPES)}"
        )
        raise typer.Exit(EXIT_INPUT)
    names = [document] if document else list(DOCUMENT_TYPES)
    schemas = {name: DOCUMENT_TYPES[name].model_json_schema() for name in names}
    typer.echo(json.dumps(schemas[document] if document else schemas, indent=2))


# solve


def _solve(
    problem: Problem, policy: str, order: ConstraintOrder, record: bool
) -> tuple[dict[str, Any], StepTrace | None]:
    """Run the solver matching the file kind."""
    if policy != "minimal" and problem.kind not in (ProblemKind.INSTANCE, ProblemKind.VERTEX_COVER):
        logger.warning("--policy only applies to generic instances; %s ignores it", problem.kind.value)
    match problem.kind:
        case ProblemKind.CMIP:
            res = solve_cmip(problem.require_instance(), record_trace=record)
            return res.to_dict(), res.trace
        case ProblemKind.TWO_STAGE:
            assert problem.two_stage is not None
            pres = solve_probabilistic_cmip(problem.two_stage)
            return {"delta": problem.two_stage.delta, **pres.to_dict()}, pres.trace
        case ProblemKind.FACILITY:
            assert problem.facility is not None
            fres = solve_facility_location(problem.facility)
            return {
                "cost": fres.cost,
                "delta": problem.facility.delta,
                "steps": len(fres.betas),
                "touches": fres.touches,
                "assignment_cost": fres.assignment_cost,
                "opened": fres.opened,
                "choice": fres.choice,
            }, None
        case ProblemKind.SET_COVER:
            assert problem.set_cover is not None
            sres = solve_set_cover(problem.set_cover)
            return {
                "cost": sres.cost,
                "delta": problem.set_cover.delta,
                "touches": sres.touches,
                "chosen": [str(c) for c in sres.chosen],
            }, None
        case ProblemKind.UPGRADABLE:
            assert problem.cache_model is not None
            ures = simulate_upgradable_caching(problem.requests, problem.cache_model)
            return ures.to_dict(), None
        case _:
            res_g = solve(problem.require_instance(), policies.create(policy), order)
            report = {
                "cost": res_g.mu_cost,
                "fractional_cost": res_g.cost,
                "delta": res_g.delta,
                "steps": res_g.steps,
                "x": res_g.x.tolist(),
                "mu": res_g.mu.tolist(),
            }
            return report, res_g.trace


def _upgradable_grid(model: CacheModel) -> list[tuple[float, ...]]:
    top = model.max_capacity - model.base if isinstance(model, CapacityThreshold) else 1
    step = min(model.prices) if isinstance(model, CapacityThreshold) else 1.0
    return spend_grid(model, max(1, top), step)


def _verify(problem: Problem, cost: float, delta: int, budget: int | None) -> dict[str, Any]:
    """Oracle optimum, ratio and (for covering instances) model audits.

    Raises:
        OracleUnavailableError: If the oracle exceeds its budget
        InfeasibleError: If the oracle finds no feasible solution
    """
    approximate = False
    match problem.kind:
        case ProblemKind.FACILITY:
            assert problem.facility is not None
            opt = facility_opt(problem.facility, budget).value
        case ProblemKind.TWO_STAGE:
            assert problem.two_stage is not None
            topt = two_stage_opt(problem.two_stage, max_states=budget)
            opt, approximate = topt.value, topt.approximate
        case ProblemKind.UPGRADABLE:
            assert problem.cache_model is not None
            grid = _upgradable_grid(problem.cache_model)
            opt = upgradable_opt(problem.requests, problem.cache_model, grid, max_states=budget)
            approximate = True
        case _:
            result = exact_opt(problem.require_instance(), budget=budget)
            if not result.feasible:
                raise InfeasibleError("the exact oracle found no feasible solution")
            opt, approximate = result.value, result.approximate
    ratio = _ratio(cost, opt)
    out: dict[str, Any] = {
        "opt": opt,
        "ratio": ratio,
        "approximate_oracle": approximate,
        "within_delta": ratio <= delta + 1e-9,
    }
    if problem.instance is not None:
        audits = [*audit_cost_model(problem.instance.cost), audit_constraint_monotonicity(problem.instance)]
        out["audits"] = {a.name: a.passed for a in audits}
    if not out["within_delta"]:
        logger.warning("ratio %.6g exceeds Δ=%d", ratio, delta)
    return out


def _randomized(
    problem: Problem,
    variant: Variant,
    trials: int | None,
    probability: float,
    seed: int | None,
    budget: int | None,
) -> dict[str, Any]:
    instance = problem.require_instance()
    seed = get_config().default_seed if seed is None else seed
    if trials is None:
        return run_randomized(instance, variant, probability=probability, seed=seed).to_dict()
    return montecarlo_ratio(
        instance, variant, trials, seed, probability=probability, budget=budget
    ).to_dict()


@app.command("solve")
def solve_cmd(
    file: Path = typer.Argument(..., help="Instance file (JSON, or a DIMACS graph)"),
    policy: str = typer.Option(
        "minimal", "--policy", "-p", help=f"Step size policy ({', '.join(policies.names)})"
    ),
    order: ConstraintOrder = typer.Option(
        ConstraintOrder.ROUND_ROBIN, "--order", help="Order in which unmet constraints are stepped"
    ),
    trace: Path | None = typer.Option(None, "--trace", help="Write the step trace as JSON"),
    verify: bool = typer.Option(
        False, "--verify", help="Compare with the exact oracle and audit the model"
    ),
    budget: int | None = typer.Option(None, "--budget", min=1, help="Oracle state budget"),
    variant: Variant | None = typer.Option(
        None, "--variant", help="Run a randomized variant instead of the deterministic greedy"
    ),
    trials: int | None = typer.Option(
        None, "--trials", min=1, help="Monte-Carlo trials for --variant (single run when omitted)"
    ),
    probability: float = typer.Option(
        1.0, "--probability", min=0.0, max=1.0, help="Raise probability p_j for --variant rstep"
    ),
    seed: int | None = SEED_OPTION,
    as_json: bool = JSON_OPTION,
) -> None:
    """Solve an instance file and report cost, Δ and step count.

    Exit codes: 0 on success, 1 on invalid input, 2 when the instance is
    infeasible, 3 when --verify cannot run the oracle within its budget.

    Example:
        $ monocover solve overlap.json --policy maximal --verify
        $ monocover solve triangle.json --variant stateless --trials 10000 --seed 7
    """
    with _exit_codes():
        if policy not in policies.names:
            raise ValueError(f"unknown policy {policy!r} (known: {', '.join(policies.names)})")
        problem = load_problem(file)
        header: dict[str, Any] = {"file": file.name, "kind": problem.kind.value, "name": problem.name}
        if variant is not None:
            body = _randomized(problem, variant, trials, probability, seed, budget)
            _emit({**header, **body}, as_json, "Randomized run")
            return
        report, run_trace = _solve(problem, policy, order, record=trace is not None)
        if trace is not None:
            if run_trace is None:
                logger.warning("%s solves do not record a step trace", problem.kind.value)
            else:
                trace.write_text(run_trace.to_json() + "\n", encoding="utf-8")
        report = {**header, **report}
        if verify:
            delta = int(report.get("delta") or 0)
            report.update(_verify(problem, float(report["cost"]), delta, budget))
    _emit(report, as_json, "Solve")


# online


def _paging(path: Path, k: int) -> dict[str, Any]:
    names, sizes, costs = file_inputs(parse_file_trace(path))
    unit = all(v == 1 for v in sizes.values()) and all(v == 1.0 for v in costs.values())
    report = simulate_paging(names, k) if unit else simulate_paging(names, k, sizes, costs)
    return {"requests": len(names), "bound": k, **report.to_dict()}


def _connection(path: Path, k: int, keep_last: bool) -> dict[str, Any]:
    pairs, costs = connection_inputs(parse_connection_trace(path))
    report = simulate_connection_caching(pairs, k, costs, keep_last=keep_last)
    opt = None
    if len(pairs) <= EXHAUSTIVE_TRACE_LIMIT:
        try:
            opt = connection_opt(pairs, k, costs, keep_last=keep_last)
        except OracleUnavailableError:
            logger.warning("connection optimum unavailable for %d requests", len(pairs))
    return {
        "requests": len(pairs),
        "bound": k if keep_last else k + 1,
        "opt": opt,
        "ratio": None if opt is None else _ratio(report.cost, opt),
        **report.to_dict(),
    }


def _upgradable(path: Path, k: int, d: int) -> dict[str, Any]:
    """Upgradable caching from a JSON scenario, or a file trace with a capacity template."""
    if path.suffix == ".json":
        problem = load_problem(path)
        if problem.cache_model is None:
            raise ValueError(f"{path.name} is a {problem.kind.value} file, not an upgradable scenario")
        model, requests = problem.cache_model, problem.requests
    else:
        requests, sizes, costs = file_inputs(parse_file_trace(path))
        model = CapacityThreshold(
            base=k, prices=(1.0,) * d, max_capacity=k + d, costs=costs, sizes=sizes
        )
    report = simulate_upgradable_caching(requests, model)
    if len(requests) <= EXHAUSTIVE_TRACE_LIMIT:
        try:
            report.opt = upgradable_opt(requests, model, _upgradable_grid(model))
        except OracleUnavailableError:
            logger.warning("upgradable optimum unavailable for %d requests", len(requests))
    return {"requests": len(requests), "bound": report.delta, **report.to_dict()}


def _segments(path: Path, k: int) -> dict[str, Any]:
    """Evict segments so every file of the trace fits a k-segment cache."""
    requests = parse_file_trace(path)
    files: dict[str, tuple[int, float]] = {}
    for r in requests:
        files.setdefault(r.file, (r.size, r.cost))
    names = list(files)
    sizes = [files[f][0] for f in names]
    costs = [[files[f][1]] * files[f][0] for f in names]
    plan = solve_segments(build_segment_constraints(sizes, k, costs))
    return {
        "files": len(names),
        "overflow": max(0, sum(sizes) - k),
        "cost": plan.cost,
        "evicted": {names[s]: segs for s, segs in sorted(plan.evicted.items())},
        "steps": [
            {"constraint": p.constraint_id, "evicted": {names[s]: v for s, v in p.evicted.items()}}
            for p in plan.steps
        ],
    }


@app.command("online")
def online_cmd(
    tracefile: Path = typer.Argument(..., help="Request trace (or an upgradable JSON scenario)"),
    problem: OnlineProblem = typer.Option(OnlineProblem.PAGING, "--problem", help="Online problem"),
    k: int = typer.Option(2, "--k", min=1, help="Cache size (per node for connection caching)"),
    d: int = typer.Option(1, "--d", min=1, help="Upgradable components for trace input"),
    keep_last: bool = typer.Option(
        True, "--keep-last/--no-keep-last", help="Never close the connection just requested"
    ),
    seed: int | None = SEED_OPTION,
    as_json: bool = JSON_OPTION,
) -> None:
    """Replay a request trace and report evictions, cost and the competitive ratio.

    Trace lines are ``t file size cost`` (paging, segments, upgradable) or
    ``t node_u node_w cost`` (connection). The replay is deterministic; the
    seed is recorded in the report.

    Example:
        $ monocover online requests.txt --problem paging --k 3
        $ monocover online links.txt --problem connection --k 1 --json
    """
    with _exit_codes():
        if not tracefile.is_file():
            raise FileNotFoundError(f"trace file not found: {tracefile}")
        match problem:
            case OnlineProblem.PAGING:
                body = _paging(tracefile, k)
            case OnlineProblem.CONNECTION:
                body = _connection(tracefile, k, keep_last)
            case OnlineProblem.UPGRADABLE:
                body = _upgradable(tracefile, k, d)
            case OnlineProblem.SEGMENTS:
                body = _segments(tracefile, k)
        seed = get_config().default_seed if seed is None else seed
        report = {"file": tracefile.name, "problem": problem.value, "k": k, "seed": seed, **body}
    _emit(report, as_json, f"Online {problem.value}")


# bench


def _bench_table(report: BenchReport, fit: CounterFit | None) -> None:
    table = Table(title="Benchmark", show_header=True)
    for column in ("Fixture", "Kind", "Cost", "Δ", "Steps", "Ops", "Ratio", "Seconds", "Status"):
        table.add_column(column, style="cyan" if column == "Fixture" else None)

    def fmt(v: float | int | None) -> str:
        return "-" if v is None else f"{v:.6g}" if isinstance(v, float) else str(v)

    for row in report.rows:
        status = "[green]✓[/green]" if row.ok else f"[red]✗[/red] {escape(row.error or 'check failed')}"
        table.add_row(
            escape(row.fixture),
            row.kind,
            fmt(row.cost),
            fmt(row.delta),
            fmt(row.steps),
            fmt(row.ops),
            fmt(row.ratio),
            f"{row.seconds:.4f}",
            status,
        )
    console.print(table)
    if fit is not None:
        verdict = "[green]linear[/green]" if fit.linear else "[red]super-linear[/red]"
        console.print(
            f"CMIP counters: C = {fit.constant:.3f}, slope = {fit.slope:.3f} "
            f"(limit {fit.limit}) {verdict}"
        )


@app.command("bench")
def bench_cmd(
    directory: Path = typer.Argument(..., help="Directory of fixture files"),
    repeat: int = typer.Option(1, "--repeat", min=1, help="Runs per fixture"),
    oracle: bool = typer.Option(False, "--oracle", help="Also compute OPT and ratios"),
    jobs: int = typer.Option(1, "--jobs", "-j", min=1, help="Fixtures run in parallel"),
    family: bool = typer.Option(
        False, "--family", help="Also fit operation counters over a generated CMIP family"
    ),
    sizes: list[int] | None = typer.Option(
        None, "--size", min=2, help="Family sizes n (repeatable; default 100, 1000, 10000)"
    ),
    seed: int | None = SEED_OPTION,
    as_json: bool = JSON_OPTION,
) -> None:
    """Run every fixture in a directory and report times, counters and ratios.

    Per-fixture failures are reported in the table and do not stop the run.

    Example:
        $ monocover bench tests/fixtures --repeat 3 --oracle
        $ monocover bench fixtures/ --family --size 100 --size 1000 --json
    """
    with _exit_codes():
        report = run_bench(directory, repeat, oracle=oracle, jobs=jobs)
        fit = None
        if family:
            seed = get_config().default_seed if seed is None else seed
            fit = counter_regression(sizes or (100, 1_000, 10_000), seed)
    if as_json:
        out: dict[str, Any] = report.to_dict()
        if fit is not None:
            out["counters"] = fit.to_dict()
        typer.echo(json.dumps(_clean(out), indent=2))
        return
    _bench_table(report, fit)


if __name__ == "__main__":
    app()
