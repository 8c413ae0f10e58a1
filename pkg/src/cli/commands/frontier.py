"""`frontier`: explore the Pareto frontier and summarise its coverage."""

import argparse
from typing import Literal

import numpy as np
import structlog
from pydantic import BaseModel

from src.cli.common import (
    EXIT_OK,
    add_problem_arguments,
    add_training_arguments,
    bound_pair,
    broadcast,
    load_problem,
    metric_bounds,
    positive_float_list,
    positive_int,
    resolve_path,
    train_config,
)
from src.core.config import settings
from src.core.models import FrontierArchive, MetricBounds
from src.core.repositories import ArchiveRepository, write_json
from src.optim.baselines import grid_search, static_scaling_posterior
from src.optim.indicators import coverage_span, hypervolume
from src.optim.mgda import TrainConfig
from src.optim.posterior import ExploreConfig, archive_granularity, explore_frontier
from src.problems.base import Problem

logger = structlog.get_logger()

Method = Literal["mgda", "static", "grid"]


class FrontierSummary(BaseModel):
    """Summary written next to the archive CSV."""

    problem: str
    method: Method
    metric_names: list[str]
    runs: int
    max_rounds: int
    converged: bool
    granularity: list[float]
    granularity_target: list[float]
    bounds_lo: list[float]
    bounds_hi: list[float]
    coverage_span: list[float]
    hypervolume: float
    grid_coverage_span: list[float] | None = None
    # Explorer span over grid-search span per metric, under an equal number of runs.
    coverage_ratio: list[float | None] | None = None


def register(subparsers: argparse._SubParsersAction) -> None:  # type: ignore[type-arg]
    parser = subparsers.add_parser("frontier", help="explore the Pareto frontier")
    add_problem_arguments(parser)
    add_training_arguments(parser)
    parser.add_argument("--method", choices=["mgda", "static", "grid"], default="mgda")
    parser.add_argument("--phi", type=positive_float_list, default=[0.05], help="granularity targets, e.g. 0.1,0.1")
    parser.add_argument("--pace", type=float, default=settings.pace)
    parser.add_argument(
        "--bounds", type=bound_pair, nargs="+", help="lo,hi per metric (one pair applies to all)"
    )
    parser.add_argument("--max-rounds", type=positive_int, default=None)
    parser.add_argument("--resolution", type=positive_int, default=None, help="grid resolution")
    parser.add_argument("--jobs", type=positive_int, default=settings.jobs)
    parser.add_argument(
        "--compare-grid",
        action="store_true",
        help="also run grid search with the same number of runs and report the coverage ratio",
    )
    parser.add_argument("--out", required=True, help="archive CSV; the summary goes to <out>.json")
    parser.set_defaults(handler=run)


def _grid_resolution(args: argparse.Namespace) -> int:
    return int(args.resolution or args.max_rounds or settings.grid_resolution)


def _explore(
    args: argparse.Namespace, problem: Problem, cfg: ExploreConfig, train_cfg: TrainConfig
) -> FrontierArchive:
    if args.method == "grid":
        return grid_search(problem, _grid_resolution(args), train_cfg, jobs=args.jobs)
    if args.method == "static":
        return static_scaling_posterior(problem, cfg, train_cfg)
    return explore_frontier(problem, cfg, train_cfg)


def _ratio(ours: np.ndarray, theirs: np.ndarray) -> list[float | None]:
    return [float(a / b) if b > 0 else None for a, b in zip(ours, theirs, strict=True)]


def summarize(
    args: argparse.Namespace,
    problem: Problem,
    archive: FrontierArchive,
    cfg: ExploreConfig,
    grid: FrontierArchive | None = None,
) -> FrontierSummary:
    bounds: MetricBounds = cfg.bounds
    points = archive.metric_matrix()
    grains = archive_granularity(archive, bounds)
    span = coverage_span(points, bounds)
    grid_span = coverage_span(grid.metric_matrix(), bounds) if grid is not None else None
    return FrontierSummary(
        problem=args.problem,
        method=args.method,
        metric_names=list(problem.metric_names),
        runs=len(archive),
        max_rounds=cfg.max_rounds,
        converged=bool(np.all(grains <= cfg.granularity_target)),
        granularity=grains.tolist(),
        granularity_target=cfg.granularity_target.tolist(),
        bounds_lo=bounds.lo.tolist(),
        bounds_hi=bounds.hi.tolist(),
        coverage_span=span.tolist(),
        hypervolume=hypervolume(points, bounds, problem.higher_is_better),
        grid_coverage_span=None if grid_span is None else grid_span.tolist(),
        coverage_ratio=None if grid_span is None else _ratio(span, grid_span),
    )


def run(args: argparse.Namespace) -> int:
    problem = load_problem(args)
    n = problem.n_objectives
    cfg = ExploreConfig(
        bounds=metric_bounds(args.bounds, n),
        granularity_target=broadcast(args.phi, n, "--phi"),
        pace=args.pace,
        max_rounds=args.max_rounds or settings.max_rounds,
    )
    train_cfg = train_config(args, problem)
    log = logger.bind(method=args.method, problem=args.problem)
    log.info("frontier started")

    archive = _explore(args, problem, cfg, train_cfg)
    grid = None
    if args.compare_grid and args.method != "grid":
        grid = grid_search(problem, max(len(archive), 2), train_cfg, jobs=args.jobs)

    out = resolve_path(args.out)
    ArchiveRepository(out).save(archive)
    summary = summarize(args, problem, archive, cfg, grid)
    write_json(summary, out.with_suffix(".json"))
    log.info("frontier complete", runs=summary.runs, converged=summary.converged)
    return EXIT_OK
