"""`prefer`: find one solution satisfying hard metric constraints."""

import argparse

import structlog
from pydantic import BaseModel

from src.cli.common import (
    EXIT_OK,
    EXIT_UNSATISFIED,
    add_problem_arguments,
    add_training_arguments,
    load_problem,
    positive_float,
    positive_int,
    resolve_path,
    train_config,
)
from src.core.config import settings
from src.core.repositories import write_json
from src.optim.baselines import static_scaling_prior
from src.optim.constraints import parse_constraints
from src.optim.prior import PriorConfig, solve_preferred

logger = structlog.get_logger()


class PreferenceRecord(BaseModel):
    """Single-solution record written by `prefer`."""

    problem: str
    method: str
    constraints: str
    metric_names: list[str]
    metrics: list[float]
    weights: list[float]
    satisfied: bool
    subset_index: int | None
    rounds: int
    optimize_calls: int


def register(subparsers: argparse._SubParsersAction) -> None:  # type: ignore[type-arg]
    parser = subparsers.add_parser("prefer", help="solve for constraint-satisfying metrics")
    add_problem_arguments(parser)
    add_training_arguments(parser)
    parser.add_argument(
        "--constraints",
        required=True,
        help="e.g. 'sl>=0.95 acc>=0.5|acc==0.3' or 'm1in[0.2,0.4]'",
    )
    parser.add_argument("--method", choices=["mgda", "static"], default="mgda")
    parser.add_argument("--pace", type=float, default=settings.pace)
    parser.add_argument("--max-rounds", type=positive_int, default=settings.max_rounds_per_subset, help="rounds per subset")
    parser.add_argument("--eq-tol", type=positive_float, default=settings.eq_tol)
    parser.add_argument("--out", required=True, help="result JSON")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    problem = load_problem(args)
    constraints = parse_constraints(args.constraints, problem.metric_names)
    cfg = PriorConfig(pace=args.pace, max_rounds_per_subset=args.max_rounds, eq_tol=args.eq_tol)
    train_cfg = train_config(args, problem)
    log = logger.bind(method=args.method, constraints=args.constraints)
    log.info("prefer started")

    solve = static_scaling_prior if args.method == "static" else solve_preferred
    result = solve(problem, constraints, train_cfg, cfg)

    record = PreferenceRecord(
        problem=args.problem,
        method=args.method,
        constraints=args.constraints,
        metric_names=list(problem.metric_names),
        metrics=result.metrics.metrics.tolist(),
        weights=result.weights.w.tolist(),
        satisfied=result.satisfied,
        subset_index=result.subset_index,
        rounds=result.rounds,
        optimize_calls=result.optimize_calls,
    )
    write_json(record, resolve_path(args.out))
    log.info("prefer complete", satisfied=result.satisfied, rounds=result.rounds)
    return EXIT_OK if result.satisfied else EXIT_UNSATISFIED
