"""`train`: one optimize run under fixed preference weights."""

import argparse

import structlog

from src.cli.common import (
    EXIT_OK,
    add_problem_arguments,
    add_training_arguments,
    broadcast,
    load_problem,
    positive_float_list,
    resolve_path,
    train_config,
)
from src.core.models import PreferenceWeights
from src.core.repositories import TraceRepository
from src.optim.mgda import optimize

logger = structlog.get_logger()


def register(subparsers: argparse._SubParsersAction) -> None:  # type: ignore[type-arg]
    parser = subparsers.add_parser("train", help="train once with fixed preference weights")
    add_problem_arguments(parser)
    add_training_arguments(parser)
    parser.add_argument("--weights", type=positive_float_list, default=[1.0], help="e.g. 1,1 (scale-free)")
    parser.add_argument("--trace-out", required=True, help="trace CSV")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    problem = load_problem(args)
    raw = broadcast(args.weights, problem.n_objectives, "--weights")
    weights = PreferenceWeights(w=raw / raw.sum())
    train_cfg = train_config(args, problem)

    metrics, trace = optimize(problem, weights, train_cfg)
    path = resolve_path(args.trace_out)
    TraceRepository(path).save(trace)

    values = " ".join(
        f"{name}={value:.6f}" for name, value in zip(problem.metric_names, metrics.metrics, strict=True)
    )
    print(f"{len(trace)} steps ({trace.stop_reason}); {values}")
    logger.info("train complete", path=str(path), steps=len(trace))
    return EXIT_OK
