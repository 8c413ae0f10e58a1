"""Arguments and helpers shared by the subcommands."""

import argparse
from pathlib import Path

import numpy as np

from src.core.config import settings
from src.core.models import MetricBounds
from src.optim.mgda import TrainConfig
from src.problems.base import Problem
from src.problems.registry import get_problem

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_UNSATISFIED = 2


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from e
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from e
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {value}")
    return value


def float_list(text: str) -> list[float]:
    """Comma-separated numbers, e.g. `0.1,0.1`."""
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def positive_float_list(text: str) -> list[float]:
    values = float_list(text)
    if not values or any(not v > 0 for v in values):
        raise argparse.ArgumentTypeError(f"expected positive numbers, got {text!r}")
    return values


def bound_pair(text: str) -> tuple[float, float]:
    """`lo,hi` for one metric."""
    values = float_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected lo,hi, got {text!r}")
    return values[0], values[1]


def resolve_path(path: Path) -> Path:
    """Relative paths live under the configured data directory."""
    path = Path(path)
    return path if path.is_absolute() else settings.data_dir / path


def broadcast(values: list[float], n: int, name: str) -> np.ndarray:
    """One value per metric, or a single value for all of them."""
    if len(values) == 1:
        return np.full(n, values[0])
    if len(values) != n:
        raise argparse.ArgumentTypeError(f"{name} needs 1 or {n} values, got {len(values)}")
    return np.array(values)


def metric_bounds(pairs: list[tuple[float, float]] | None, n: int) -> MetricBounds:
    if not pairs:
        return MetricBounds.unit(n)
    if len(pairs) == 1:
        pairs = pairs * n
    if len(pairs) != n:
        raise argparse.ArgumentTypeError(f"--bounds needs 1 or {n} pairs, got {len(pairs)}")
    return MetricBounds(lo=[p[0] for p in pairs], hi=[p[1] for p in pairs])


def add_problem_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("problem")
    group.add_argument("--problem", choices=["forecast", "quadratic", "concave"], default="forecast")
    group.add_argument("--data", type=Path, help="demand CSV (forecast problem)")
    group.add_argument("--model", choices=["linear", "feedforward"], default="linear")
    group.add_argument("--k", type=positive_int, default=26, help="input weeks per window")
    group.add_argument("--g", type=positive_int, default=26, help="forecast horizon in weeks")


def add_training_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("training")
    group.add_argument("--lr", type=positive_float, help="learning rate (default: problem-specific)")
    group.add_argument("--steps", type=positive_int, default=None, help="step limit per run")
    group.add_argument("--patience", type=positive_int, default=None)
    group.add_argument("--seed", type=int, default=None)
    group.add_argument("--batch-size", type=positive_int, default=None)
    group.add_argument("--warm-start", action="store_true")
    group.add_argument(
        "--balance-gradients",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="rescale gradients to a common norm (default: problem-specific)",
    )


def load_problem(args: argparse.Namespace) -> Problem:
    data = resolve_path(args.data) if args.data is not None else None
    return get_problem(args.problem, data=data, k=args.k, g=args.g, model=args.model)


def train_config(args: argparse.Namespace, problem: Problem) -> TrainConfig:
    options: dict[str, object] = {
        "learning_rate": args.lr or problem.default_learning_rate or settings.learning_rate,
        "warm_start": args.warm_start,
        "batch_size": args.batch_size,
        "balance_gradients": (
            problem.balance_gradients if args.balance_gradients is None else args.balance_gradients
        ),
    }
    if args.steps is not None:
        options["max_steps"] = args.steps
    if args.patience is not None:
        options["patience"] = args.patience
    if args.seed is not None:
        options["seed"] = args.seed
    return TrainConfig(**options)
