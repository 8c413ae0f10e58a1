"""Comparison baselines built on fixed linear scalarisations of the losses."""

import itertools
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import structlog

from src.core.config import settings
from src.core.exceptions import ContractViolationError
from src.core.models import FrontierArchive, MetricVector, PreferenceWeights, TrainTrace
from src.optim.mgda import Combiner, TrainConfig, descend
from src.optim.posterior import ExploreConfig, explore_frontier
from src.optim.prior import ConstraintSet, PreferenceResult, PriorConfig, solve_preferred
from src.problems.base import Problem

logger = structlog.get_logger()


def _static_combiner(c: np.ndarray) -> Combiner:
    def combine(grads: np.ndarray) -> tuple[np.ndarray, float]:
        direction = c @ grads
        return c, float(direction @ direction)

    return combine


def static_scaling_optimize(
    problem: Problem,
    c: np.ndarray,
    cfg: TrainConfig,
    init_params: np.ndarray | None = None,
) -> tuple[MetricVector, TrainTrace]:
    """Gradient descent on sum_t c_t L_t under the same stopping rules as MGDA."""
    c = np.asarray(c, dtype=float)
    if c.shape != (problem.n_objectives,):
        raise ContractViolationError(f"{c.shape} coefficients for {problem.n_objectives} objectives")
    if np.any(c < 0) or np.any(c > 1) or abs(float(c.sum()) - 1.0) > 1e-9:
        raise ContractViolationError(f"coefficients must be convex, got {c.tolist()}")
    metrics, trace = descend(problem, _static_combiner(c), cfg, init_params)
    logger.info(
        "Static scaling run complete",
        coefficients=c.tolist(),
        steps=len(trace),
        stop_reason=trace.stop_reason,
        metrics=metrics.metrics.tolist(),
    )
    return metrics, trace


def static_scaling_optimizer(
    problem: Problem,
    w: PreferenceWeights,
    cfg: TrainConfig,
    init_params: np.ndarray | None = None,
) -> tuple[MetricVector, TrainTrace]:
    """Optimizer adapter: the normalised preference weights become the coefficients."""
    return static_scaling_optimize(problem, w.w / w.w.sum(), cfg, init_params)


def static_scaling_posterior(
    problem: Problem, cfg: ExploreConfig, train_cfg: TrainConfig
) -> FrontierArchive:
    return explore_frontier(problem, cfg, train_cfg, optimizer=static_scaling_optimizer)


def static_scaling_prior(
    problem: Problem,
    c: ConstraintSet,
    train_cfg: TrainConfig,
    cfg: PriorConfig | None = None,
) -> PreferenceResult:
    return solve_preferred(problem, c, train_cfg, cfg, optimizer=static_scaling_optimizer)


def simplex_grid(n_objectives: int, resolution: int) -> np.ndarray:
    """Points of the simplex with coordinates in steps of 1 / (resolution - 1).

    For two objectives there are exactly `resolution` points, ordered by c_1.
    """
    if resolution < 2:
        raise ContractViolationError(f"resolution must be >= 2, got {resolution}")
    steps = resolution - 1
    points = [
        (*head, steps - sum(head))
        for head in itertools.product(range(steps + 1), repeat=n_objectives - 1)
        if sum(head) <= steps
    ]
    return np.array(points, dtype=float).reshape(-1, n_objectives) / steps


def grid_search(
    problem: Problem,
    resolution: int,
    train_cfg: TrainConfig,
    jobs: int | None = None,
) -> FrontierArchive:
    """Train once per simplex grid point and archive (c, M) in grid order.

    Runs are independent, so they are spread over `jobs` worker threads.
    """
    grid = simplex_grid(problem.n_objectives, resolution)
    jobs = settings.jobs if jobs is None else jobs
    if jobs < 1:
        raise ContractViolationError(f"jobs must be >= 1, got {jobs}")
    logger.info("Starting grid search", runs=len(grid), jobs=jobs)

    def run(c: np.ndarray) -> MetricVector:
        return static_scaling_optimize(problem, c, train_cfg)[0]

    if jobs == 1:
        results = [run(c) for c in grid]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, grid))

    archive = FrontierArchive()
    for c, metrics in zip(grid, results, strict=True):
        archive.add(c, metrics)
    return archive
