"""A-posteriori frontier exploration driven by metric-space granularity.

Each round trains once under the current preference weights, memorises the resulting
(W, M) pair and picks new weights aimed at the widest unexplored gap of the metric
whose coverage is coarsest. Exploration ends once every metric is covered to its
granularity target or the round limit is reached.
"""

import numpy as np
import structlog
from pydantic import Field, model_validator

from src.core.config import settings
from src.core.exceptions import ContractViolationError, DivergenceError
from src.core.models import ArrayModel, FrontierArchive, MetricBounds, PreferenceWeights, Vector
from src.optim.indicators import LEVEL_TOL, bounded_levels
from src.optim.mgda import Optimizer, TrainConfig, optimize
from src.problems.base import Problem

logger = structlog.get_logger()

GAP_TIE_TOL = 1e-12
WEIGHT_MIN, WEIGHT_MAX = 1e-6, 1e6


class ExploreConfig(ArrayModel):
    """Knowledge box, granularity targets and search pace of an exploration."""

    bounds: MetricBounds
    granularity_target: Vector
    pace: float = Field(default_factory=lambda: settings.pace, gt=1.0)
    max_rounds: int = Field(default_factory=lambda: settings.max_rounds, ge=1)

    @model_validator(mode="after")
    def _check(self) -> "ExploreConfig":
        if len(self.granularity_target) != len(self.bounds):
            raise ValueError("granularity_target and bounds must have the same length")
        if np.any(self.granularity_target <= 0):
            raise ValueError("granularity targets must be positive")
        return self


def granularity(points: np.ndarray, lo: float, hi: float) -> float:
    """Mean gap between adjacent elements of {lo} + points + {hi}, points clipped and deduplicated."""
    if not lo < hi:
        raise ContractViolationError(f"granularity needs lo < hi, got {lo}, {hi}")
    values = bounded_levels(points, lo, hi)
    return (hi - lo) / (len(values) - 1)


def archive_granularity(archive: FrontierArchive, bounds: MetricBounds) -> np.ndarray:
    """Granularity of every metric over the archived points."""
    metrics = archive.metric_matrix()
    if metrics.shape[1] != len(bounds):
        raise ContractViolationError(
            f"archive holds {metrics.shape[1]} metrics, bounds cover {len(bounds)}"
        )
    return np.array(
        [granularity(metrics[:, t], bounds.lo[t], bounds.hi[t]) for t in range(len(bounds))]
    )


def reweighting1(archive: FrontierArchive, cfg: ExploreConfig) -> PreferenceWeights | None:
    """Next preference weights, or None once every granularity target is met."""
    if len(archive) == 0:
        raise ContractViolationError("reweighting needs at least one archived point")
    grains = archive_granularity(archive, cfg.bounds)
    if np.all(grains <= cfg.granularity_target):
        return None

    t_hat = int(np.argmax(grains))
    lo, hi = float(cfg.bounds.lo[t_hat]), float(cfg.bounds.hi[t_hat])
    column = np.clip(archive.metric_matrix()[:, t_hat], lo, hi)
    weights = archive.weight_matrix()
    values = bounded_levels(column, lo, hi)
    gaps = np.diff(values)
    # Ties go to the gap with the smaller left endpoint.
    i = int(np.flatnonzero(gaps >= gaps.max() - GAP_TIE_TOL)[0])
    left, right = values[i], values[i + 1]

    def reached(value: float) -> bool:
        return bool(np.any(np.abs(column - value) <= LEVEL_TOL))

    def owner(value: float) -> np.ndarray:
        # First archived entry at value.
        return weights[int(np.argmin(np.abs(column - value)))].copy()

    # A bound some archived point was clipped onto counts as that point.
    if reached(left) and reached(right):
        w = (owner(left) + owner(right)) / 2.0
    elif reached(right):
        w = owner(right)
        w[t_hat] /= cfg.pace
    else:
        w = owner(left)
        w[t_hat] *= cfg.pace
    return PreferenceWeights(w=np.clip(w, WEIGHT_MIN, WEIGHT_MAX))


def explore_frontier(
    problem: Problem,
    cfg: ExploreConfig,
    train_cfg: TrainConfig,
    optimizer: Optimizer = optimize,
) -> FrontierArchive:
    """Explore the frontier, returning every (W, M) pair in production order.

    A DivergenceError raised by the optimizer carries the archive built so far.
    """
    if len(cfg.bounds) != problem.n_objectives:
        raise ContractViolationError(
            f"bounds cover {len(cfg.bounds)} metrics, problem has {problem.n_objectives}"
        )
    archive = FrontierArchive()
    w = PreferenceWeights.uniform(problem.n_objectives)
    init_params = None
    log = logger.bind(pace=cfg.pace, max_rounds=cfg.max_rounds)
    log.info("Starting frontier exploration")

    for round_ in range(1, cfg.max_rounds + 1):
        try:
            metrics, trace = optimizer(problem, w, train_cfg, init_params=init_params)
        except DivergenceError as e:
            e.archive = archive
            raise
        archive.add(w, metrics)
        if train_cfg.warm_start:
            init_params = trace.final_params
        next_w = reweighting1(archive, cfg)
        log.info(
            "Exploration round",
            round=round_,
            weights=w.w.tolist(),
            metrics=metrics.metrics.tolist(),
            granularity=archive_granularity(archive, cfg.bounds).tolist(),
        )
        if next_w is None:
            break
        w = next_w

    log.info("Frontier exploration complete", rounds=len(archive))
    return archive
