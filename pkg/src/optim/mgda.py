"""MGDA training loop: per-objective gradients, min-norm weights, preference bias, step."""

from collections.abc import Callable
from typing import Protocol

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field

from src.core.config import settings
from src.core.exceptions import ContractViolationError, DivergenceError
from src.core.models import (
    GradientSet,
    MetricVector,
    ParamVector,
    PreferenceWeights,
    SimplexWeights,
    StepRecord,
    TrainTrace,
)
from src.optim.minnorm import frank_wolfe_solve
from src.problems.base import Problem

logger = structlog.get_logger()

# Maps a (T, d) gradient array to the simplex weights to step with and the squared
# norm used for the stationarity test.
Combiner = Callable[[np.ndarray], tuple[np.ndarray, float]]


class TrainConfig(BaseModel):
    """Settings of one optimize run.

    `learning_rate` is the step size of the parameter update. It is unrelated to the
    pace used by the preference searches.
    """

    model_config = ConfigDict(frozen=True)

    learning_rate: float = Field(default_factory=lambda: settings.learning_rate, gt=0)
    max_steps: int = Field(default_factory=lambda: settings.max_steps, ge=1)
    patience: int = Field(default_factory=lambda: settings.patience, ge=1)
    stationarity_tol: float = Field(default_factory=lambda: settings.stationarity_tol, ge=0)
    min_delta: float = Field(default=0.0, ge=0)
    seed: int = Field(default_factory=lambda: settings.seed)
    warm_start: bool = False
    batch_size: int | None = Field(default=None, ge=1)
    fw_max_iters: int = Field(default_factory=lambda: settings.fw_max_iters, ge=1)
    fw_gamma_tol: float = Field(default_factory=lambda: settings.fw_gamma_tol, gt=0)
    # Rescale every objective's gradient to the mean gradient norm before combining.
    balance_gradients: bool = False


class Optimizer(Protocol):
    """Signature shared by `optimize` and the static-scaling baseline."""

    def __call__(
        self,
        problem: Problem,
        w: PreferenceWeights,
        cfg: TrainConfig,
        init_params: np.ndarray | None = None,
    ) -> tuple[MetricVector, TrainTrace]: ...


def reweight_alpha(alpha: SimplexWeights, w: PreferenceWeights) -> SimplexWeights:
    """Bias alpha by the preference weights: alpha_t w_t / sum_s alpha_s w_s."""
    if len(alpha) != len(w):
        raise ContractViolationError(f"alpha has {len(alpha)} entries, weights {len(w)}")
    if np.all(w.w == w.w[0]):
        return alpha
    products = alpha.alpha * w.w
    total = float(products.sum())
    if total <= 0:
        raise ContractViolationError("alpha * w sums to zero; cannot normalize")
    return SimplexWeights(alpha=products / total)


def mgda_step(
    theta: ParamVector,
    g: GradientSet,
    alpha: SimplexWeights,
    lr: float,
    step: int = 0,
) -> ParamVector:
    """theta - lr * sum_t alpha_t g_t."""
    if g.dim != len(theta) or g.n_objectives != len(alpha):
        raise ContractViolationError(
            f"shape mismatch: theta {len(theta)}, gradients {g.grads.shape}, alpha {len(alpha)}"
        )
    updated = theta.values - lr * (alpha.alpha @ g.grads)
    if not np.all(np.isfinite(updated)):
        raise DivergenceError("parameter update is not finite", step=step)
    return ParamVector(values=updated)


def balance_gradients(grads: np.ndarray) -> np.ndarray:
    """Scale each row to the mean row norm; zero rows stay zero.

    Keeps one objective's loss scale from pinning the min-norm weights to a vertex.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        norms = np.linalg.norm(grads, axis=1)
        mean_norm = float(norms.mean())
        scale = np.divide(mean_norm, norms, out=np.zeros_like(norms), where=norms > 0)
        return grads * scale[:, None]


def mgda_combiner(w: PreferenceWeights, cfg: TrainConfig) -> Combiner:
    """Frank-Wolfe min-norm weights, reweighted by the preference weights."""

    def combine(grads: np.ndarray) -> tuple[np.ndarray, float]:
        result = frank_wolfe_solve(
            GradientSet(grads=grads), max_iters=cfg.fw_max_iters, gamma_tol=cfg.fw_gamma_tol
        )
        return reweight_alpha(result.alpha, w).alpha, result.sq_norm

    return combine


def descend(
    problem: Problem,
    combine: Combiner,
    cfg: TrainConfig,
    init_params: np.ndarray | None = None,
) -> tuple[MetricVector, TrainTrace]:
    """Shared descent loop with the stop-improving, stationarity and step-limit rules.

    Losses, alpha and sq_norm of each record are taken at the parameters the gradients
    were evaluated at; metrics are evaluated after the step. A DivergenceError leaves
    with the failing step and the trace recorded before it.
    """
    if cfg.warm_start and init_params is not None:
        theta = np.array(init_params, dtype=float)
    else:
        theta = problem.initial_params(cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    sign = np.array([1.0 if up else -1.0 for up in problem.higher_is_better])
    best = sign * problem.metrics(theta)
    since_improvement = 0
    trace = TrainTrace()
    stop_reason = "max_steps"

    for step in range(1, cfg.max_steps + 1):
        indices = problem.sample_indices(rng, cfg.batch_size) if cfg.batch_size else None
        try:
            grads = problem.gradients(theta, indices)
            if cfg.balance_gradients:
                grads = balance_gradients(grads)
            if not np.all(np.isfinite(grads)):
                raise DivergenceError("gradient is not finite", step=step)
            losses = problem.losses(theta, indices)
            alpha, sq_norm = combine(grads)
            if sq_norm <= cfg.stationarity_tol:
                stop_reason = "stationary"
                break
            theta = mgda_step(
                ParamVector(values=theta),
                GradientSet(grads=grads),
                SimplexWeights(alpha=alpha),
                cfg.learning_rate,
                step=step,
            ).values
            metrics = problem.metrics(theta)
            if not np.all(np.isfinite(metrics)):
                raise DivergenceError("metrics are not finite", step=step)
        except DivergenceError as e:
            e.step = step
            e.trace = trace
            raise
        trace.records.append(
            StepRecord(step=step, losses=losses, metrics=metrics, alpha=alpha, sq_norm=sq_norm)
        )
        signed = sign * metrics
        if np.any(signed > best + cfg.min_delta):
            since_improvement = 0
        else:
            since_improvement += 1
        best = np.maximum(best, signed)
        if since_improvement >= cfg.patience:
            stop_reason = "stopped_improving"
            break

    trace.final_params = theta
    trace.stop_reason = stop_reason
    return MetricVector(metrics=problem.metrics(theta)), trace


def optimize(
    problem: Problem,
    w: PreferenceWeights,
    cfg: TrainConfig,
    init_params: np.ndarray | None = None,
) -> tuple[MetricVector, TrainTrace]:
    """Train with MGDA under preference weights `w` until metrics stop improving,
    the min-norm direction vanishes, or the step limit is hit."""
    if len(w) != problem.n_objectives:
        raise ContractViolationError(
            f"{len(w)} preference weights for {problem.n_objectives} objectives"
        )
    log = logger.bind(weights=w.w.tolist(), n_params=problem.n_params)
    log.debug("Starting MGDA run")
    metrics, trace = descend(problem, mgda_combiner(w, cfg), cfg, init_params)
    log.info(
        "MGDA run complete",
        steps=len(trace),
        stop_reason=trace.stop_reason,
        metrics=metrics.metrics.tolist(),
    )
    return metrics, trace
