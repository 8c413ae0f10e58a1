"""Demand forecasting as a two-objective problem: MSE/ACC and QRL/SL."""

from typing import Literal

import numpy as np
import structlog

from src.core.exceptions import ContractViolationError
from src.forecasting.datagen import DemandPanel, SeriesBatch, make_windows
from src.forecasting.models import (
    ForecastModel,
    LossMetricBinding,
    ModelSpec,
    forward,
    objective_gradients,
    objective_losses,
)
from src.problems.base import Problem

logger = structlog.get_logger()


def standardize(train: SeriesBatch, *others: SeriesBatch) -> list[SeriesBatch]:
    """Scale every feature with the training split's mean and standard deviation."""
    mean = train.inputs.mean(axis=(0, 1))
    std = train.inputs.std(axis=(0, 1))
    std = np.where(std > 0, std, 1.0)
    return [
        SeriesBatch(inputs=(batch.inputs - mean) / std, targets=batch.targets)
        for batch in (train, *others)
    ]


class ForecastProblem(Problem):
    """Train on the training windows, monitor metrics on the validation windows."""

    def __init__(
        self,
        panel: DemandPanel,
        k: int = 26,
        g: int = 26,
        kind: Literal["linear", "feedforward"] = "linear",
        hidden: int = 16,
        binding: LossMetricBinding | None = None,
        stride: int = 1,
    ) -> None:
        if panel.n_series == 0:
            raise ContractViolationError("demand panel is empty")
        train = make_windows(panel, k, g, "train", stride=stride)
        validation = make_windows(panel, k, g, "validation", stride=stride)
        self.train, self.validation = standardize(train, validation)
        self.binding = binding or LossMetricBinding()
        self.model = ForecastModel(
            ModelSpec(kind=kind, input_dim=k * len(panel.feature_names), output_dim=g, hidden=hidden)
        )
        self.metric_names = self.binding.metric_names
        self.higher_is_better = (True, True)
        # The MSE gradient outweighs the pinball one by orders of magnitude.
        self.balance_gradients = True
        # Each standardised input column has unit second moment, so the MSE Hessian's
        # largest eigenvalue is at most 2 (input_dim + 1).
        self.default_learning_rate = 1.0 / (2.0 * (self.model.spec.input_dim + 1))
        logger.debug(
            "Built forecast problem",
            train_windows=len(self.train),
            validation_windows=len(self.validation),
            n_params=self.model.n_params,
        )

    @property
    def n_params(self) -> int:
        return self.model.n_params

    def initial_params(self, seed: int) -> np.ndarray:
        # Forecasts start near zero, below every series.
        return self.model.init_params(seed)

    def _batch(self, indices: np.ndarray | None) -> SeriesBatch:
        if indices is None:
            return self.train
        return SeriesBatch(inputs=self.train.inputs[indices], targets=self.train.targets[indices])

    def losses(self, theta: np.ndarray, indices: np.ndarray | None = None) -> np.ndarray:
        return objective_losses(self.model, theta, self._batch(indices), self.binding)

    def gradients(self, theta: np.ndarray, indices: np.ndarray | None = None) -> np.ndarray:
        return objective_gradients(self.model, theta, self._batch(indices), self.binding).grads

    def metrics(self, theta: np.ndarray) -> np.ndarray:
        return self.binding.metrics(self.validation.targets, forward(self.model, theta, self.validation))

    def sample_indices(self, rng: np.random.Generator, size: int) -> np.ndarray | None:
        n = len(self.train)
        return np.sort(rng.choice(n, size=min(size, n), replace=False))
