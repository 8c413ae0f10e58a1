"""Problem abstraction consumed by the optimizers."""

from abc import ABC, abstractmethod

import numpy as np


class Problem(ABC):
    """A differentiable multi-objective problem with metrics the decision maker reads.

    Implementations are read-only during optimisation, so one instance can serve
    concurrent optimize calls that each own their parameter vector.
    """

    #: Display names of the metrics, one per objective. Used as constraint aliases.
    metric_names: tuple[str, ...] = ()
    #: Whether a larger value of each metric is better.
    higher_is_better: tuple[bool, ...] = ()
    #: Step size suited to the problem; None defers to the configured default.
    default_learning_rate: float | None = None
    #: Whether the objectives' gradients differ enough in scale to need balancing.
    balance_gradients: bool = False

    @property
    def n_objectives(self) -> int:
        return len(self.metric_names)

    @property
    @abstractmethod
    def n_params(self) -> int:
        """Length of the parameter vector."""
        pass

    @abstractmethod
    def initial_params(self, seed: int) -> np.ndarray:
        """Deterministic starting point for a given seed."""
        pass

    @abstractmethod
    def losses(self, theta: np.ndarray, indices: np.ndarray | None = None) -> np.ndarray:
        """Empirical losses, one per objective."""
        pass

    @abstractmethod
    def gradients(self, theta: np.ndarray, indices: np.ndarray | None = None) -> np.ndarray:
        """(T, d) array of loss gradients, rows ordered like the objectives."""
        pass

    @abstractmethod
    def metrics(self, theta: np.ndarray) -> np.ndarray:
        """Metric values on the evaluation data."""
        pass

    def sample_indices(self, rng: np.random.Generator, size: int) -> np.ndarray | None:
        """Row indices of a training mini-batch; None when the problem has no samples."""
        return None
