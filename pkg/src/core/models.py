"""Domain models shared by the optimization modules.

Numeric fields are stored as read-only float64 numpy arrays so the models stay
immutable once constructed and can be handed to numpy code without copying.
"""

from typing import Annotated, Any

import numpy as np
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    WithJsonSchema,
    field_validator,
    model_validator,
)

SIMPLEX_TOL = 1e-9


def _to_array(value: Any, ndim: int) -> np.ndarray:
    array = np.array(value, dtype=float)
    if array.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {array.shape}")
    array.setflags(write=False)
    return array


def _to_list(array: np.ndarray) -> list[Any]:
    return array.tolist()  # type: ignore[no-any-return]


Vector = Annotated[
    np.ndarray,
    BeforeValidator(lambda value: _to_array(value, 1)),
    PlainSerializer(_to_list, return_type=list[float]),
    WithJsonSchema({"type": "array", "items": {"type": "number"}}),
]

Matrix = Annotated[
    np.ndarray,
    BeforeValidator(lambda value: _to_array(value, 2)),
    PlainSerializer(_to_list, return_type=list[list[float]]),
    WithJsonSchema({"type": "array", "items": {"type": "array", "items": {"type": "number"}}}),
]


def _require_finite(array: np.ndarray, name: str) -> np.ndarray:
    if not np.all(np.isfinite(array)):
        raise ValueError(f"{name} contains NaN or Inf")
    return array


class ArrayModel(BaseModel):
    """Base class for immutable models holding numpy arrays."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class ParamVector(ArrayModel):
    """Flat model parameter vector."""

    values: Vector

    @field_validator("values")
    @classmethod
    def _check(cls, values: np.ndarray) -> np.ndarray:
        if values.size < 1:
            raise ValueError("parameter vector must not be empty")
        return _require_finite(values, "parameters")

    def __len__(self) -> int:
        return int(self.values.size)


class GradientSet(ArrayModel):
    """One gradient row per objective, all of the same dimension."""

    grads: Matrix

    @field_validator("grads")
    @classmethod
    def _check(cls, grads: np.ndarray) -> np.ndarray:
        if grads.shape[0] < 1 or grads.shape[1] < 1:
            raise ValueError(f"gradient set needs T >= 1 rows of length d >= 1, got {grads.shape}")
        return _require_finite(grads, "gradients")

    @property
    def n_objectives(self) -> int:
        return int(self.grads.shape[0])

    @property
    def dim(self) -> int:
        return int(self.grads.shape[1])


class SimplexWeights(ArrayModel):
    """Convex combination coefficients: nonnegative, summing to one."""

    alpha: Vector

    @field_validator("alpha")
    @classmethod
    def _normalize(cls, alpha: np.ndarray) -> np.ndarray:
        _require_finite(alpha, "simplex weights")
        if alpha.size < 1:
            raise ValueError("simplex weights must not be empty")
        if np.any(alpha < -SIMPLEX_TOL):
            raise ValueError(f"simplex weights must be nonnegative, got {alpha.tolist()}")
        total = float(np.clip(alpha, 0.0, None).sum())
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"simplex weights must sum to 1, got {total}")
        # Rounding accumulated by repeated reweighting is removed here.
        normalized = np.clip(alpha, 0.0, None) / total
        normalized.setflags(write=False)
        return normalized

    @classmethod
    def uniform(cls, n: int) -> "SimplexWeights":
        return cls(alpha=np.full(n, 1.0 / n))

    def __len__(self) -> int:
        return int(self.alpha.size)


class ObjectiveValues(ArrayModel):
    """Empirical losses, one per objective."""

    losses: Vector

    @field_validator("losses")
    @classmethod
    def _check(cls, losses: np.ndarray) -> np.ndarray:
        _require_finite(losses, "losses")
        if np.any(losses < 0):
            raise ValueError("losses must be nonnegative")
        return losses

    def __len__(self) -> int:
        return int(self.losses.size)


class MetricVector(ArrayModel):
    """Metric values, one per objective."""

    metrics: Vector

    @field_validator("metrics")
    @classmethod
    def _check(cls, metrics: np.ndarray) -> np.ndarray:
        return _require_finite(metrics, "metrics")

    def __len__(self) -> int:
        return int(self.metrics.size)


class MetricBounds(ArrayModel):
    """Range of each metric the decision maker cares about."""

    lo: Vector
    hi: Vector

    @model_validator(mode="after")
    def _check(self) -> "MetricBounds":
        if self.lo.shape != self.hi.shape:
            raise ValueError("lo and hi must have the same length")
        if not np.all(self.lo < self.hi):
            raise ValueError(f"bounds need lo < hi, got lo={self.lo.tolist()} hi={self.hi.tolist()}")
        return self

    @classmethod
    def unit(cls, n: int) -> "MetricBounds":
        return cls(lo=np.zeros(n), hi=np.ones(n))

    def __len__(self) -> int:
        return int(self.lo.size)


class PreferenceWeights(ArrayModel):
    """Subjective weights used to bias the simplex weights."""

    w: Vector

    @field_validator("w")
    @classmethod
    def _check(cls, w: np.ndarray) -> np.ndarray:
        _require_finite(w, "preference weights")
        if w.size < 1 or np.any(w <= 0):
            raise ValueError(f"preference weights must be positive, got {w.tolist()}")
        return w

    @classmethod
    def uniform(cls, n: int) -> "PreferenceWeights":
        return cls(w=np.full(n, 1.0 / n))

    def __len__(self) -> int:
        return int(self.w.size)


class StepRecord(ArrayModel):
    """One optimisation step: losses, alpha and sq_norm at the pre-step parameters,
    metrics after the step."""

    step: int
    losses: Vector
    metrics: Vector
    alpha: Vector
    sq_norm: float = Field(ge=0.0)


class TrainTrace(BaseModel):
    """Per-step records of an optimize run plus the final parameters."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    records: list[StepRecord] = []
    final_params: Vector | None = None
    stop_reason: str = "running"

    def __len__(self) -> int:
        return len(self.records)


class ArchiveEntry(ArrayModel):
    """Weights and the metrics the optimizer reached with them.

    Weights are preference weights for the explorers and scalarisation coefficients
    for grid search, where zero entries occur.
    """

    round: int
    weights: Vector
    metrics: MetricVector

    @field_validator("weights")
    @classmethod
    def _check(cls, weights: np.ndarray) -> np.ndarray:
        _require_finite(weights, "weights")
        if np.any(weights < 0):
            raise ValueError("archived weights must be nonnegative")
        return weights


class FrontierArchive(BaseModel):
    """Ordered list of explored (W, M) pairs, in production order."""

    entries: list[ArchiveEntry] = []

    def add(self, weights: PreferenceWeights | np.ndarray, metrics: MetricVector) -> ArchiveEntry:
        values = weights.w if isinstance(weights, PreferenceWeights) else weights
        entry = ArchiveEntry(round=len(self.entries) + 1, weights=values, metrics=metrics)
        self.entries.append(entry)
        return entry

    def metric_matrix(self) -> np.ndarray:
        """Archived metrics as an (n_entries, T) array."""
        if not self.entries:
            return np.empty((0, 0))
        return np.vstack([entry.metrics.metrics for entry in self.entries])

    def weight_matrix(self) -> np.ndarray:
        if not self.entries:
            return np.empty((0, 0))
        return np.vstack([entry.weights for entry in self.entries])

    def __len__(self) -> int:
        return len(self.entries)
