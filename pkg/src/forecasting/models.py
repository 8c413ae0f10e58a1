"""Small differentiable forecasters with hand-written backpropagation.

Parameters are a single flat vector. Layouts:

- linear: W (input_dim x output_dim, row-major), then b (output_dim).
- feedforward: W1 (input_dim x hidden), b1 (hidden), W2 (hidden x output_dim), b2 (output_dim).
"""

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.core.config import settings
from src.core.exceptions import ContractViolationError, DivergenceError
from src.core.models import GradientSet, ParamVector
from src.forecasting.datagen import SeriesBatch
from src.forecasting.losses import loss_mse, loss_qrl, metric_acc, metric_sl


class ModelSpec(BaseModel):
    """Architecture of a forecaster."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["linear", "feedforward"] = "linear"
    input_dim: int = Field(ge=1)
    output_dim: int = Field(ge=1)
    hidden: int = Field(default=16, ge=1)
    activation: Literal["tanh", "relu"] = "tanh"
    seed: int = Field(default_factory=lambda: settings.seed)

    @property
    def n_params(self) -> int:
        if self.kind == "linear":
            return (self.input_dim + 1) * self.output_dim
        return (self.input_dim + 1) * self.hidden + (self.hidden + 1) * self.output_dim


class LossMetricBinding(BaseModel):
    """Objectives in order, each paired with the metric it stands in for."""

    model_config = ConfigDict(frozen=True)

    quantile: float = Field(default_factory=lambda: settings.quantile, gt=0.0, lt=1.0)

    @property
    def loss_names(self) -> tuple[str, ...]:
        return ("mse", "qrl")

    @property
    def metric_names(self) -> tuple[str, ...]:
        return ("acc", "sl")

    def loss(self, t: int, y: np.ndarray, y_hat: np.ndarray) -> tuple[float, np.ndarray]:
        if t == 0:
            return loss_mse(y, y_hat)
        if t == 1:
            return loss_qrl(y, y_hat, self.quantile)
        raise ContractViolationError(f"no objective {t}")

    def metrics(self, y: np.ndarray, y_hat: np.ndarray) -> np.ndarray:
        return np.array([metric_acc(y, y_hat), metric_sl(y, y_hat)])


class ForecastModel:
    """Forward and backward passes of a ModelSpec over flattened input windows."""

    def __init__(self, spec: ModelSpec) -> None:
        self.spec = spec

    @property
    def n_params(self) -> int:
        return self.spec.n_params

    def init_params(self, seed: int | None = None) -> np.ndarray:
        spec = self.spec
        rng = np.random.default_rng(spec.seed if seed is None else seed)
        if spec.kind == "linear":
            w = rng.normal(0.0, 0.01, (spec.input_dim, spec.output_dim))
            return np.concatenate([w.ravel(), np.zeros(spec.output_dim)])
        w1 = rng.normal(0.0, 1.0 / np.sqrt(spec.input_dim), (spec.input_dim, spec.hidden))
        w2 = rng.normal(0.0, 1.0 / np.sqrt(spec.hidden), (spec.hidden, spec.output_dim))
        return np.concatenate(
            [w1.ravel(), np.zeros(spec.hidden), w2.ravel(), np.zeros(spec.output_dim)]
        )

    def _unpack(self, params: np.ndarray) -> list[np.ndarray]:
        spec = self.spec
        if params.shape != (self.n_params,):
            raise ContractViolationError(
                f"expected {self.n_params} parameters, got shape {params.shape}"
            )
        if spec.kind == "linear":
            shapes = [(spec.input_dim, spec.output_dim), (spec.output_dim,)]
        else:
            shapes = [
                (spec.input_dim, spec.hidden),
                (spec.hidden,),
                (spec.hidden, spec.output_dim),
                (spec.output_dim,),
            ]
        parts, offset = [], 0
        for shape in shapes:
            size = int(np.prod(shape))
            parts.append(params[offset : offset + size].reshape(shape))
            offset += size
        return parts

    def _activate(self, z: np.ndarray) -> np.ndarray:
        return np.tanh(z) if self.spec.activation == "tanh" else np.maximum(z, 0.0)

    def _activate_grad(self, z: np.ndarray, a: np.ndarray) -> np.ndarray:
        return 1.0 - a**2 if self.spec.activation == "tanh" else (z > 0).astype(float)

    def _check_inputs(self, x: np.ndarray) -> None:
        if x.ndim != 2 or x.shape[1] != self.spec.input_dim:
            raise ContractViolationError(
                f"inputs must be (N, {self.spec.input_dim}), got {x.shape}"
            )

    def forward(self, params: np.ndarray, x: np.ndarray) -> np.ndarray:
        self._check_inputs(x)
        parts = self._unpack(params)
        if self.spec.kind == "linear":
            w, b = parts
            return x @ w + b
        w1, b1, w2, b2 = parts
        return self._activate(x @ w1 + b1) @ w2 + b2

    def backward(self, params: np.ndarray, x: np.ndarray, grad_out: np.ndarray) -> np.ndarray:
        """Gradient of sum(grad_out * forward(params, x)) with respect to params."""
        self._check_inputs(x)
        parts = self._unpack(params)
        if self.spec.kind == "linear":
            return np.concatenate([(x.T @ grad_out).ravel(), grad_out.sum(axis=0)])
        w1, b1, w2, _ = parts
        z = x @ w1 + b1
        a = self._activate(z)
        grad_hidden = (grad_out @ w2.T) * self._activate_grad(z, a)
        return np.concatenate(
            [
                (x.T @ grad_hidden).ravel(),
                grad_hidden.sum(axis=0),
                (a.T @ grad_out).ravel(),
                grad_out.sum(axis=0),
            ]
        )


def _values(params: ParamVector | np.ndarray) -> np.ndarray:
    return params.values if isinstance(params, ParamVector) else np.asarray(params, dtype=float)


def forward(model: ForecastModel, params: ParamVector | np.ndarray, batch: SeriesBatch) -> np.ndarray:
    """Predictions of shape (N, g)."""
    if batch.targets.shape[1] != model.spec.output_dim:
        raise ContractViolationError(
            f"model predicts {model.spec.output_dim} steps, batch has {batch.targets.shape[1]}"
        )
    return model.forward(_values(params), batch.flat_inputs)


def objective_losses(
    model: ForecastModel,
    params: ParamVector | np.ndarray,
    batch: SeriesBatch,
    binding: LossMetricBinding,
) -> np.ndarray:
    """Empirical losses (1/N) sum_n L_t, ordered like the binding."""
    y_hat = forward(model, params, batch)
    n = max(len(batch), 1)
    return np.array(
        [binding.loss(t, batch.targets, y_hat)[0] / n for t in range(len(binding.loss_names))]
    )


def objective_gradients(
    model: ForecastModel,
    params: ParamVector | np.ndarray,
    batch: SeriesBatch,
    binding: LossMetricBinding,
) -> GradientSet:
    """Backpropagated gradient of each empirical loss, one row per objective."""
    theta = _values(params)
    y_hat = forward(model, theta, batch)
    n = max(len(batch), 1)
    rows = []
    for t in range(len(binding.loss_names)):
        _, grad_out = binding.loss(t, batch.targets, y_hat)
        rows.append(model.backward(theta, batch.flat_inputs, grad_out / n))
    grads = np.vstack(rows)
    if not np.all(np.isfinite(grads)):
        raise DivergenceError("objective gradient is not finite", step=0)
    return GradientSet(grads=grads)
