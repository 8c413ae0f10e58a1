"""Surrogate losses and the non-decomposable forecasting metrics.

Losses are summed over every series and horizon step and return their gradient with
respect to the predictions. Metrics work on per-series horizon totals.
"""

import numpy as np

from src.core.exceptions import ContractViolationError, UndefinedMetricError


def _check_shapes(y: np.ndarray, y_hat: np.ndarray) -> None:
    if y.shape != y_hat.shape:
        raise ContractViolationError(f"shape mismatch: {y.shape} != {y_hat.shape}")


def loss_mse(y: np.ndarray, y_hat: np.ndarray) -> tuple[float, np.ndarray]:
    """Sum of squared errors and its gradient 2 (y_hat - y)."""
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    _check_shapes(y, y_hat)
    residual = y_hat - y
    return float(np.sum(residual**2)), 2.0 * residual


def loss_qrl(y: np.ndarray, y_hat: np.ndarray, q: float) -> tuple[float, np.ndarray]:
    """Pinball loss sum max(q e, (q - 1) e) with e = y - y_hat, and its subgradient.

    The subgradient is -q where the forecast is below the actual, 1 - q where it is
    above and 0 at equality.
    """
    if not 0.0 < q < 1.0:
        raise ContractViolationError(f"quantile must lie in (0, 1), got {q}")
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    _check_shapes(y, y_hat)
    error = y - y_hat
    value = float(np.sum(np.maximum(q * error, (q - 1.0) * error)))
    grad = np.where(y_hat < y, -q, np.where(y_hat > y, 1.0 - q, 0.0))
    return value, grad


def _horizon_totals(y: np.ndarray, y_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    y = np.atleast_2d(np.asarray(y, dtype=float))
    y_hat = np.atleast_2d(np.asarray(y_hat, dtype=float))
    _check_shapes(y, y_hat)
    actual = y.sum(axis=-1)
    forecast = np.clip(y_hat, 0.0, None).sum(axis=-1)
    # Series without demand carry no weight in either metric.
    keep = actual > 0
    return actual[keep], forecast[keep]


def metric_acc(y: np.ndarray, y_hat: np.ndarray) -> float:
    """Volume-weighted min/max ratio of actual and forecast horizon totals."""
    actual, forecast = _horizon_totals(y, y_hat)
    denominator = float(np.sum(actual * np.maximum(actual, forecast)))
    if denominator <= 0:
        raise UndefinedMetricError("ACC is undefined: no series has positive demand")
    return float(np.sum(actual * np.minimum(actual, forecast))) / denominator


def metric_sl(y: np.ndarray, y_hat: np.ndarray) -> float:
    """Share of actual demand covered by the forecast, capped per series."""
    actual, forecast = _horizon_totals(y, y_hat)
    total = float(actual.sum())
    if total <= 0:
        raise UndefinedMetricError("SL is undefined: no series has positive demand")
    return float(np.sum(np.minimum(actual, forecast))) / total
