"""Tests for the forecasters and the analytic gradients of every problem."""

import numpy as np
import pytest
from pydantic import ValidationError

from src.core.exceptions import ContractViolationError
from src.forecasting.datagen import SeriesBatch
from src.forecasting.models import (
    ForecastModel,
    LossMetricBinding,
    ModelSpec,
    forward,
    objective_gradients,
    objective_losses,
)
from src.problems.toys import ConcaveProblem, QuadraticProblem

FD_STEP = 1e-5


def random_batch(rng: np.random.Generator, n: int = 5, k: int = 3, f: int = 2, g: int = 3) -> SeriesBatch:
    return SeriesBatch(inputs=rng.standard_normal((n, k, f)), targets=rng.uniform(0, 5, (n, g)))


def finite_difference(fn, theta: np.ndarray) -> np.ndarray:
    """Central differences of a vector-valued function, one row per output."""
    columns = []
    for i in range(len(theta)):
        step = np.zeros_like(theta)
        step[i] = FD_STEP
        columns.append((fn(theta + step) - fn(theta - step)) / (2 * FD_STEP))
    return np.stack(columns, axis=-1)


def test_model_spec_param_count():
    assert ModelSpec(input_dim=6, output_dim=3).n_params == 21
    assert ModelSpec(kind="feedforward", input_dim=6, output_dim=3, hidden=4).n_params == 28 + 15


def test_binding_rejects_quantile():
    with pytest.raises(ValidationError):
        LossMetricBinding(quantile=1.0)


def test_forward_zero_params():
    """Test that a linear model with zero parameters predicts zero."""
    batch = random_batch(np.random.default_rng(0))
    model = ForecastModel(ModelSpec(input_dim=6, output_dim=3))

    assert np.all(forward(model, np.zeros(model.n_params), batch) == 0.0)


def test_forward_passthrough_feature():
    """Test constructed weights that copy the last input feature to every output."""
    batch = random_batch(np.random.default_rng(1))
    model = ForecastModel(ModelSpec(input_dim=6, output_dim=3))
    w = np.zeros((6, 3))
    w[-1, :] = 1.0
    params = np.concatenate([w.ravel(), np.zeros(3)])

    predictions = forward(model, params, batch)

    assert predictions == pytest.approx(np.repeat(batch.inputs[:, -1, -1:], 3, axis=1))


def test_forward_is_deterministic():
    batch = random_batch(np.random.default_rng(2))
    model = ForecastModel(ModelSpec(kind="feedforward", input_dim=6, output_dim=3, seed=4))
    params = model.init_params()

    assert np.array_equal(forward(model, params, batch), forward(model, params, batch))
    assert np.array_equal(params, ForecastModel(model.spec).init_params())


def test_forward_dimension_mismatch():
    batch = random_batch(np.random.default_rng(3))
    model = ForecastModel(ModelSpec(input_dim=6, output_dim=3))

    with pytest.raises(ContractViolationError):
        forward(model, np.zeros(model.n_params - 1), batch)
    with pytest.raises(ContractViolationError):
        forward(ForecastModel(ModelSpec(input_dim=6, output_dim=4)), np.zeros(28), batch)


def test_linear_mse_gradient_closed_form():
    """Test the MSE row against the least-squares gradient (2/N) X^T (XW + b - Y)."""
    rng = np.random.default_rng(5)
    batch = random_batch(rng)
    model = ForecastModel(ModelSpec(input_dim=6, output_dim=3))
    params = rng.standard_normal(model.n_params)
    x, y = batch.flat_inputs, batch.targets
    w, b = params[:18].reshape(6, 3), params[18:]
    residual = x @ w + b - y

    grads = objective_gradients(model, params, batch, LossMetricBinding())

    expected = np.concatenate([(2 / 5) * (x.T @ residual).ravel(), (2 / 5) * residual.sum(axis=0)])
    assert grads.grads[0] == pytest.approx(expected)


def test_zero_error_mse_gradient():
    batch = random_batch(np.random.default_rng(6))
    model = ForecastModel(ModelSpec(input_dim=6, output_dim=3))
    params = np.zeros(model.n_params)
    params[18:] = 1.0
    exact = SeriesBatch(inputs=batch.inputs, targets=np.ones((5, 3)))

    grads = objective_gradients(model, params, exact, LossMetricBinding())

    assert np.all(grads.grads[0] == 0.0)


@pytest.mark.parametrize("seed", range(25))
@pytest.mark.parametrize("kind", ["linear", "feedforward"])
def test_objective_gradients_match_finite_differences(seed, kind):
    """Test backpropagation against central differences on small random instances."""
    rng = np.random.default_rng(seed)
    batch = random_batch(rng)
    model = ForecastModel(ModelSpec(kind=kind, input_dim=6, output_dim=3, hidden=4, seed=seed))
    binding = LossMetricBinding()
    params = model.init_params() + 0.1 * rng.standard_normal(model.n_params)

    analytic = objective_gradients(model, params, batch, binding).grads
    numeric = finite_difference(lambda p: objective_losses(model, p, batch, binding), params)

    np.testing.assert_allclose(analytic, numeric, rtol=1e-4, atol=1e-6)


@pytest.mark.parametrize(
    "problem, theta",
    [
        (QuadraticProblem(centers=[[-1.0, 0.0, 2.0], [1.0, 0.5, 0.0], [0.0, 1.0, 1.0]]), [0.3, -0.2, 0.7]),
        (ConcaveProblem(), [0.2, -0.4]),
        (ConcaveProblem(), [-0.6, 0.9]),
    ],
)
def test_toy_gradients_match_finite_differences(problem, theta):
    theta = np.array(theta)

    numeric = finite_difference(problem.losses, theta)

    np.testing.assert_allclose(problem.gradients(theta), numeric, rtol=1e-4, atol=1e-8)


def test_concave_metrics_complement_losses():
    problem = ConcaveProblem()
    theta = 0.3 * problem.u

    assert problem.metrics(theta) == pytest.approx(1.0 - problem.losses(theta))
