"""Tests for dominance and stationarity predicates."""

import numpy as np
import pytest

from src.core.exceptions import ContractViolationError
from src.core.models import GradientSet, ObjectiveValues
from src.core.pareto import dominates, is_pareto_stationary, non_dominated_mask


def objectives(*values: float) -> ObjectiveValues:
    return ObjectiveValues(losses=list(values))


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ((1.0, 2.0), (1.0, 2.0), False),
        ((1.0, 2.0), (1.5, 2.0), True),
        ((1.0, 3.0), (2.0, 2.0), False),
        ((1.5, 2.0), (1.0, 2.0), False),
    ],
)
def test_dominates(a, b, expected):
    """Test dominance: no worse everywhere, strictly better somewhere."""
    assert dominates(objectives(*a), objectives(*b)) is expected


def test_dominates_length_mismatch():
    """Test that comparing vectors of different length is rejected."""
    with pytest.raises(ContractViolationError):
        dominates(objectives(1.0, 2.0), objectives(1.0))


@pytest.mark.parametrize(
    "grads, expected",
    [
        ([[1.0, 0.0], [-1.0, 0.0]], True),
        ([[1.0, 0.0], [0.0, 1.0]], False),
        ([[0.0, 0.0, 0.0]], True),
    ],
)
def test_is_pareto_stationary(grads, expected):
    """Test stationarity on opposite, orthogonal and vanishing gradients."""
    assert is_pareto_stationary(GradientSet(grads=grads), tol=1e-6) is expected


def test_is_pareto_stationary_rejects_nonpositive_tol():
    with pytest.raises(ContractViolationError):
        is_pareto_stationary(GradientSet(grads=[[1.0, 0.0]]), tol=0.0)


def test_non_dominated_mask_maximize():
    """Test filtering with larger-is-better metrics."""
    points = np.array([[0.9, 0.1], [0.5, 0.5], [0.4, 0.4], [0.1, 0.9]])

    mask = non_dominated_mask(points, maximize=True)

    assert mask.tolist() == [True, True, False, True]


def test_non_dominated_mask_tolerance():
    """Test that improvements below the tolerance do not dominate."""
    points = np.array([[0.5, 0.5], [0.5, 0.5005]])

    assert non_dominated_mask(points, maximize=True).tolist() == [False, True]
    assert non_dominated_mask(points, maximize=True, tol=1e-3).tolist() == [True, True]


def test_is_pareto_stationary_ignores_objective_order():
    rng = np.random.default_rng(2)
    cases = [
        np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]]),
        np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]),
        *(rng.standard_normal((3, 2)) for _ in range(10)),
        *(rng.standard_normal((3, 5)) for _ in range(10)),
    ]

    for grads in cases:
        expected = is_pareto_stationary(GradientSet(grads=grads), tol=1e-6)
        for order in ([1, 0, 2], [2, 1, 0], [1, 2, 0]):
            assert is_pareto_stationary(GradientSet(grads=grads[order]), tol=1e-6) is expected
