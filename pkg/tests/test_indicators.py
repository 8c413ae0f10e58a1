"""Tests for the archive quality indicators."""

import numpy as np
import pytest

from src.core.exceptions import ContractViolationError
from src.core.models import MetricBounds
from src.optim.indicators import (
    bounded_levels,
    coverage_span,
    hypervolume,
    max_adjacent_gap,
    supported_mask,
)

UNIT = MetricBounds.unit(2)


def test_bounded_levels_dedup_and_clip():
    levels = bounded_levels(np.array([0.5, 0.5, 1.2, -0.3, 0.25]), 0.0, 1.0)

    assert levels.tolist() == [0.0, 0.25, 0.5, 1.0]


def test_max_adjacent_gap():
    assert max_adjacent_gap(np.array([0.2, 0.3]), 0.0, 1.0) == pytest.approx(0.7)
    assert max_adjacent_gap(np.array([]), 0.0, 1.0) == 1.0


def test_coverage_span_clips_to_bounds():
    points = np.array([[0.1, 1.5], [0.6, 0.2], [-0.5, 0.4]])

    assert coverage_span(points, UNIT) == pytest.approx([0.6, 0.8])


def test_coverage_span_rejects_metric_count():
    with pytest.raises(ContractViolationError):
        coverage_span(np.array([[0.1, 0.2, 0.3]]), UNIT)


def test_hypervolume_single_point():
    """Test the dominated box of one maximised point against reference 1.1."""
    value = hypervolume(np.array([[0.5, 0.5]]), UNIT)

    assert value == pytest.approx(0.6 * 0.6)


def test_hypervolume_grows_with_points():
    one = hypervolume(np.array([[0.9, 0.1]]), UNIT)
    two = hypervolume(np.array([[0.9, 0.1], [0.1, 0.9]]), UNIT)

    assert two > one


def test_hypervolume_minimised_metric():
    value = hypervolume(np.array([[0.5, 0.2]]), UNIT, higher_is_better=[True, False])

    assert value == pytest.approx(0.6 * 0.9)


def test_supported_mask_convex_front():
    """Test that points of a convex front are all supported."""
    angles = np.linspace(0, np.pi / 2, 7)
    points = np.stack([np.cos(angles), np.sin(angles)], axis=1)

    assert supported_mask(points).all()


def test_supported_mask_concave_front():
    """Test that the interior of a concave front is not reachable by weighted sums."""
    x = np.linspace(0, 1, 7)
    points = np.stack([x, (1 - np.sqrt(x)) ** 2], axis=1)

    mask = supported_mask(points)

    assert mask[0] and mask[-1]
    assert not mask[1:-1].any()


def test_supported_mask_degenerate():
    assert supported_mask(np.array([[0.5, 0.5]])).tolist() == [True]
