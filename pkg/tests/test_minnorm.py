"""Tests for the Frank-Wolfe min-norm solver."""

import numpy as np
import pytest
from pydantic import ValidationError

from src.core.exceptions import ContractViolationError, DivergenceError
from src.core.models import GradientSet, SimplexWeights
from src.optim.minnorm import (
    GramMatrix,
    frank_wolfe_solve,
    fw_line_search,
    fw_linear_minimizer,
    gram_matrix,
)

GRID_STEP = 1e-3


def brute_force_min(m: np.ndarray) -> float:
    """Smallest alpha^T M alpha over a simplex grid of step GRID_STEP."""
    steps = int(round(1 / GRID_STEP))
    a = np.arange(steps + 1) * GRID_STEP
    if len(m) == 2:
        alphas = np.stack([a, 1.0 - a], axis=1)
    else:
        a1, a2 = np.meshgrid(a, a, indexing="ij")
        keep = a1 + a2 <= 1.0 + 1e-12
        a1, a2 = a1[keep], a2[keep]
        alphas = np.stack([a1, a2, np.clip(1.0 - a1 - a2, 0.0, None)], axis=1)
    return float(np.min(np.einsum("ni,ij,nj->n", alphas, m, alphas)))


def random_gradient_sets(n: int):
    rng = np.random.default_rng(2024)
    for _ in range(n):
        t = int(rng.integers(2, 4))
        d = int(rng.integers(2, 9))
        yield GradientSet(grads=rng.standard_normal((t, d)))


@pytest.mark.parametrize(
    "grads, expected",
    [
        ([[1, 2], [3, 4]], [[5, 11], [11, 25]]),
        ([[1, 0]], [[1]]),
        ([[1, 0], [-1, 0]], [[1, -1], [-1, 1]]),
    ],
)
def test_gram_matrix(grads, expected):
    assert np.array_equal(gram_matrix(GradientSet(grads=grads)).m, expected)


def test_gram_matrix_rejects_asymmetric():
    """Test that a non-symmetric matrix is not a valid Gram matrix."""
    with pytest.raises(ValidationError):
        GramMatrix(m=[[1.0, 2.0], [0.0, 1.0]])


@pytest.mark.parametrize(
    "alpha, m, expected",
    [
        ([0.5, 0.5], [[1, 0], [0, 1]], 0),
        ([1.0, 0.0], [[4, 1], [1, 2]], 1),
        ([0.0, 1.0], [[4, 1], [1, 2]], 0),
    ],
)
def test_fw_linear_minimizer(alpha, m, expected):
    """Test vertex selection, lowest index on ties."""
    assert fw_linear_minimizer(SimplexWeights(alpha=alpha), GramMatrix(m=m)) == expected


@pytest.mark.parametrize(
    "alpha, t_hat, m, expected",
    [
        ([1.0, 0.0], 1, [[1, 0], [0, 1]], 0.5),
        ([1.0, 0.0], 0, [[1, 0], [0, 1]], 0.0),
        ([0.5, 0.5], 0, [[1, -1], [-1, 1]], 0.0),
    ],
)
def test_fw_line_search(alpha, t_hat, m, expected):
    assert fw_line_search(SimplexWeights(alpha=alpha), t_hat, GramMatrix(m=m)) == pytest.approx(expected)


def test_fw_line_search_rejects_bad_vertex():
    with pytest.raises(ContractViolationError):
        fw_line_search(SimplexWeights(alpha=[1.0, 0.0]), 2, GramMatrix(m=[[1, 0], [0, 1]]))


def test_frank_wolfe_single_objective():
    """Test that T=1 returns the gradient itself."""
    result = frank_wolfe_solve(GradientSet(grads=[[1.0, 0.0]]))

    assert result.alpha.alpha.tolist() == [1.0]
    assert result.direction.tolist() == [1.0, 0.0]
    assert result.sq_norm == pytest.approx(1.0)


def test_frank_wolfe_opposite_gradients():
    result = frank_wolfe_solve(GradientSet(grads=[[2.0, 0.0], [-2.0, 0.0]]))

    assert result.alpha.alpha == pytest.approx([0.5, 0.5])
    assert result.sq_norm == pytest.approx(0.0, abs=1e-12)


def test_frank_wolfe_orthogonal_gradients():
    result = frank_wolfe_solve(GradientSet(grads=[[1.0, 0.0], [0.0, 1.0]]))

    assert result.alpha.alpha == pytest.approx([0.5, 0.5])
    assert result.direction == pytest.approx([0.5, 0.5])
    assert result.sq_norm == pytest.approx(0.5)


def test_frank_wolfe_zero_gradients():
    """Test that vanishing gradients keep the uniform start."""
    result = frank_wolfe_solve(GradientSet(grads=np.zeros((3, 4))))

    assert result.alpha.alpha == pytest.approx([1 / 3] * 3)
    assert result.sq_norm == 0.0
    assert result.iterations == 0


def test_frank_wolfe_rejects_invalid_gradients():
    with pytest.raises(ContractViolationError):
        frank_wolfe_solve([[1.0, np.nan]])  # type: ignore[arg-type]


def test_frank_wolfe_objective_is_monotone():
    """Test that alpha^T M alpha never increases across iterations."""
    g = GradientSet(grads=[[1.0, 0.1, 0.0], [-0.2, 1.0, 0.3], [0.1, -0.4, 1.0]])

    result = frank_wolfe_solve(g, polish=False)

    assert np.all(np.diff(result.q_history) <= 1e-12)
    assert result.sq_norm == pytest.approx(result.q_history[-1])


def test_frank_wolfe_respects_max_iters():
    g = GradientSet(grads=[[1.0, 0.1, 0.0], [-0.2, 1.0, 0.3], [0.1, -0.4, 1.0]])

    result = frank_wolfe_solve(g, max_iters=2, polish=False)

    assert result.iterations <= 2
    assert len(result.q_history) == result.iterations + 1


@pytest.mark.slow
def test_frank_wolfe_matches_brute_force():
    """Test min-norm values against a simplex grid search on random instances."""
    for g in random_gradient_sets(200):
        result = frank_wolfe_solve(g)
        expected = brute_force_min(gram_matrix(g).m)

        assert result.sq_norm <= expected + 1e-9
        assert result.sq_norm == pytest.approx(expected, abs=1e-3)


@pytest.mark.slow
def test_frank_wolfe_direction_improves_every_objective():
    """Test <d, g_t> >= ||d||^2 for every objective of a non-stationary solve."""
    for g in random_gradient_sets(200):
        result = frank_wolfe_solve(g)
        if result.sq_norm <= 1e-8:
            continue
        projections = g.grads @ result.direction

        assert np.all(projections >= result.sq_norm * (1 - 1e-6) - 1e-12)


def test_frank_wolfe_permutation_invariant():
    """Test that reordering the objectives reorders alpha and keeps the norm."""
    rng = np.random.default_rng(5)

    for _ in range(60):
        n = int(rng.integers(2, 5))
        grads = rng.standard_normal((n, n + 2))
        order = rng.permutation(n)

        result = frank_wolfe_solve(GradientSet(grads=grads))
        permuted = frank_wolfe_solve(GradientSet(grads=grads[order]))

        assert permuted.alpha.alpha == pytest.approx(result.alpha.alpha[order], abs=1e-6)
        assert permuted.sq_norm == pytest.approx(result.sq_norm, abs=1e-9)


def test_gram_matrix_overflow_is_divergence():
    """Test that finite gradients with overflowing inner products raise DivergenceError."""
    g = GradientSet(grads=[[1e200, 0.0], [0.0, 1.0]])

    with pytest.raises(DivergenceError):
        gram_matrix(g)
    with pytest.raises(DivergenceError):
        frank_wolfe_solve(g)
