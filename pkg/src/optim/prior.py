"""A-priori preference solver for per-metric hard constraints.

Each constrained metric carries a disjunction of atomic conditions; the overall
constraint is their conjunction. Picking one atom per metric gives a feasible subset.
Subsets are tried in priority order, and within a subset the preference weight of the
metric farthest from the subset's extreme point is scaled by the pace until the
trained metrics land in the subset.
"""

import itertools
from collections.abc import Mapping, Sequence
from enum import StrEnum

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.config import settings
from src.core.exceptions import ContractViolationError, InvalidConstraintError
from src.core.models import ArrayModel, MetricVector, PreferenceWeights, Vector
from src.optim.mgda import Optimizer, TrainConfig, optimize
from src.problems.base import Problem

logger = structlog.get_logger()

WEIGHT_MIN, WEIGHT_MAX = 1e-6, 1e6
GAP_TIE_TOL = 1e-12


class ConditionKind(StrEnum):
    """Kinds of atomic condition on one metric."""

    GE = "ge"
    LE = "le"
    EQ = "eq"
    BETWEEN = "between"


class AtomicCondition(BaseModel):
    """M[metric_index] >= value, <= value, == value, or value <= M <= upper."""

    model_config = ConfigDict(frozen=True)

    metric_index: int = Field(ge=0)
    kind: ConditionKind
    value: float
    upper: float | None = None

    @model_validator(mode="after")
    def _check(self) -> "AtomicCondition":
        if self.kind == ConditionKind.BETWEEN:
            if self.upper is None or self.value > self.upper:
                raise ValueError(f"BETWEEN needs value <= upper, got {self.value}, {self.upper}")
        elif self.upper is not None:
            raise ValueError(f"{self.kind.value} takes a single bound")
        return self

    @property
    def is_inequality(self) -> bool:
        return self.kind != ConditionKind.EQ

    def holds(self, metric: float, eq_tol: float) -> bool:
        if self.kind == ConditionKind.GE:
            return metric >= self.value
        if self.kind == ConditionKind.LE:
            return metric <= self.value
        if self.kind == ConditionKind.EQ:
            return abs(metric - self.value) <= eq_tol
        assert self.upper is not None
        return self.value <= metric <= self.upper

    def extreme(self, reference: float | None) -> float:
        """Boundary value of the condition; for BETWEEN the endpoint nearer the reference."""
        if self.kind != ConditionKind.BETWEEN:
            return self.value
        assert self.upper is not None
        if reference is not None and abs(self.upper - reference) < abs(self.value - reference):
            return self.upper
        return self.value


class ConstraintSet(BaseModel):
    """Conjunction over metrics of per-metric disjunctions of atomic conditions."""

    model_config = ConfigDict(frozen=True)

    clauses: dict[int, tuple[AtomicCondition, ...]]

    def check(self) -> None:
        """Raise InvalidConstraintError for empty or misfiled disjunctions."""
        if not self.clauses:
            raise InvalidConstraintError("constraint set is empty")
        for metric, atoms in self.clauses.items():
            if not atoms:
                raise InvalidConstraintError(f"metric {metric} has an empty disjunction")
            if any(atom.metric_index != metric for atom in atoms):
                raise InvalidConstraintError(f"clause of metric {metric} mentions another metric")

    @classmethod
    def of(cls, *atoms: AtomicCondition) -> "ConstraintSet":
        """Group atoms by metric; atoms on the same metric form a disjunction."""
        clauses: dict[int, list[AtomicCondition]] = {}
        for atom in atoms:
            clauses.setdefault(atom.metric_index, []).append(atom)
        return cls(clauses={m: tuple(a) for m, a in sorted(clauses.items())})

    @property
    def metrics(self) -> list[int]:
        return sorted(self.clauses)

    def satisfied_by(self, m: MetricVector, eq_tol: float) -> bool:
        return all(
            any(atom.holds(float(m.metrics[metric]), eq_tol) for atom in atoms)
            for metric, atoms in self.clauses.items()
        )


class FeasibleSubset(ArrayModel):
    """One atom per constrained metric, with its extreme point and priority key."""

    atoms: tuple[AtomicCondition, ...]
    extreme_point: Vector
    priority: tuple[int, float, tuple[int, ...]]

    @property
    def metric_indices(self) -> list[int]:
        return [atom.metric_index for atom in self.atoms]

    @property
    def n_inequalities(self) -> int:
        return sum(atom.is_inequality for atom in self.atoms)


class PriorConfig(BaseModel):
    """Search settings of the a-priori solver."""

    model_config = ConfigDict(frozen=True)

    pace: float = Field(default_factory=lambda: settings.pace, gt=1.0)
    max_rounds_per_subset: int = Field(default_factory=lambda: settings.max_rounds_per_subset, ge=1)
    eq_tol: float = Field(default_factory=lambda: settings.eq_tol, gt=0.0)
    # Objective whose weight steers each metric; identity when absent.
    objective_of_metric: dict[int, int] = Field(default_factory=dict)


class PreferenceResult(ArrayModel):
    """Outcome of the a-priori solver."""

    metrics: MetricVector
    weights: PreferenceWeights
    satisfied: bool
    # Position of the satisfied subset in priority order; None for the uniform-weight
    # solution or when nothing was satisfied.
    subset_index: int | None
    rounds: int
    optimize_calls: int


def _check_indices(m: MetricVector, indices: Sequence[int]) -> None:
    if any(i >= len(m) for i in indices):
        raise ContractViolationError(f"constraint on metric {max(indices)} but only {len(m)} metrics")


def enumerate_feasible_subsets(
    c: ConstraintSet, reference: MetricVector | None = None
) -> list[FeasibleSubset]:
    """Cartesian product of the per-metric atoms in priority order.

    Most inequalities first, then smallest distance from `reference` to the extreme
    point, then the lexicographic order of the chosen atom positions.
    """
    c.check()
    metrics = c.metrics
    if reference is not None:
        _check_indices(reference, metrics)
    subsets = []
    choices = [range(len(c.clauses[metric])) for metric in metrics]
    for picks in itertools.product(*choices):
        atoms = tuple(c.clauses[metric][pick] for metric, pick in zip(metrics, picks, strict=True))
        ref = [None if reference is None else float(reference.metrics[a.metric_index]) for a in atoms]
        point = np.array([atom.extreme(r) for atom, r in zip(atoms, ref, strict=True)])
        distance = 0.0
        if reference is not None:
            distance = float(np.linalg.norm(reference.metrics[metrics] - point))
        n_ineq = sum(atom.is_inequality for atom in atoms)
        subsets.append(
            FeasibleSubset(atoms=atoms, extreme_point=point, priority=(-n_ineq, distance, tuple(picks)))
        )
    return sorted(subsets, key=lambda s: s.priority)


def euclidean_gap(m: MetricVector, s: FeasibleSubset) -> float:
    """Distance from M to the extreme point over the constrained metrics only."""
    _check_indices(m, s.metric_indices)
    return float(np.linalg.norm(m.metrics[s.metric_indices] - s.extreme_point))


def satisfies(m: MetricVector, s: FeasibleSubset, eq_tol: float | None = None) -> bool:
    """Every atom of the subset holds; equalities within eq_tol."""
    eq_tol = settings.eq_tol if eq_tol is None else eq_tol
    if eq_tol <= 0:
        raise ContractViolationError(f"eq_tol must be positive, got {eq_tol}")
    _check_indices(m, s.metric_indices)
    return all(atom.holds(float(m.metrics[atom.metric_index]), eq_tol) for atom in s.atoms)


def reweighting2(
    p: np.ndarray,
    m: MetricVector,
    w: PreferenceWeights,
    s: FeasibleSubset,
    pace: float,
    eq_tol: float | None = None,
    objective_of_metric: Mapping[int, int] | None = None,
    higher_is_better: Sequence[bool] | None = None,
) -> PreferenceWeights:
    """Scale the weight of the failing metric farthest from its extreme point.

    The weight goes down by `pace` when the metric overshoots the extreme point and up
    otherwise. For a metric where lower is better the direction flips.
    """
    if pace <= 1:
        raise ContractViolationError(f"pace must exceed 1, got {pace}")
    eq_tol = settings.eq_tol if eq_tol is None else eq_tol
    p = np.asarray(p, dtype=float)
    _check_indices(m, s.metric_indices)
    failing = [
        (abs(p[j] - m.metrics[atom.metric_index]), j, atom)
        for j, atom in enumerate(s.atoms)
        if not atom.holds(float(m.metrics[atom.metric_index]), eq_tol)
    ]
    if not failing:
        raise ContractViolationError("reweighting needs at least one failing condition")
    # Gaps equal up to rounding are ties; the lowest position wins.
    widest = max(gap for gap, _, _ in failing)
    _, j, atom = next(item for item in failing if item[0] >= widest - GAP_TIE_TOL)
    metric = atom.metric_index
    objective = (objective_of_metric or {}).get(metric, metric)
    if objective >= len(w):
        raise ContractViolationError(f"metric {metric} maps to objective {objective} of {len(w)}")
    overshoot = m.metrics[metric] > p[j]
    if higher_is_better is not None and not higher_is_better[metric]:
        overshoot = not overshoot
    weights = w.w.copy()
    weights[objective] = weights[objective] / pace if overshoot else weights[objective] * pace
    return PreferenceWeights(w=np.clip(weights, WEIGHT_MIN, WEIGHT_MAX))


def solve_preferred(
    problem: Problem,
    c: ConstraintSet,
    train_cfg: TrainConfig,
    cfg: PriorConfig | None = None,
    optimizer: Optimizer = optimize,
) -> PreferenceResult:
    """Find one solution whose metrics satisfy the constraints.

    Trains once under uniform weights and returns at once if that solution satisfies
    every clause. Otherwise walks the feasible subsets in priority order, carrying the
    weights over from one subset to the next.
    """
    cfg = cfg or PriorConfig()
    c.check()
    if any(metric >= problem.n_objectives for metric in c.metrics):
        raise InvalidConstraintError(
            f"constraint on metric {max(c.metrics)} but the problem has {problem.n_objectives}"
        )
    log = logger.bind(pace=cfg.pace, constrained=c.metrics)
    w = PreferenceWeights.uniform(problem.n_objectives)
    calls = 0

    def run(weights: PreferenceWeights) -> MetricVector:
        nonlocal calls
        calls += 1
        metrics, _ = optimizer(problem, weights, train_cfg)
        return metrics

    m = run(w)
    if c.satisfied_by(m, cfg.eq_tol):
        log.info("Uniform-weight solution satisfies the constraints", metrics=m.metrics.tolist())
        return PreferenceResult(
            metrics=m, weights=w, satisfied=True, subset_index=None, rounds=0, optimize_calls=calls
        )

    subsets = enumerate_feasible_subsets(c, reference=m)
    rounds = 0
    for index, subset in enumerate(subsets):
        subset_rounds = 0
        while not satisfies(m, subset, cfg.eq_tol) and subset_rounds < cfg.max_rounds_per_subset:
            w = reweighting2(
                subset.extreme_point,
                m,
                w,
                subset,
                cfg.pace,
                eq_tol=cfg.eq_tol,
                objective_of_metric=cfg.objective_of_metric,
                higher_is_better=problem.higher_is_better,
            )
            m = run(w)
            subset_rounds += 1
            log.info(
                "Prior round",
                subset=index,
                round=subset_rounds,
                weights=w.w.tolist(),
                metrics=m.metrics.tolist(),
            )
        rounds += subset_rounds
        if satisfies(m, subset, cfg.eq_tol):
            log.info("Constraints satisfied", subset=index, rounds=rounds)
            return PreferenceResult(
                metrics=m, weights=w, satisfied=True, subset_index=index, rounds=rounds, optimize_calls=calls
            )

    log.warning("No feasible subset was reached", rounds=rounds)
    return PreferenceResult(
        metrics=m, weights=w, satisfied=False, subset_index=None, rounds=rounds, optimize_calls=calls
    )
