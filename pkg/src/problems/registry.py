"""Factory for the problems the command line can run."""

from pathlib import Path
from typing import Literal

import numpy as np
import structlog

from src.core.exceptions import ContractViolationError
from src.forecasting.datagen import read_csv
from src.problems.base import Problem
from src.problems.forecast import ForecastProblem
from src.problems.toys import ConcaveProblem, QuadraticProblem

logger = structlog.get_logger()

ProblemName = Literal["forecast", "quadratic", "concave"]


def default_quadratic() -> QuadraticProblem:
    """Two quadratics centred at (-1, 0) and (1, 0), started off the Pareto segment."""
    return QuadraticProblem(centers=np.array([[-1.0, 0.0], [1.0, 0.0]]), init=np.array([0.0, 1.5]))


def get_problem(
    name: ProblemName,
    data: Path | None = None,
    k: int = 26,
    g: int = 26,
    model: Literal["linear", "feedforward"] = "linear",
) -> Problem:
    """Build a problem by name; the forecast problem reads its panel from `data`."""
    if name == "quadratic":
        return default_quadratic()
    if name == "concave":
        return ConcaveProblem()
    if name == "forecast":
        if data is None:
            raise ContractViolationError("the forecast problem needs a demand file")
        panel = read_csv(data)
        logger.info("Loaded demand panel", path=str(data), series=panel.n_series, weeks=panel.n_weeks)
        return ForecastProblem(panel, k=k, g=g, kind=model)
    raise ContractViolationError(f"unknown problem {name!r}")
