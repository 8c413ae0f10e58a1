"""Synthetic service-parts demand and the weekly panel file format.

Intermittent parts draw a Bernoulli occurrence each week times a discretised lognormal
size. Non-intermittent parts follow a life-cycle curve (logistic growth, plateau,
exponential decline) modulated by a yearly seasonal factor and multiplicative noise.
"""

import re
from pathlib import Path
from typing import Literal

import numpy as np
import pandas as pd
import structlog
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.core.config import settings
from src.core.exceptions import ContractViolationError, DataFormatError

logger = structlog.get_logger()

WEEKS_PER_YEAR = 52
ADI_CUTOFF = 1.32
FEATURE_COLUMNS = ("log_demand", "zero_run", "week_sin", "week_cos", "phase")
KEY_COLUMNS = ("series_id", "week", "demand")
FLOAT_FORMAT = "%.9g"

PHASE_GROWTH, PHASE_MATURITY, PHASE_DECLINE = 0, 1, 2


class GenSpec(BaseModel):
    """Parameters of the synthetic demand generator."""

    model_config = ConfigDict(frozen=True)

    seed: int = Field(default_factory=lambda: settings.seed)
    n_series: int = Field(default=50, ge=1)
    weeks: int = Field(default=260, ge=2)
    demand_class: Literal["intermittent", "non-intermittent", "mixed"] = "mixed"
    # Share of intermittent parts when demand_class is "mixed".
    intermittent_share: float = Field(default=0.5, ge=0.0, le=1.0)

    # Window lengths the data must accommodate.
    input_weeks: int = Field(default=26, ge=1)
    horizon_weeks: int = Field(default=26, ge=1)

    # Intermittent parts
    occurrence_p: float = Field(default=0.3, gt=0.0, le=1.0)
    size_mu: float = 1.0
    size_sigma: float = Field(default=0.5, ge=0.0)

    # Non-intermittent parts: growth ends and decline starts at these fractions of the horizon.
    level: float = Field(default=20.0, gt=0.0)
    growth_fraction: float = Field(default=0.25, gt=0.0, lt=1.0)
    decline_fraction: float = Field(default=0.7, gt=0.0, le=1.0)
    seasonal_amplitude: float = Field(default=0.2, ge=0.0, lt=1.0)
    noise: float = Field(default=0.1, ge=0.0)

    @model_validator(mode="after")
    def _check(self) -> "GenSpec":
        if self.weeks < self.input_weeks + self.horizon_weeks:
            raise ValueError(
                f"weeks ({self.weeks}) must cover input_weeks + horizon_weeks "
                f"({self.input_weeks + self.horizon_weeks})"
            )
        if self.decline_fraction < self.growth_fraction:
            raise ValueError("decline_fraction must not precede growth_fraction")
        return self


class DemandPanel(BaseModel):
    """Weekly demand in long format: one row per series and week.

    Columns are series_id, week, demand and the feature columns, sorted by series_id
    then week.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    frame: pd.DataFrame

    @field_validator("frame")
    @classmethod
    def _check(cls, frame: pd.DataFrame) -> pd.DataFrame:
        missing = [c for c in KEY_COLUMNS if c not in frame.columns]
        if missing:
            raise ValueError(f"panel is missing columns {missing}")
        if (frame["demand"] < 0).any():
            raise ValueError("demand must be nonnegative")
        return frame.sort_values(["series_id", "week"], kind="stable").reset_index(drop=True)

    @property
    def series_ids(self) -> list[str]:
        return [str(s) for s in self.frame["series_id"].unique()]

    @property
    def n_series(self) -> int:
        return len(self.series_ids)

    @property
    def n_weeks(self) -> int:
        if self.frame.empty:
            return 0
        return int(self.frame.groupby("series_id")["week"].size().min())

    @property
    def feature_names(self) -> list[str]:
        return [c for c in self.frame.columns if c not in KEY_COLUMNS]

    def demand_matrix(self) -> np.ndarray:
        """(n_series, n_weeks) array of demand."""
        wide = self.frame.pivot(index="series_id", columns="week", values="demand")
        return wide.to_numpy(dtype=float)

    def feature_tensor(self) -> np.ndarray:
        """(n_series, n_weeks, n_features) array of the feature columns."""
        names = self.feature_names
        values = self.frame[names].to_numpy(dtype=float)
        return values.reshape(self.n_series, -1, len(names))


class SeriesBatch(BaseModel):
    """Input windows of k feature steps and target windows of g demand steps."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    inputs: np.ndarray
    targets: np.ndarray

    @field_validator("inputs")
    @classmethod
    def _check_inputs(cls, inputs: np.ndarray) -> np.ndarray:
        inputs = np.array(inputs, dtype=float)
        if inputs.ndim != 3:
            raise ValueError(f"inputs must be (N, k, F), got {inputs.shape}")
        if not np.all(np.isfinite(inputs)):
            raise ValueError("inputs contain NaN or Inf")
        inputs.setflags(write=False)
        return inputs

    @field_validator("targets")
    @classmethod
    def _check_targets(cls, targets: np.ndarray) -> np.ndarray:
        targets = np.array(targets, dtype=float)
        if targets.ndim != 2:
            raise ValueError(f"targets must be (N, g), got {targets.shape}")
        if np.any(targets < 0) or not np.all(np.isfinite(targets)):
            raise ValueError("targets must be finite and nonnegative")
        targets.setflags(write=False)
        return targets

    @model_validator(mode="after")
    def _check_rows(self) -> "SeriesBatch":
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise ValueError("inputs and targets must hold the same number of windows")
        return self

    def __len__(self) -> int:
        return int(self.targets.shape[0])

    @property
    def flat_inputs(self) -> np.ndarray:
        return self.inputs.reshape(len(self), -1)


def _lifecycle(spec: GenSpec) -> tuple[np.ndarray, np.ndarray]:
    t = np.arange(spec.weeks, dtype=float)
    growth_end = spec.growth_fraction * spec.weeks
    decline_start = spec.decline_fraction * spec.weeks
    curve = np.ones(spec.weeks)
    growing = t < growth_end
    curve[growing] = 1.0 / (1.0 + np.exp(-10.0 * (t[growing] / growth_end - 0.5)))
    declining = t >= decline_start
    decay = max(spec.weeks - decline_start, 1.0) / 3.0
    curve[declining] = np.exp(-(t[declining] - decline_start) / decay)
    phase = np.full(spec.weeks, PHASE_MATURITY)
    phase[growing] = PHASE_GROWTH
    phase[declining] = PHASE_DECLINE
    return curve, phase


def _intermittent(spec: GenSpec, rng: np.random.Generator) -> np.ndarray:
    occurs = rng.random(spec.weeks) < spec.occurrence_p
    sizes = np.maximum(1.0, np.round(rng.lognormal(spec.size_mu, spec.size_sigma, spec.weeks)))
    return np.where(occurs, sizes, 0.0)


def _smooth(spec: GenSpec, rng: np.random.Generator, curve: np.ndarray) -> np.ndarray:
    offset = rng.uniform(0.0, 2.0 * np.pi)
    season = 1.0 + spec.seasonal_amplitude * np.sin(
        2.0 * np.pi * np.arange(spec.weeks) / WEEKS_PER_YEAR + offset
    )
    noise = 1.0 + spec.noise * rng.standard_normal(spec.weeks)
    scale = spec.level * rng.lognormal(0.0, 0.3)
    return np.round(np.clip(scale * curve * season * noise, 0.0, None))


def _zero_run(demand: np.ndarray) -> np.ndarray:
    """Consecutive weeks without demand up to and including each week."""
    runs = np.zeros(len(demand))
    count = 0
    for i, value in enumerate(demand):
        count = count + 1 if value == 0 else 0
        runs[i] = count
    return runs


def build_features(demand: np.ndarray, phase: np.ndarray) -> dict[str, np.ndarray]:
    """Per-week features of one series, keyed like FEATURE_COLUMNS."""
    week_of_year = np.arange(len(demand)) % WEEKS_PER_YEAR
    angle = 2.0 * np.pi * week_of_year / WEEKS_PER_YEAR
    return {
        "log_demand": np.log1p(demand),
        "zero_run": _zero_run(demand),
        "week_sin": np.sin(angle),
        "week_cos": np.cos(angle),
        "phase": phase.astype(float),
    }


def generate(spec: GenSpec) -> DemandPanel:
    """Draw a panel of synthetic weekly demand; deterministic per spec."""
    rng = np.random.default_rng(spec.seed)
    curve, phase = _lifecycle(spec)
    if spec.demand_class == "mixed":
        intermittent = rng.random(spec.n_series) < spec.intermittent_share
    else:
        intermittent = np.full(spec.n_series, spec.demand_class == "intermittent")

    frames = []
    width = len(str(spec.n_series))
    for n in range(spec.n_series):
        demand = _intermittent(spec, rng) if intermittent[n] else _smooth(spec, rng, curve)
        frame = pd.DataFrame(
            {
                "series_id": f"p{n + 1:0{width}d}",
                "week": np.arange(spec.weeks),
                "demand": demand,
                **build_features(demand, phase),
            }
        )
        frames.append(frame)

    panel = DemandPanel(frame=pd.concat(frames, ignore_index=True))
    logger.info(
        "Generated demand panel",
        series=spec.n_series,
        weeks=spec.weeks,
        intermittent=int(intermittent.sum()),
        seed=spec.seed,
    )
    return panel


def classify_demand(demand: np.ndarray) -> Literal["intermittent", "non-intermittent"]:
    """Classify a series by its mean inter-demand interval (ADI cut-off 1.32)."""
    occurrences = np.flatnonzero(np.asarray(demand) > 0)
    if len(occurrences) < 2:
        return "intermittent"
    adi = float(np.mean(np.diff(occurrences)))
    return "intermittent" if adi >= ADI_CUTOFF else "non-intermittent"


def split_weeks(weeks: int, ratios: tuple[int, int, int] = (8, 1, 1)) -> tuple[range, range, range]:
    """Contiguous train, validation and test week ranges in the given proportions."""
    if weeks < 3 or any(r <= 0 for r in ratios):
        raise ContractViolationError(f"cannot split {weeks} weeks with ratios {ratios}")
    total = sum(ratios)
    train_end = int(round(weeks * ratios[0] / total))
    val_end = int(round(weeks * (ratios[0] + ratios[1]) / total))
    return range(0, train_end), range(train_end, val_end), range(val_end, weeks)


def make_windows(
    panel: DemandPanel,
    k: int,
    g: int,
    split: Literal["train", "validation", "test"] = "train",
    stride: int = 1,
    ratios: tuple[int, int, int] = (8, 1, 1),
) -> SeriesBatch:
    """Cut input/target windows whose targets fall entirely inside one split.

    Input weeks may precede the split; target weeks never leave it.
    """
    if k < 1 or g < 1 or stride < 1:
        raise ContractViolationError("k, g and stride must be positive")
    demand = panel.demand_matrix()
    features = panel.feature_tensor()
    index = ("train", "validation", "test").index(split)
    weeks = split_weeks(panel.n_weeks, ratios)[index]

    inputs, targets = [], []
    first_target = max(weeks.start, k)
    for start in range(first_target, weeks.stop - g + 1, stride):
        inputs.append(features[:, start - k : start, :])
        targets.append(demand[:, start : start + g])
    if not inputs:
        raise ContractViolationError(
            f"{split} split ({len(weeks)} weeks) is too short for k={k}, g={g}"
        )
    return SeriesBatch(inputs=np.concatenate(inputs), targets=np.concatenate(targets))


def write_csv(panel: DemandPanel, path: Path) -> None:
    """Write the panel with numbers as 9-significant-digit decimal text."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    panel.frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def _parser_line(error: Exception) -> int:
    match = re.search(r"line (\d+)", str(error))
    return int(match.group(1)) if match else 0


def read_csv(path: Path) -> DemandPanel:
    """Read a panel file, reporting the first malformed row by its line number."""
    try:
        raw = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError as e:
        raise DataFormatError("file has no header row", line=1) from e
    except pd.errors.ParserError as e:
        raise DataFormatError("wrong number of fields", line=_parser_line(e), detail=str(e)) from e

    missing = [c for c in KEY_COLUMNS if c not in raw.columns]
    if missing:
        raise DataFormatError(f"header lacks columns {missing}", line=1)

    frame = pd.DataFrame({"series_id": raw["series_id"]})
    for column in raw.columns:
        if column == "series_id":
            continue
        values = pd.to_numeric(raw[column], errors="coerce")
        bad = values.isna() | ~np.isfinite(values.to_numpy(dtype=float))
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise DataFormatError(
                f"column {column!r} is not a finite number", line=row + 2, detail=raw[column].iloc[row]
            )
        if column == "week":
            fractional = np.flatnonzero((values != np.floor(values)).to_numpy())
            if len(fractional):
                row = int(fractional[0])
                raise DataFormatError("week is not an integer", line=row + 2, detail=raw[column].iloc[row])
            frame[column] = values.astype(int)
        else:
            frame[column] = values.astype(float)

    negative = np.flatnonzero(frame["demand"].to_numpy() < 0)
    if len(negative):
        row = int(negative[0])
        raise DataFormatError("negative demand", line=row + 2, detail=frame["demand"].iloc[row])
    duplicated = np.flatnonzero(frame.duplicated(["series_id", "week"]).to_numpy())
    if len(duplicated):
        raise DataFormatError("duplicate series/week row", line=int(duplicated[0]) + 2)
    present = frame.pivot(index="series_id", columns="week", values="demand").notna()
    if not present.to_numpy().all():
        series = present.index[~present.all(axis=1)][0]
        row = int(np.flatnonzero((frame["series_id"] == series).to_numpy())[0])
        raise DataFormatError("series does not cover every week of the panel", line=row + 2, detail=series)

    return DemandPanel(frame=frame)
