"""File persistence for archives, traces and result records."""

import json
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from pydantic import BaseModel

from src.core.models import FrontierArchive, TrainTrace

FLOAT_FORMAT = "%.9g"


def _write_frame(frame: pd.DataFrame, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


class ArchiveRepository:
    """Archive CSV with columns round, w_1..w_T, m_1..m_T."""

    def __init__(self, path: Path) -> None:
        self.path = Path(path)

    @staticmethod
    def to_frame(archive: FrontierArchive) -> pd.DataFrame:
        weights, metrics = archive.weight_matrix(), archive.metric_matrix()
        n = metrics.shape[1] if len(archive) else 0
        frame = pd.DataFrame({"round": [entry.round for entry in archive.entries]})
        for t in range(n):
            frame[f"w_{t + 1}"] = weights[:, t]
        for t in range(n):
            frame[f"m_{t + 1}"] = metrics[:, t]
        return frame

    def save(self, archive: FrontierArchive) -> None:
        _write_frame(self.to_frame(archive), self.path)


class TraceRepository:
    """Trace CSV with columns step, loss_*, metric_*, alpha_*, sq_norm."""

    def __init__(self, path: Path) -> None:
        self.path = Path(path)

    @staticmethod
    def to_frame(trace: TrainTrace) -> pd.DataFrame:
        rows = []
        for record in trace.records:
            row: dict[str, float] = {"step": record.step}
            for prefix, values in (
                ("loss", record.losses),
                ("metric", record.metrics),
                ("alpha", record.alpha),
            ):
                row.update({f"{prefix}_{t + 1}": float(v) for t, v in enumerate(values)})
            row["sq_norm"] = record.sq_norm
            rows.append(row)
        if not rows:
            return pd.DataFrame({"step": pd.Series(dtype=int), "sq_norm": pd.Series(dtype=float)})
        return pd.DataFrame(rows)

    def save(self, trace: TrainTrace) -> None:
        _write_frame(self.to_frame(trace), self.path)


def _jsonable(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"cannot serialise {type(value).__name__}")


def write_json(record: BaseModel | dict[str, Any], path: Path) -> None:
    """Write a record as sorted, indented JSON so reruns are byte-identical."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = record.model_dump(mode="json") if isinstance(record, BaseModel) else record
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n")
