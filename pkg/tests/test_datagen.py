"""Tests for the synthetic demand generator and the panel file format."""

import numpy as np
import pytest
from pydantic import ValidationError

from src.core.exceptions import ContractViolationError, DataFormatError
from src.forecasting.datagen import (
    FEATURE_COLUMNS,
    GenSpec,
    SeriesBatch,
    classify_demand,
    generate,
    make_windows,
    read_csv,
    split_weeks,
    write_csv,
)


@pytest.fixture
def small_spec():
    """Desk-scale panel settings with 8-week windows."""
    return GenSpec(seed=7, n_series=6, weeks=120, input_weeks=8, horizon_weeks=8)


@pytest.fixture
def panel(small_spec):
    return generate(small_spec)


def test_generate_shape(panel):
    assert len(panel.frame) == 6 * 120
    assert panel.n_series == 6
    assert panel.n_weeks == 120
    assert panel.feature_names == list(FEATURE_COLUMNS)
    assert panel.series_ids[0] == "p1"


def test_generate_is_deterministic(small_spec):
    first = generate(small_spec).frame
    second = generate(small_spec).frame

    assert first.equals(second)


def test_generate_demand_is_nonnegative(panel):
    assert (panel.frame["demand"] >= 0).all()


def test_generate_constant_series():
    """Test that p=1 with a degenerate size distribution gives a constant series."""
    spec = GenSpec(
        n_series=2, weeks=60, demand_class="intermittent", occurrence_p=1.0, size_sigma=0.0,
        input_weeks=8, horizon_weeks=8,
    )

    demand = generate(spec).demand_matrix()

    assert np.all(demand == round(np.e))


def test_generate_occurrence_rate():
    """Test that the weekly occurrence frequency matches p over 10,000 weeks."""
    spec = GenSpec(seed=3, n_series=1, weeks=10_000, demand_class="intermittent", occurrence_p=0.3)

    demand = generate(spec).demand_matrix()[0]

    assert abs(np.mean(demand > 0) - 0.3) <= 0.05


def test_generate_non_intermittent_class():
    spec = GenSpec(seed=1, n_series=4, weeks=104, demand_class="non-intermittent")

    panel = generate(spec)

    assert all(classify_demand(row) == "non-intermittent" for row in panel.demand_matrix())


def test_gen_spec_requires_room_for_windows():
    with pytest.raises(ValidationError):
        GenSpec(weeks=40, input_weeks=26, horizon_weeks=26)


def test_zero_run_feature(panel):
    """Test that zero_run counts consecutive weeks without demand."""
    demand = panel.demand_matrix()[0]
    runs = panel.feature_tensor()[0, :, FEATURE_COLUMNS.index("zero_run")]

    for week in range(1, len(demand)):
        expected = runs[week - 1] + 1 if demand[week] == 0 else 0
        assert runs[week] == expected


@pytest.mark.parametrize(
    "demand, expected",
    [
        ([1, 1, 1, 1], "non-intermittent"),
        ([1, 0, 0, 1, 0, 0, 1], "intermittent"),
        ([0, 0, 5, 0], "intermittent"),
    ],
)
def test_classify_demand(demand, expected):
    assert classify_demand(np.array(demand)) == expected


def test_split_weeks():
    """Test the contiguous 8:1:1 split."""
    train, validation, test = split_weeks(120)

    assert (train, validation, test) == (range(0, 96), range(96, 108), range(108, 120))


def test_make_windows_stays_inside_split(panel):
    """Test that validation targets never leave the validation weeks."""
    demand = panel.demand_matrix()

    batch = make_windows(panel, k=8, g=8, split="validation")

    # Targets start at weeks 96..100, one window per series each.
    assert len(batch) == 5 * panel.n_series
    assert batch.inputs.shape == (5 * panel.n_series, 8, len(FEATURE_COLUMNS))
    assert np.array_equal(batch.targets[: panel.n_series], demand[:, 96:104])
    assert np.array_equal(batch.targets[-panel.n_series :], demand[:, 100:108])


def test_make_windows_split_too_short(panel):
    with pytest.raises(ContractViolationError):
        make_windows(panel, k=8, g=20, split="test")


def test_series_batch_rejects_negative_targets():
    with pytest.raises(ValidationError):
        SeriesBatch(inputs=np.zeros((1, 2, 1)), targets=[[-1.0, 0.0]])


def test_csv_round_trip(tmp_path):
    panel = generate(GenSpec(seed=2, n_series=3, weeks=60, input_weeks=8, horizon_weeks=8))
    path = tmp_path / "demand.csv"

    write_csv(panel, path)
    loaded = read_csv(path)

    assert list(loaded.frame.columns) == list(panel.frame.columns)
    assert loaded.series_ids == panel.series_ids
    np.testing.assert_allclose(loaded.demand_matrix(), panel.demand_matrix(), atol=1e-9)
    np.testing.assert_allclose(loaded.feature_tensor(), panel.feature_tensor(), rtol=1e-8, atol=1e-9)


def test_csv_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("series_id,week,demand\n")

    panel = read_csv(path)

    assert panel.n_series == 0
    assert panel.n_weeks == 0


def test_csv_negative_demand(tmp_path):
    """Test that a negative demand is reported with its line number."""
    path = tmp_path / "bad.csv"
    path.write_text("series_id,week,demand\np1,0,3\np1,1,-2\n")

    with pytest.raises(DataFormatError) as exc_info:
        read_csv(path)

    assert exc_info.value.line == 3
    assert "line 3" in str(exc_info.value)


def test_csv_non_numeric(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("series_id,week,demand\np1,0,3\np1,1,2\np1,2,lots\n")

    with pytest.raises(DataFormatError) as exc_info:
        read_csv(path)

    assert exc_info.value.line == 4


def test_csv_wrong_field_count(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("series_id,week,demand\np1,0,3\np1,1,2,9\n")

    with pytest.raises(DataFormatError) as exc_info:
        read_csv(path)

    assert exc_info.value.line == 3


def test_csv_missing_columns(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("series_id,demand\np1,3\n")

    with pytest.raises(DataFormatError) as exc_info:
        read_csv(path)

    assert exc_info.value.line == 1


def test_csv_duplicate_rows(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("series_id,week,demand\np1,0,3\np1,0,4\n")

    with pytest.raises(DataFormatError) as exc_info:
        read_csv(path)

    assert exc_info.value.line == 3


def test_csv_fractional_week(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("series_id,week,demand\np1,0,3\np1,1,2\np1,3.7,4\n")

    with pytest.raises(DataFormatError) as exc_info:
        read_csv(path)

    assert exc_info.value.line == 4
    assert exc_info.value.detail == "3.7"


def test_csv_ragged_panel(tmp_path):
    """Test that a series missing weeks the others have is reported at its first row."""
    path = tmp_path / "bad.csv"
    path.write_text("series_id,week,demand\np1,0,3\np1,1,2\np1,2,4\np2,0,1\np2,1,1\n")

    with pytest.raises(DataFormatError) as exc_info:
        read_csv(path)

    assert exc_info.value.line == 5
    assert exc_info.value.detail == "p2"
