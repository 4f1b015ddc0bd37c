from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from src.task.synthetic import (
    BIMODAL_AMPLITUDES,
    DipPlan,
    SyntheticSpec,
    components_peaking_at,
    generate_synthetic,
    three_level_spec,
)
from src.utils.series_io import MonthStamp, RainfallSeries, dump_series

DATA_DIR = Path(__file__).parent / "data"
START = MonthStamp(1991, 1)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240101)


@pytest.fixture
def bimodal_spec() -> SyntheticSpec:
    return SyntheticSpec(
        components=components_peaking_at(BIMODAL_AMPLITUDES, 6, START),
        noise_sigma=5.0,
        length=312,
        baseline=300.0,
        seed=7,
        start=START,
        dips=DipPlan(5, 16, 3, 150.0),
    )


@pytest.fixture
def bimodal_series(bimodal_spec: SyntheticSpec) -> RainfallSeries:
    s, _ = generate_synthetic(bimodal_spec)
    return s


@pytest.fixture
def bimodal_csv(tmp_path: Path, bimodal_series: RainfallSeries) -> Path:
    path = tmp_path / "input" / "bimodal.csv"
    dump_series(bimodal_series, path)
    return path


@pytest.fixture
def constant_csv(tmp_path: Path) -> Path:
    path = tmp_path / "input" / "constant.csv"
    dump_series(RainfallSeries(START, np.full(36, 250.0)), path)
    return path


@pytest.fixture
def three_level_series() -> RainfallSeries:
    s, _ = generate_synthetic(three_level_spec())
    return s
