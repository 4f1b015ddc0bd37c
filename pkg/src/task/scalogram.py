"""Continuous Haar wavelet transform of a monthly series by exact quadrature.

Each monthly value is constant over its month [x, x + 1), so the integral against
the piecewise-constant Haar kernel reduces to differences of the running sum.
"""

from __future__ import annotations

import logging
import math
from typing import NamedTuple

import numpy as np
import pandas as pd

from src.task.errors import FilterError, ImputationError, LevelRangeError
from src.task.filters import check_admissibility, haar_psi
from src.utils.series_io import RainfallSeries

logger = logging.getLogger(__name__)

HAAR_ANALYTIC = "haar-analytic"
DEFAULT_SCALES = (1, 2, 4, 8, 16)
ADMISSIBILITY_TOL = 1e-12
_KERNEL_SAMPLES = 1024


class ScaleGrid(NamedTuple):
    """Scales a (months, ascending) and translations b (1-based month positions)."""

    scales: tuple[float, ...]
    translations: tuple[float, ...]

    def validate(self) -> None:
        """Raise unless both axes are nonempty and the scales ascend."""
        if not self.scales or not self.translations:
            msg = "scale grid needs at least one scale and one translation"
            raise ValueError(msg)
        scales = np.asarray(self.scales, dtype=float)
        if np.any(np.diff(scales) <= 0):
            msg = "scales must be strictly ascending"
            raise ValueError(msg)
        if scales[0] < 1:
            msg = f"scale {scales[0]} is below one month and covers no sample"
            raise LevelRangeError(msg)


def default_grid(n: int, scales: tuple[float, ...] = DEFAULT_SCALES) -> ScaleGrid:
    """Dyadic scales 1..16 and every month 1..n as translation."""
    return ScaleGrid(tuple(float(a) for a in scales), tuple(range(1, n + 1)))


class ScalogramMatrix(NamedTuple):
    """W[a][b] over a grid. `truncated` marks cells whose support leaves the series."""

    values: np.ndarray
    grid: ScaleGrid
    wavelet: str
    truncated: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        """(number of scales, number of translations)."""
        return self.values.shape

    def to_frame(self) -> pd.DataFrame:
        """One row per scale, one column per translation."""
        df = pd.DataFrame(
            self.values,
            columns=[f"b{b:g}" for b in self.grid.translations],
        )
        df.insert(0, "scale", [f"{a:g}" for a in self.grid.scales])
        return df

    def mean_magnitude(self, *, interior_only: bool = True) -> np.ndarray:
        """Mean |W| per scale, over untruncated cells by default."""
        magnitude = np.abs(self.values)
        if not interior_only:
            return magnitude.mean(axis=1)
        counts = np.maximum((~self.truncated).sum(axis=1), 1)
        return np.where(self.truncated, 0.0, magnitude).sum(axis=1) / counts


def _kernel_residual() -> float:
    dx = 1 / _KERNEL_SAMPLES
    return check_admissibility(haar_psi(np.arange(_KERNEL_SAMPLES) * dx), dx)


def cwt_quadrature(
    s: RainfallSeries,
    grid: ScaleGrid,
    wavelet: str = HAAR_ANALYTIC,
) -> ScalogramMatrix:
    """Compute W(a, b) = (1 / sqrt(a)) * integral f(x) psi((x - b) / a) dx.

    Args:
        s (RainfallSeries): series without MISSING values.
        grid (ScaleGrid): scales and translations to evaluate.
        wavelet (str, optional): kernel; only the analytic Haar is supported.

    Returns:
        ScalogramMatrix: coefficients, with supports past month N + 1 flagged.

    Raises:
        ImputationError: if MISSING values are present.
        LevelRangeError: for a scale below one month.

    """
    if wavelet != HAAR_ANALYTIC:
        msg = f"unsupported continuous wavelet {wavelet!r}"
        raise FilterError(msg)
    if s.has_missing:
        msg = "scalogram needs a series without missing values; impute first"
        raise ImputationError(msg)
    grid.validate()
    if (residual := _kernel_residual()) > ADMISSIBILITY_TOL:
        msg = f"Haar kernel is not zero-mean (residual {residual:.3e})"
        raise FilterError(msg)

    vals = np.asarray(s.values, dtype=float)
    n = len(vals)
    cum = np.concatenate([[0.0], np.cumsum(vals)])

    def running(y: np.ndarray) -> np.ndarray:
        u = np.clip(y - 1.0, 0.0, float(n))
        k = np.minimum(np.floor(u).astype(int), n - 1)
        return cum[k] + (u - k) * vals[k]

    a = np.asarray(grid.scales, dtype=float)[:, None]
    b = np.asarray(grid.translations, dtype=float)[None, :]
    logger.debug("Evaluating %d x %d scalogram cells", a.size, b.size)
    values = (2 * running(b + a / 2) - running(b) - running(b + a)) / np.sqrt(a)
    truncated = (b + a > n + 1) | (b < 1)

    if not np.all(np.isfinite(values)):
        msg = "scalogram produced non-finite values"
        raise ValueError(msg)
    return ScalogramMatrix(values, grid, wavelet, truncated)


def scale_of_max_response(m: ScalogramMatrix) -> float:
    """Scale whose mean interior |W| is largest."""
    return float(m.grid.scales[int(np.argmax(m.mean_magnitude()))])


def parse_scales(text: str) -> tuple[float, ...]:
    """Parse a comma separated scale list such as `1,2,4,8,16`.

    Raises:
        ValueError: for non-numeric or non-positive scales.

    """
    scales = []
    for item in text.replace(" ", "").split(","):
        if not item:
            continue
        value = float(item)
        if not math.isfinite(value) or value <= 0:
            msg = f"scale must be positive, got {item!r}"
            raise ValueError(msg)
        scales.append(value)
    return tuple(sorted(set(scales)))
