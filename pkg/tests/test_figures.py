from __future__ import annotations

import re

import numpy as np
import pytest

from src.task.dwt import BoundaryMode
from src.task.filters import make_filter
from src.task.periods import Aggregation, ClimatologyProfile
from src.task.scalogram import HAAR_ANALYTIC, ScaleGrid, ScalogramMatrix
from src.task.shrinkage import denoise
from src.utils.figures import (
    render_climatology_svg,
    render_coefficients_svg,
    render_heatmap_svg,
)


def _matrix(values) -> ScalogramMatrix:
    values = np.asarray(values, dtype=float)
    rows, cols = values.shape
    grid = ScaleGrid(
        tuple(float(2**i) for i in range(rows)),
        tuple(float(b) for b in range(1, cols + 1)),
    )
    return ScalogramMatrix(values, grid, HAAR_ANALYTIC, np.zeros(values.shape, bool))


def _cell(svg: str, i: int, j: int) -> str:
    match = re.search(rf'<g id="cell-{i}-{j}">(.*?)</g>', svg, re.DOTALL)
    assert match is not None
    return match.group(1)


class TestHeatmap:
    def test_one_cell(self):
        svg = render_heatmap_svg(_matrix([[3.0]]))
        assert svg.count('id="cell-') == 1

    def test_cell_per_coefficient(self, rng):
        svg = render_heatmap_svg(_matrix(rng.normal(size=(3, 7))))
        assert svg.count('id="cell-') == 21

    def test_luminance_follows_magnitude(self):
        svg = render_heatmap_svg(_matrix([[0.0, -5.0]]))
        assert "#ffffff" in _cell(svg, 0, 1)
        assert "#ffffff" not in _cell(svg, 0, 0)

    def test_deterministic(self, rng):
        m = _matrix(rng.normal(size=(2, 12)))
        assert render_heatmap_svg(m) == render_heatmap_svg(m)

    @pytest.mark.parametrize(
        "values",
        [np.zeros((0, 3)), np.array([[1.0, np.nan]]), np.array([[np.inf]])],
    )
    def test_rejects(self, values: np.ndarray):
        with pytest.raises(ValueError, match="empty|non-finite"):
            render_heatmap_svg(_matrix(values))


def test_climatology_figure():
    values = tuple(float(v) for v in [1, 2, 3, 4, 5, 9, 5, 4, 3, 2, 1, 0])
    profile = ClimatologyProfile(values, Aggregation.MEDIAN, (6,))
    svg = render_climatology_svg(profile)
    assert 'id="climatology"' in svg
    assert 'id="peaks"' in svg
    assert svg == render_climatology_svg(profile)

    flat = ClimatologyProfile((1.0,) * 12, Aggregation.MEAN, ())
    assert 'id="peaks"' not in render_climatology_svg(flat)


def test_coefficients_figure(rng):
    x = rng.normal(300, 40, 96)
    result = denoise(x, make_filter("haar"), BoundaryMode.PERIODIC, 3)
    svg = render_coefficients_svg(result.original, result.thresholded, result.report)
    assert "Detail coefficients and thresholds" in svg
    assert svg == render_coefficients_svg(
        result.original,
        result.thresholded,
        result.report,
    )
