from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from src.task.dwt import BoundaryMode, wavedec
from src.task.filters import make_filter
from src.task.shrinkage import (
    LambdaCount,
    LevelShrinkage,
    NoiseModel,
    ShrinkagePlan,
    ShrinkageReport,
    ThresholdMethod,
    apply_threshold,
    denoise,
    estimate_sigma_mad,
    fixed_form_lambda,
    significant_levels,
)

HAAR = make_filter("haar")
COEFFS = arrays(np.float64, st.integers(1, 64), elements=st.floats(-1e3, 1e3))
R2 = math.sqrt(0.5)


class TestSigma:
    def test_examples(self):
        coeffs = np.array([0.6745, -0.6745, 0.6745])
        assert estimate_sigma_mad(coeffs) == pytest.approx(1.0)
        assert estimate_sigma_mad(np.zeros(3)) == 0

    def test_monte_carlo_consistency(self):
        draws = np.random.default_rng(5).standard_normal(100_000)
        assert 0.98 <= estimate_sigma_mad(draws) <= 1.02

    def test_empty(self):
        with pytest.raises(ValueError, match="empty"):
            estimate_sigma_mad(np.array([]))


class TestLambda:
    def test_examples(self):
        assert fixed_form_lambda(1, 1.0) == 0
        assert fixed_form_lambda(500, 0.0) == 0
        assert fixed_form_lambda(312, 1.0) == pytest.approx(3.3891, abs=1e-4)

    @pytest.mark.parametrize(("n", "sigma"), [(0, 1.0), (10, -0.1)])
    def test_invalid(self, n: int, sigma: float):
        with pytest.raises(ValueError, match="must be"):
            fixed_form_lambda(n, sigma)


class TestApplyThreshold:
    def test_hard_and_soft(self):
        coeffs = np.array([3.0, -1.0, 0.5])
        np.testing.assert_array_equal(apply_threshold(coeffs, 2.0), [3.0, 0.0, 0.0])
        np.testing.assert_array_equal(
            apply_threshold(coeffs, 2.0, ThresholdMethod.SOFT),
            [1.0, 0.0, 0.0],
        )

    def test_zero_threshold_is_identity(self, rng):
        coeffs = rng.normal(size=50)
        coeffs[::7] = 0.0
        np.testing.assert_array_equal(apply_threshold(coeffs, 0.0), coeffs)

    def test_soft_shrinks_toward_zero(self):
        out = apply_threshold(np.array([-5.0, 5.0]), 1.5, ThresholdMethod.SOFT)
        np.testing.assert_array_equal(out, [-3.5, 3.5])

    def test_negative_threshold(self):
        with pytest.raises(ValueError, match="non-negative"):
            apply_threshold(np.ones(2), -1.0)

    @given(COEFFS, st.floats(0, 1e3), st.floats(0, 1e3))
    def test_survivors_fall_as_threshold_grows(self, coeffs, lam, extra):
        low = np.count_nonzero(apply_threshold(coeffs, lam))
        high = np.count_nonzero(apply_threshold(coeffs, lam + extra))
        assert high <= low

    @given(COEFFS, st.floats(0.001, 1e3), st.sampled_from(ThresholdMethod))
    def test_threshold_above_max_zeroes_everything(self, coeffs, margin, method):
        lam = float(np.max(np.abs(coeffs))) + margin
        assert not np.any(apply_threshold(coeffs, lam, method))

    @given(COEFFS, st.floats(0, 1e3))
    def test_hard_is_idempotent(self, coeffs, lam):
        once = apply_threshold(coeffs, lam)
        np.testing.assert_array_equal(apply_threshold(once, lam), once)

    @given(COEFFS, st.floats(0, 1e3))
    def test_soft_never_exceeds_hard(self, coeffs, lam):
        soft = apply_threshold(coeffs, lam, ThresholdMethod.SOFT)
        hard = apply_threshold(coeffs, lam, ThresholdMethod.HARD)
        assert np.all(np.abs(soft) <= np.abs(hard))


def _report(survivors: list[int]) -> ShrinkageReport:
    return ShrinkageReport(
        tuple(
            LevelShrinkage(j, 1.0, 1.0, 100, s, 2.0)
            for j, s in enumerate(survivors, start=1)
        ),
    )


class TestSignificantLevels:
    def test_table_counts(self):
        report = significant_levels(_report([59, 44, 18, 0]), 1)
        assert report.significant == [True, True, True, False]
        assert report.highest_significant_level == 3
        assert report.significant_level_numbers() == [1, 2, 3]

    @pytest.mark.parametrize(
        ("survivors", "minimum"),
        [([0, 0], 1), ([5, 5], 6)],
    )
    def test_nothing_significant(self, survivors: list[int], minimum: int):
        report = significant_levels(_report(survivors), minimum)
        assert report.highest_significant_level == 0

    def test_rows_and_table(self, capsys):
        report = significant_levels(_report([3, 0]), 1)
        rows = report.to_rows()
        assert rows[0]["lambda"] == 1.0
        assert rows[0]["significant"] is True
        report.pretty_print()
        out = capsys.readouterr().out
        assert "Fixed-form thresholding" in out
        assert "Highest significant level: 1" in out


def _haar_forward(x: list[float]) -> tuple[list[float], list[float]]:
    approx, detail = [], []
    for k in range(len(x) // 2):
        approx.append((x[2 * k] + x[2 * k + 1]) * R2)
        detail.append((x[2 * k] - x[2 * k + 1]) * R2)
    return approx, detail


def _haar_inverse(approx: list[float], detail: list[float]) -> list[float]:
    out = []
    for a, d in zip(approx, detail):
        out.extend([(a + d) * R2, (a - d) * R2])
    return out


def _straight_line_denoise(x: list[float], depth: int) -> list[float]:
    n = len(x)
    approx, details = list(x), []
    for _ in range(depth):
        approx, detail = _haar_forward(approx)
        details.append(detail)
    kept = []
    for detail in details:
        sigma = sorted(abs(c) for c in detail)
        m = len(sigma)
        median = sigma[m // 2] if m % 2 else (sigma[m // 2 - 1] + sigma[m // 2]) / 2
        lam = median / 0.6745 * math.sqrt(2 * math.log(n))
        kept.append([c if abs(c) > lam else 0.0 for c in detail])
    signal = approx
    for detail in reversed(kept):
        signal = _haar_inverse(signal, detail)
    return signal


def test_denoise_matches_straight_line_oracle():
    for seed in range(50):
        x = np.random.default_rng(seed).normal(0, 1, 64)
        x[10] += 8.0
        result = denoise(x, HAAR, BoundaryMode.PERIODIC, 4)
        expected = _straight_line_denoise(x.tolist(), 4)
        np.testing.assert_allclose(result.denoised, expected, rtol=0, atol=1e-12)


def test_constant_input_is_returned():
    x = np.full(64, 300.0)
    result = denoise(x, HAAR, BoundaryMode.PERIODIC, 4)
    np.testing.assert_allclose(result.denoised, x, rtol=0, atol=1e-9)
    assert result.report.highest_significant_level == 0
    assert all(row.lam == 0 for row in result.report.levels)


def test_scaling_is_equivariant(rng):
    x = rng.normal(0, 1, 128)
    x[40] += 10
    one = denoise(x, HAAR, BoundaryMode.PERIODIC, 4)
    two = denoise(2.0 * x, HAAR, BoundaryMode.PERIODIC, 4)
    np.testing.assert_allclose(two.denoised, 2.0 * one.denoised, atol=1e-12)
    assert two.report.surviving == one.report.surviving


def test_spike_survives_at_level_one(rng):
    x = rng.normal(0, 1, 64)
    x[10] += 50.0
    result = denoise(x, HAAR, BoundaryMode.PERIODIC, 4)
    assert result.report.levels[0].surviving >= 1
    assert result.report.levels[0].significant


def test_noise_models(rng):
    x = rng.normal(0, 1, 128)
    single = denoise(
        x,
        HAAR,
        BoundaryMode.PERIODIC,
        3,
        ShrinkagePlan(noise_model=NoiseModel.SINGLE),
    )
    sigmas = [row.sigma for row in single.report.levels]
    d1 = wavedec(x, HAAR, BoundaryMode.PERIODIC, 1).details[0]
    assert sigmas == [estimate_sigma_mad(d1)] * 3

    per_level = denoise(x, HAAR, BoundaryMode.PERIODIC, 3)
    d = wavedec(x, HAAR, BoundaryMode.PERIODIC, 3)
    assert [row.sigma for row in per_level.report.levels] == [
        estimate_sigma_mad(c) for c in d.details
    ]


def test_lambda_count_per_level(rng):
    x = rng.normal(0, 1, 128)
    result = denoise(
        x,
        HAAR,
        BoundaryMode.PERIODIC,
        2,
        ShrinkagePlan(lambda_count=LambdaCount.PER_LEVEL),
    )
    for row in result.report.levels:
        assert row.lam == pytest.approx(fixed_form_lambda(row.total, row.sigma))
    assert [row.total for row in result.report.levels] == [64, 32]


def test_thresholded_decomposition_is_reported(rng):
    x = rng.normal(0, 1, 64)
    result = denoise(x, HAAR, BoundaryMode.PERIODIC, 2)
    for row, before, after in zip(
        result.report.levels,
        result.original.details,
        result.thresholded.details,
    ):
        np.testing.assert_array_equal(after, apply_threshold(before, row.lam))
    np.testing.assert_array_equal(result.original.approx, result.thresholded.approx)


def test_clean_cosine_leaves_no_survivors():
    # the MAD estimate follows the tone itself, so nothing clears lambda
    t = np.arange(312)
    x = 300.0 + 100.0 * np.cos(2 * np.pi * t / 6)
    result = denoise(x, HAAR, BoundaryMode.PERIODIC, 4)
    assert [row.surviving for row in result.report.levels] == [0, 0, 0, 0]
    assert result.report.highest_significant_level == 0
    max_abs = [row.max_abs for row in result.report.levels]
    assert max_abs == pytest.approx([50 * math.sqrt(2), 150.0, 75 * math.sqrt(2), 75.0])
    assert [row.lam > row.max_abs for row in result.report.levels] == [True] * 4
