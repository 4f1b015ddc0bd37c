"""Noise estimation, fixed-form thresholding and significant-level selection."""

from __future__ import annotations

import logging
import math
from enum import Enum
from typing import NamedTuple

import numpy as np
from prettytable import PrettyTable

from src.task.dwt import BoundaryMode, Decomposition, wavedec, waverec
from src.task.filters import WaveletFilter

logger = logging.getLogger(__name__)

MAD_CONSISTENCY = 0.6745


class ThresholdRule(Enum):
    """Threshold selection rule."""

    FIXED_FORM = "fixed-form"


class ThresholdMethod(Enum):
    """How coefficients below the threshold are treated."""

    HARD = "hard"
    SOFT = "soft"


class NoiseModel(Enum):
    """Where the noise scale is estimated.

    SINGLE uses the level-1 details for every level. PER_LEVEL estimates a scale
    for each level, which handles non-white noise.
    """

    SINGLE = "single"
    PER_LEVEL = "per-level"


class LambdaCount(Enum):
    """Which coefficient count enters the fixed-form threshold."""

    GLOBAL = "global"
    PER_LEVEL = "per-level"


class ShrinkagePlan(NamedTuple):
    """Thresholding choices applied by `denoise`."""

    rule: ThresholdRule = ThresholdRule.FIXED_FORM
    method: ThresholdMethod = ThresholdMethod.HARD
    noise_model: NoiseModel = NoiseModel.PER_LEVEL
    keep_approx: bool = True
    lambda_count: LambdaCount = LambdaCount.GLOBAL
    min_survivors: int = 1


class LevelShrinkage(NamedTuple):
    """Thresholding outcome for one detail level."""

    level: int
    sigma: float
    lam: float
    total: int
    surviving: int
    max_abs: float
    significant: bool = False

    def to_dict(self) -> dict:
        """JSON row `{level, sigma, lambda, total, surviving, significant}`."""
        return {
            "level": self.level,
            "sigma": self.sigma,
            "lambda": self.lam,
            "total": self.total,
            "surviving": self.surviving,
            "max_abs": self.max_abs,
            "significant": self.significant,
        }


class ShrinkageReport(NamedTuple):
    """Per-level noise scales, thresholds and survivor counts."""

    levels: tuple[LevelShrinkage, ...]
    highest_significant_level: int = 0

    @property
    def surviving(self) -> list[int]:
        """Surviving coefficient count per level."""
        return [row.surviving for row in self.levels]

    @property
    def significant(self) -> list[bool]:
        """Significance flag per level."""
        return [row.significant for row in self.levels]

    def significant_level_numbers(self) -> list[int]:
        """Levels flagged significant, ascending."""
        return [row.level for row in self.levels if row.significant]

    def to_rows(self) -> list[dict]:
        """Serialize to a list of JSON rows."""
        return [row.to_dict() for row in self.levels]

    def pretty_print(self) -> None:
        """Print table representation of ShrinkageReport."""
        table = PrettyTable()
        table.title = "Fixed-form thresholding"
        table.field_names = ["Level", "Sigma", "Lambda", "Surviving", "Significant"]

        for row in self.levels:
            table.add_row(
                [
                    row.level,
                    f"{row.sigma:.4f}",
                    f"{row.lam:.4f}",
                    f"{row.surviving}/{row.total}",
                    "yes" if row.significant else "no",
                ],
            )

        print(table)
        print(f"Highest significant level: {self.highest_significant_level}")


class DenoiseResult(NamedTuple):
    """Output of `denoise`."""

    denoised: np.ndarray
    report: ShrinkageReport
    thresholded: Decomposition
    original: Decomposition


def estimate_sigma_mad(detail: np.ndarray) -> float:
    """Robust noise scale median(|detail|) / 0.6745.

    Raises:
        ValueError: for an empty vector.

    """
    detail = np.asarray(detail, dtype=float)
    if detail.size == 0:
        msg = "cannot estimate noise from an empty coefficient vector"
        raise ValueError(msg)
    return float(np.median(np.abs(detail))) / MAD_CONSISTENCY


def fixed_form_lambda(n: int, sigma: float) -> float:
    """Universal threshold sigma * sqrt(2 ln n).

    Raises:
        ValueError: if `n` < 1 or `sigma` < 0.

    """
    if n < 1:
        msg = f"coefficient count must be at least 1, got {n}"
        raise ValueError(msg)
    if sigma < 0:
        msg = f"sigma must be non-negative, got {sigma}"
        raise ValueError(msg)
    return sigma * math.sqrt(2.0 * math.log(n))


def apply_threshold(
    coeffs: np.ndarray,
    lam: float,
    method: ThresholdMethod = ThresholdMethod.HARD,
) -> np.ndarray:
    """Threshold coefficients.

    Hard keeps c when |c| > lam and zeroes it otherwise; soft maps c to
    sign(c) * max(|c| - lam, 0).

    Raises:
        ValueError: for a negative threshold.

    """
    if lam < 0:
        msg = f"threshold must be non-negative, got {lam}"
        raise ValueError(msg)
    coeffs = np.asarray(coeffs, dtype=float)
    if method is ThresholdMethod.HARD:
        return np.where(np.abs(coeffs) > lam, coeffs, 0.0)
    return np.sign(coeffs) * np.maximum(np.abs(coeffs) - lam, 0.0)


def significant_levels(report: ShrinkageReport, min_survivors: int) -> ShrinkageReport:
    """Flag levels with at least `min_survivors` surviving coefficients.

    Returns:
        ShrinkageReport: copy with `significant` flags and the highest such level.

    """
    levels = tuple(
        row._replace(significant=row.surviving >= min_survivors)
        for row in report.levels
    )
    highest = max((row.level for row in levels if row.significant), default=0)
    return ShrinkageReport(levels, highest)


def denoise(
    x: np.ndarray,
    f: WaveletFilter,
    b: BoundaryMode,
    depth: int,
    plan: ShrinkagePlan | None = None,
) -> DenoiseResult:
    """Decompose, threshold every detail level and reconstruct.

    Args:
        x (np.ndarray): signal to denoise.
        f (WaveletFilter): filter bank.
        b (BoundaryMode): boundary handling.
        depth (int): decomposition depth J.
        plan (ShrinkagePlan | None, optional): thresholding choices. Defaults to
            hard fixed-form thresholding with per-level noise.

    Returns:
        DenoiseResult: denoised signal, report, thresholded and
            original decompositions.

    """
    plan = ShrinkagePlan() if plan is None else plan
    d = wavedec(x, f, b, depth)

    logger.info("Thresholding %d levels...", d.depth)
    if plan.noise_model is NoiseModel.SINGLE:
        sigmas = [estimate_sigma_mad(d.details[0])] * d.depth
    else:
        sigmas = [estimate_sigma_mad(detail) for detail in d.details]

    rows, kept = [], []
    for level, (detail, sigma) in enumerate(zip(d.details, sigmas), start=1):
        n_ref = d.original_length
        if plan.lambda_count is LambdaCount.PER_LEVEL:
            n_ref = len(detail)
        lam = fixed_form_lambda(n_ref, sigma)
        kept.append(apply_threshold(detail, lam, plan.method))
        rows.append(
            LevelShrinkage(
                level=level,
                sigma=sigma,
                lam=lam,
                total=len(detail),
                surviving=int(np.count_nonzero(np.abs(detail) > lam)),
                max_abs=float(np.max(np.abs(detail))),
            ),
        )

    approx = d.approx
    if not plan.keep_approx:
        approx = apply_threshold(approx, rows[-1].lam, plan.method)

    thresholded = d.with_coefficients(approx, kept)
    report = significant_levels(ShrinkageReport(tuple(rows)), plan.min_survivors)
    logger.info(
        "...thresholding done, highest significant level %d",
        report.highest_significant_level,
    )
    return DenoiseResult(waverec(thresholded), report, thresholded, d)
