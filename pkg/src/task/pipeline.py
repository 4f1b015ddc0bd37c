"""Run configuration, analysis bundle and artifact writers behind the CLI."""

from __future__ import annotations

import hashlib
import json
import logging
from enum import Enum
from pathlib import Path
from typing import NamedTuple

import numpy as np
import pandas as pd

from src.task.dwt import (
    APPROX,
    BoundaryMode,
    Decomposition,
    reconstruct_component,
    wavedec,
)
from src.task.errors import SeriesParseError
from src.task.filters import make_filter
from src.task.periods import (
    Aggregation,
    BandConvention,
    ClimatologyProfile,
    Episode,
    LevelSummary,
    PeriodCalendar,
    RainfallPattern,
    band_for_level,
    classify_pattern,
    climatology,
    detect_episodes,
    dominant_level,
    level_energies,
    peak_months,
    period_calendar,
    print_level_summaries,
    repeat_interval,
    summaries_frame,
    summarize_levels,
)
from src.task.scalogram import (
    DEFAULT_SCALES,
    ScalogramMatrix,
    cwt_quadrature,
    default_grid,
)
from src.task.shrinkage import (
    DenoiseResult,
    LambdaCount,
    NoiseModel,
    ShrinkagePlan,
    ThresholdMethod,
    denoise,
)
from src.task.synthetic import GroundTruth, SyntheticSpec, generate_synthetic
from src.utils import MONTH_NAMES, TOOL_VERSION
from src.utils.figures import (
    render_climatology_svg,
    render_coefficients_svg,
    render_heatmap_svg,
)
from src.utils.series_io import (
    ImputePolicy,
    RainfallSeries,
    dump_series,
    dump_text,
    impute_missing,
    parse_csv,
)

logger = logging.getLogger(__name__)


def _jsonable(value: object) -> object:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, tuple):
        return list(value)
    return value


class RunConfig(NamedTuple):
    """Resolved options of one run; defaults give four levels, hard thresholds."""

    input: str | None = None
    wavelet: str = "haar"
    depth: int = 4
    boundary: BoundaryMode = BoundaryMode.PERIODIC
    threshold: ThresholdMethod = ThresholdMethod.HARD
    noise: NoiseModel = NoiseModel.PER_LEVEL
    lambda_count: LambdaCount = LambdaCount.GLOBAL
    min_survivors: int = 1
    impute: ImputePolicy = ImputePolicy.FAIL
    convention: BandConvention = BandConvention.PAPER
    aggregation: Aggregation = Aggregation.MEDIAN
    depth_factor: float = 0.5
    scales: tuple[float, ...] = tuple(float(a) for a in DEFAULT_SCALES)
    seed: int | None = None
    out: str = "out"

    @property
    def plan(self) -> ShrinkagePlan:
        """Thresholding choices for `denoise`."""
        return ShrinkagePlan(
            method=self.threshold,
            noise_model=self.noise,
            lambda_count=self.lambda_count,
            min_survivors=self.min_survivors,
        )

    def to_dict(self) -> dict:
        """JSON-safe form of every option except the output directory."""
        return {k: _jsonable(v) for k, v in self._asdict().items() if k != "out"}

    def digest(self) -> str:
        """sha256 of the canonical JSON form."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class AnalysisBundle(NamedTuple):
    """Everything `analyze` derives from one input."""

    config: RunConfig
    input_digest: str
    series: RainfallSeries
    denoised: DenoiseResult
    summaries: list[LevelSummary]
    episodes: dict[int, list[Episode]]
    climatology: ClimatologyProfile
    calendar: PeriodCalendar
    pattern: RainfallPattern
    scalogram: ScalogramMatrix

    @property
    def provenance(self) -> dict:
        """Config, its digest, tool version and input digest."""
        return provenance(self.config, self.input_digest)

    @property
    def peak_months(self) -> list[str]:
        """Months shared by every calendar row, empty without significant levels."""
        if not self.calendar.rows:
            return []
        return [MONTH_NAMES[m - 1] for m in sorted(peak_months(self.calendar))]

    def repeat_intervals(self) -> dict[int, float | None]:
        """Median gap between episode starts, per significant level."""
        return {level: repeat_interval(eps) for level, eps in self.episodes.items()}

    def report(self) -> dict:
        """Content of report.json."""
        d = self.denoised.original
        return {
            "provenance": self.provenance,
            "series": {
                "start": str(self.series.start),
                "end": str(self.series.end),
                "months": len(self.series),
            },
            "shrinkage": self.denoised.report.to_rows(),
            "highest_significant_level": (
                self.denoised.report.highest_significant_level
            ),
            "significant_levels": self.denoised.report.significant_level_numbers(),
            "level_energies": level_energies(d).tolist(),
            "dominant_level": dominant_level(d),
            "level_summaries": [s.to_dict() for s in self.summaries],
            "repeat_intervals": {
                str(k): v for k, v in self.repeat_intervals().items()
            },
            "climatology": self.climatology.to_dict(),
            "calendar": self.calendar.to_dict(),
            "peak_months": self.peak_months,
            "pattern": self.pattern.value,
        }

    def pretty_print(self) -> None:
        """Print the thresholding table, level table and episode narrative."""
        self.denoised.report.pretty_print()
        print_level_summaries(self.summaries)
        for level, eps in self.episodes.items():
            print(f"Level {level}: {len(eps)} low-rainfall episode(s)")
            for e in eps:
                print(f"  lowest rainfall on {e.describe()}")
            interval = repeat_interval(eps)
            if interval is not None:
                print(f"  repeats after {interval:g} months")
        if self.peak_months:
            print(f"Peak months: {', '.join(self.peak_months)}")
        print(f"Rainfall pattern: {self.pattern.value}")


def provenance(cfg: RunConfig, input_digest: str | None) -> dict:
    """Provenance block embedded in every JSON artifact."""
    return {
        "config": cfg.to_dict(),
        "config_digest": cfg.digest(),
        "input_digest": input_digest,
        "tool_version": TOOL_VERSION,
    }


def _dump_json(file: Path, data: dict | list) -> None:
    dump_text(file, json.dumps(data, indent=2, sort_keys=True) + "\n")


def _dump_frame(file: Path, df: pd.DataFrame) -> None:
    dump_text(file, df.to_csv(index=False, lineterminator="\n"))


def load_input(cfg: RunConfig) -> tuple[RainfallSeries, str]:
    """Read, digest, parse and impute the configured input file.

    Returns:
        tuple[RainfallSeries, str]: series without MISSING values and the sha256
        of the raw file bytes.

    """
    if cfg.input is None:
        msg = "no input file given"
        raise FileNotFoundError(msg)
    raw = Path(cfg.input).read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    logger.info("Loading %s...", cfg.input)
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        msg = f"{cfg.input} is not UTF-8 text (byte {e.start})"
        raise SeriesParseError(msg) from e
    s = impute_missing(parse_csv(text), cfg.impute)
    s.check_analysable()
    logger.info("...loaded %d months (%s to %s)", len(s), s.start, s.end)
    return s, digest


def _component_frame(s: RainfallSeries, component: np.ndarray) -> pd.DataFrame:
    df = s.to_frame()
    df["rainfall_mm"] = component
    return df.rename(columns={"rainfall_mm": "component_mm"})


def decompose_series(cfg: RunConfig, s: RainfallSeries) -> Decomposition:
    """Decompose a loaded series with the configured bank, boundary and depth."""
    return wavedec(s.values, make_filter(cfg.wavelet), cfg.boundary, cfg.depth)


def run_decompose(cfg: RunConfig) -> list[Path]:
    """Write decomposition.json and one component CSV per level plus the approximation.

    Returns:
        list[Path]: written files, JSON first.

    """
    s, digest = load_input(cfg)
    logger.info("Decomposing series...")
    d = decompose_series(cfg, s)
    logger.info("...series decomposed!")

    out = Path(cfg.out)
    written = [out / "decomposition.json"]
    _dump_json(
        written[0],
        {"provenance": provenance(cfg, digest), "decomposition": d.to_dict()},
    )
    for level in range(1, d.depth + 1):
        path = out / f"component_d{level}.csv"
        _dump_frame(path, _component_frame(s, reconstruct_component(d, level)))
        written.append(path)
    path = out / f"component_a{d.depth}.csv"
    _dump_frame(path, _component_frame(s, reconstruct_component(d, APPROX)))
    written.append(path)
    return written


def run_analysis(
    cfg: RunConfig,
    s: RainfallSeries,
    input_digest: str,
) -> AnalysisBundle:
    """Denoise, summarise significant levels, find episodes and classify the pattern."""
    logger.info("Thresholding decomposition...")
    result = denoise(
        s.values,
        make_filter(cfg.wavelet),
        cfg.boundary,
        cfg.depth,
        cfg.plan,
    )
    logger.info("...thresholding done!")

    summaries = summarize_levels(
        result.thresholded,
        result.report,
        s,
        cfg.convention,
    )
    logger.info("Detecting episodes...")
    episodes = {
        summary.band.level: detect_episodes(
            reconstruct_component(result.thresholded, summary.band.level),
            summary.band,
            s,
            depth_factor=cfg.depth_factor,
        )
        for summary in summaries
    }
    logger.info("...episodes detected!")

    profile = climatology(s, cfg.aggregation)
    calendar = period_calendar([summary.band.median_period for summary in summaries])
    matrix = cwt_quadrature(s, default_grid(len(s), cfg.scales))

    return AnalysisBundle(
        cfg,
        input_digest,
        s,
        result,
        summaries,
        episodes,
        profile,
        calendar,
        classify_pattern(profile),
        matrix,
    )


def _denoised_frame(s: RainfallSeries, denoised: np.ndarray) -> pd.DataFrame:
    df = s.to_frame()
    df["denoised_mm"] = denoised
    return df


def write_bundle(bundle: AnalysisBundle, out: str | Path) -> list[Path]:
    """Write every artifact of an analysis bundle.

    Returns:
        list[Path]: written files.

    """
    out = Path(out)
    paths = {
        name: out / name
        for name in (
            "table1.csv",
            "table2.csv",
            "episodes.json",
            "climatology.svg",
            "scalogram.svg",
            "coefficients.svg",
            "denoised.csv",
            "report.json",
        )
    }
    result = bundle.denoised
    convention = bundle.config.convention

    _dump_frame(paths["table1.csv"], summaries_frame(bundle.summaries))
    _dump_frame(paths["table2.csv"], bundle.calendar.to_frame())
    _dump_json(
        paths["episodes.json"],
        {
            "provenance": bundle.provenance,
            "levels": [
                {
                    "level": level,
                    "band": band_for_level(level, convention).period_range(),
                    "repeat_interval": repeat_interval(eps),
                    "episodes": [e.to_dict() for e in eps],
                }
                for level, eps in bundle.episodes.items()
            ],
        },
    )
    logger.info("Rendering figures...")
    dump_text(paths["climatology.svg"], render_climatology_svg(bundle.climatology))
    dump_text(paths["scalogram.svg"], render_heatmap_svg(bundle.scalogram))
    dump_text(
        paths["coefficients.svg"],
        render_coefficients_svg(result.original, result.thresholded, result.report),
    )
    logger.info("...figures rendered!")
    _dump_frame(paths["denoised.csv"], _denoised_frame(bundle.series, result.denoised))
    _dump_json(paths["report.json"], bundle.report())
    return list(paths.values())


def run_analyze(cfg: RunConfig) -> tuple[AnalysisBundle, list[Path]]:
    """Load, analyse and write the full bundle."""
    s, digest = load_input(cfg)
    bundle = run_analysis(cfg, s, digest)
    return bundle, write_bundle(bundle, cfg.out)


def run_synth(
    spec: SyntheticSpec,
    out: str | Path,
) -> tuple[RainfallSeries, GroundTruth, list[Path]]:
    """Write synthetic.csv and truth.json for a generator spec."""
    s, truth = generate_synthetic(spec)
    out = Path(out)
    csv_path, truth_path = out / "synthetic.csv", out / "truth.json"
    dump_series(s, csv_path)
    _dump_json(
        truth_path,
        {
            "truth": truth.to_dict(),
            "components": [c.to_dict() for c in spec.components],
            "noise_sigma": spec.noise_sigma,
            "baseline": spec.baseline,
            "length": spec.length,
            "start": str(spec.start),
            "tool_version": TOOL_VERSION,
        },
    )
    return s, truth, [csv_path, truth_path]


def run_scalogram(cfg: RunConfig) -> tuple[ScalogramMatrix, list[Path]]:
    """Write scalogram.csv and scalogram.svg for the configured input and scales."""
    s, _ = load_input(cfg)
    logger.info("Computing scalogram...")
    matrix = cwt_quadrature(s, default_grid(len(s), cfg.scales))
    logger.info("...scalogram computed!")
    out = Path(cfg.out)
    csv_path, svg_path = out / "scalogram.csv", out / "scalogram.svg"
    _dump_frame(csv_path, matrix.to_frame())
    dump_text(svg_path, render_heatmap_svg(matrix))
    return matrix, [csv_path, svg_path]
