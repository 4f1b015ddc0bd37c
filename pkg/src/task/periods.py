"""Period bands, level summaries, low-rainfall episodes, climatology and calendar."""

from __future__ import annotations

import logging
import math
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING, NamedTuple

import numpy as np
import pandas as pd
from prettytable import PrettyTable

from src.task.dwt import Decomposition, reconstruct_component
from src.task.errors import DecompositionError, ImputationError, LevelRangeError
from src.utils import MONTH_NAMES

if TYPE_CHECKING:
    from src.task.shrinkage import ShrinkageReport
    from src.utils.series_io import MonthStamp, RainfallSeries

logger = logging.getLogger(__name__)

# periods that divide the 12-month year
PHASE_LOCKED_PERIODS = frozenset({1, 2, 3, 4, 6, 12})
BIMODAL_SEPARATION = (5, 7)
DEFAULT_DEPTH_FACTOR = 0.5


class BandConvention(Enum):
    """Which period band a detail level stands for.

    PAPER: level j covers 2^(j-1) .. 2^j months, one octave below DYADIC.
    DYADIC: level j covers 2^j .. 2^(j+1) months.

    "shifted" is accepted as another name for PAPER.
    """

    PAPER = "paper"
    DYADIC = "dyadic"

    @classmethod
    def _missing_(cls, value: object) -> BandConvention | None:
        if isinstance(value, str) and value.lower() == "shifted":
            return cls.PAPER
        return None


def format_frequency(value: Fraction) -> str:
    """Format a frequency truncated (not rounded) to 3 decimals, trailing zeros cut.

    1/6 gives "0.166", 1/2 gives "0.5" and 1 gives "1".
    """
    thousandths = math.floor(value * 1000)
    whole, frac = divmod(thousandths, 1000)
    return f"{whole}.{frac:03d}".rstrip("0").rstrip(".")


class PeriodBand(NamedTuple):
    """Period and relative-frequency range represented by one detail level."""

    level: int
    period_lo: int
    period_hi: int

    @property
    def freq_lo(self) -> Fraction:
        """Lowest relative frequency (cycles/month), 1 / period_hi."""
        return Fraction(1, self.period_hi)

    @property
    def freq_hi(self) -> Fraction:
        """Highest relative frequency (cycles/month), 1 / period_lo."""
        return Fraction(1, self.period_lo)

    @property
    def median_period(self) -> int:
        """Midpoint of the period range, rounded up."""
        return math.ceil(Fraction(self.period_lo + self.period_hi, 2))

    @property
    def median_frequency(self) -> Fraction:
        """Relative frequency of the median period."""
        return Fraction(1, self.median_period)

    def period_range(self) -> str:
        """`lo-hi` in months."""
        return f"{self.period_lo}-{self.period_hi}"

    def frequency_range(self) -> str:
        """`lo-hi` in cycles/month, 3-decimal truncated."""
        return f"{format_frequency(self.freq_lo)}-{format_frequency(self.freq_hi)}"


def band_for_level(
    level: int,
    convention: BandConvention = BandConvention.PAPER,
) -> PeriodBand:
    """Period band of a detail level.

    Raises:
        LevelRangeError: if `level` < 1.

    """
    if level < 1:
        msg = f"level must be at least 1, got {level}"
        raise LevelRangeError(msg)
    shift = 0 if convention is BandConvention.DYADIC else 1
    return PeriodBand(level, 2 ** (level - shift), 2 ** (level + 1 - shift))


def level_for_period(
    period: float,
    convention: BandConvention = BandConvention.PAPER,
) -> int:
    """Detail level whose band holds `period` months.

    Paper bands are (2^(j-1), 2^j], dyadic bands [2^j, 2^(j+1)).
    """
    if convention is BandConvention.PAPER:
        if period <= 0:
            msg = f"period must be positive, got {period}"
            raise ValueError(msg)
        level = 1
        while 2**level < period:
            level += 1
        return level

    if period < 2:
        msg = f"dyadic bands start at 2 months, got {period}"
        raise ValueError(msg)
    level = 1
    while 2 ** (level + 1) <= period:
        level += 1
    return level


def bands_frame(bands: list[PeriodBand]) -> pd.DataFrame:
    """Period/frequency columns of the level table."""
    return pd.DataFrame(
        [
            [
                band.level,
                band.period_range(),
                band.frequency_range(),
                band.median_period,
                format_frequency(band.median_frequency),
            ]
            for band in bands
        ],
        columns=[
            "level",
            "period_range",
            "frequency_range",
            "median_period",
            "median_frequency",
        ],
    )


class LevelSummary(NamedTuple):
    """One row of the level table."""

    band: PeriodBand
    surviving_coeffs: int
    component_min: float
    component_max: float

    @property
    def median_relative_frequency(self) -> Fraction:
        """1 / median_period, exact."""
        return self.band.median_frequency

    def to_dict(self) -> dict:
        """JSON-safe dictionary."""
        freq = self.median_relative_frequency
        return {
            "level": self.band.level,
            "period_lo": self.band.period_lo,
            "period_hi": self.band.period_hi,
            "freq_lo": str(self.band.freq_lo),
            "freq_hi": str(self.band.freq_hi),
            "median_period": self.band.median_period,
            "median_frequency": format_frequency(freq),
            "median_frequency_exact": str(freq),
            "surviving_coeffs": self.surviving_coeffs,
            "component_min": self.component_min,
            "component_max": self.component_max,
        }


def summarize_levels(
    d: Decomposition,
    report: ShrinkageReport,
    s: RainfallSeries,
    convention: BandConvention = BandConvention.PAPER,
) -> list[LevelSummary]:
    """Build one summary row per significant level, ordered by level.

    The component range is the level's reconstructed contribution added back to
    the series mean.

    Raises:
        DecompositionError: if the report or series does not belong to `d`.

    """
    if len(report.levels) != d.depth or any(
        row.total != len(detail) for row, detail in zip(report.levels, d.details)
    ):
        msg = "shrinkage report does not match the decomposition"
        raise DecompositionError(msg)
    if len(s) != d.original_length:
        msg = f"series has {len(s)} months, decomposition {d.original_length}"
        raise DecompositionError(msg)

    baseline = float(np.nanmean(s.values))
    summaries = []
    for row in report.levels:
        if not row.significant:
            continue
        component = reconstruct_component(d, row.level) + baseline
        summaries.append(
            LevelSummary(
                band_for_level(row.level, convention),
                row.surviving,
                float(component.min()),
                float(component.max()),
            ),
        )
    return summaries


def summaries_frame(summaries: list[LevelSummary]) -> pd.DataFrame:
    """Level table: band columns, exact frequency, rainfall range and survivors."""
    bands = bands_frame([summary.band for summary in summaries])
    bands["median_frequency_exact"] = [
        str(summary.median_relative_frequency) for summary in summaries
    ]
    bands["rainfall_min"] = [round(x.component_min, 3) for x in summaries]
    bands["rainfall_max"] = [round(x.component_max, 3) for x in summaries]
    bands["data_frequency"] = [x.surviving_coeffs for x in summaries]
    return bands


def print_level_summaries(summaries: list[LevelSummary]) -> None:
    """Print table representation of the level summaries."""
    table = PrettyTable()
    table.title = "Period and frequency per level"
    table.field_names = [
        "Level",
        "Period (month)",
        "Relative frequency",
        "Median period",
        "Median frequency",
        "Rainfall range",
        "Data frequency",
    ]
    for summary in summaries:
        band = summary.band
        table.add_row(
            [
                band.level,
                band.period_range(),
                band.frequency_range(),
                band.median_period,
                format_frequency(band.median_frequency),
                f"{summary.component_min:.0f}-{summary.component_max:.0f}",
                summary.surviving_coeffs,
            ],
        )
    print(table)


def level_energies(d: Decomposition) -> np.ndarray:
    """Detail energy per level, index 0 is level 1."""
    return np.array([d.level_energy(j) for j in range(1, d.depth + 1)])


def dominant_level(d: Decomposition) -> int:
    """Level with the largest detail energy."""
    return int(np.argmax(level_energies(d))) + 1


class EpisodeKind(Enum):
    """Kind of episode detected."""

    MINIMUM = "minimum"


class Episode(NamedTuple):
    """Window of anomalously low reconstructed rainfall at one level."""

    level: int
    start_index: int
    end_index: int
    start_stamp: MonthStamp
    end_stamp: MonthStamp
    kind: EpisodeKind = EpisodeKind.MINIMUM

    def describe(self) -> str:
        """Narrative form, e.g. `month 13 to 14 or January to February 1992`."""
        first, last = self.start_stamp, self.end_stamp
        if first.year == last.year:
            when = f"{first.month_name} to {last.month_name} {last.year}"
        else:
            when = (
                f"{first.month_name} {first.year} to {last.month_name} {last.year}"
            )
        return f"month {self.start_index} to {self.end_index} or {when}"

    def to_dict(self) -> dict:
        """JSON-safe dictionary."""
        return {
            "level": self.level,
            "kind": self.kind.value,
            "start_index": self.start_index,
            "end_index": self.end_index,
            "start": str(self.start_stamp),
            "end": str(self.end_stamp),
        }


def detect_episodes(
    component: np.ndarray,
    band: PeriodBand,
    s: RainfallSeries,
    kind: EpisodeKind = EpisodeKind.MINIMUM,
    depth_factor: float = DEFAULT_DEPTH_FACTOR,
) -> list[Episode]:
    """Find low-rainfall windows in a level's reconstructed component.

    A window of `band.median_period` months is an episode when its mean is a strict
    minimum among all windows overlapping it and lies below
    mean - depth_factor * std of the component. Overlapping episodes are merged.

    Raises:
        ValueError: if the component does not match the series length.
        LevelRangeError: if the window is wider than the series.

    """
    component = np.asarray(component, dtype=float)
    n, width = len(component), band.median_period
    if n != len(s):
        msg = f"component has {n} samples, series {len(s)}"
        raise ValueError(msg)
    if width > n:
        msg = f"window of {width} months is wider than the {n}-month series"
        raise LevelRangeError(msg, maximum=n)

    means = np.lib.stride_tricks.sliding_window_view(component, width).mean(axis=1)
    cutoff = component.mean() - depth_factor * component.std()

    windows: list[list[int]] = []
    for i, m in enumerate(means):
        if m >= cutoff:
            continue
        lo, hi = max(0, i - width + 1), min(len(means), i + width)
        neighbours = np.delete(means[lo:hi], i - lo)
        if neighbours.size and not np.all(m < neighbours):
            continue
        start, end = i + 1, i + width
        if windows and start <= windows[-1][1]:
            windows[-1][1] = max(windows[-1][1], end)
        else:
            windows.append([start, end])

    logger.debug("Level %d: %d episode(s) below %.3f", band.level, len(windows), cutoff)
    return [
        Episode(
            band.level,
            start,
            end,
            s.month_index_to_stamp(start),
            s.month_index_to_stamp(end),
            kind,
        )
        for start, end in windows
    ]


def repeat_interval(episodes: list[Episode]) -> float | None:
    """Median gap in months between consecutive episode starts, or None."""
    if len(episodes) < 2:
        return None
    starts = sorted(e.start_index for e in episodes)
    return float(np.median(np.diff(starts)))


class Aggregation(Enum):
    """Per-calendar-month aggregate used by `climatology`."""

    MEDIAN = "median"
    MEAN = "mean"


class ClimatologyProfile(NamedTuple):
    """Aggregate rainfall for each calendar month and its circular peaks."""

    values: tuple[float, ...]
    aggregation: Aggregation
    peak_months: tuple[int, ...]

    @property
    def peak_names(self) -> list[str]:
        """Names of the peak months."""
        return [MONTH_NAMES[m - 1] for m in self.peak_months]

    def to_dict(self) -> dict:
        """JSON-safe dictionary."""
        return {
            "aggregation": self.aggregation.value,
            "values": dict(zip(MONTH_NAMES, self.values)),
            "peak_months": self.peak_names,
        }


def circular_peaks(values: np.ndarray) -> tuple[int, ...]:
    """1-based positions that are strict local maxima on a circular profile."""
    values = np.asarray(values, dtype=float)
    is_peak = (values > np.roll(values, 1)) & (values > np.roll(values, -1))
    return tuple(int(i) + 1 for i in np.flatnonzero(is_peak))


def climatology(
    s: RainfallSeries,
    aggregation: Aggregation = Aggregation.MEDIAN,
) -> ClimatologyProfile:
    """Aggregate the series per calendar month across all years.

    Raises:
        ImputationError: if MISSING values are present.
        LevelRangeError: if the series is shorter than 12 months.

    """
    if s.has_missing:
        msg = "climatology needs a series without missing values; impute first"
        raise ImputationError(msg)
    if len(s) < len(MONTH_NAMES):
        msg = f"climatology needs at least 12 months, got {len(s)}"
        raise LevelRangeError(msg)

    per_month = (
        s.to_frame()
        .groupby("month")["rainfall_mm"]
        .agg(aggregation.value)
        .reindex(range(1, 13))
    )
    values = per_month.to_numpy(dtype=float)
    return ClimatologyProfile(
        tuple(float(v) for v in values),
        aggregation,
        circular_peaks(values),
    )


class CalendarRow(NamedTuple):
    """Months whose number is a multiple of a period."""

    period: int
    months: tuple[int, ...]

    @property
    def phase_locked(self) -> bool:
        """Whether the period divides the 12-month year."""
        return self.period in PHASE_LOCKED_PERIODS

    @property
    def month_names(self) -> list[str]:
        """Names of the row's months."""
        return [MONTH_NAMES[m - 1] for m in self.months]


class PeriodCalendar(NamedTuple):
    """Calendar months each dominant period points at."""

    rows: tuple[CalendarRow, ...]

    def to_frame(self) -> pd.DataFrame:
        """Two-column `period,months` table."""
        return pd.DataFrame(
            [[row.period, ", ".join(row.month_names)] for row in self.rows],
            columns=["period", "months"],
        )

    def to_dict(self) -> list[dict]:
        """JSON rows, phase-lock flag included."""
        return [
            {
                "period": row.period,
                "months": row.month_names,
                "phase_locked": row.phase_locked,
            }
            for row in self.rows
        ]


def period_calendar(periods: list[int]) -> PeriodCalendar:
    """Map each period p to the months {m in 1..12 : m mod p = 0}.

    Raises:
        ValueError: if any period is below 1.

    """
    rows = []
    for p in periods:
        if p < 1:
            msg = f"period must be at least 1 month, got {p}"
            raise ValueError(msg)
        rows.append(CalendarRow(p, tuple(m for m in range(1, 13) if m % p == 0)))
    return PeriodCalendar(tuple(rows))


def peak_months(cal: PeriodCalendar) -> frozenset[int]:
    """Months shared by every calendar row.

    Raises:
        ValueError: for an empty calendar.

    """
    if not cal.rows:
        msg = "cannot intersect an empty calendar"
        raise ValueError(msg)
    return frozenset.intersection(*(frozenset(row.months) for row in cal.rows))


class RainfallPattern(Enum):
    """Annual rainfall regime."""

    EQUATORIAL_BIMODAL = "equatorial-bimodal"
    MONSOONAL_UNIMODAL = "monsoonal-unimodal"
    INDETERMINATE = "indeterminate"


def classify_pattern(profile: ClimatologyProfile) -> RainfallPattern:
    """Two peaks about six months apart are equatorial, a single peak monsoonal."""
    peaks = profile.peak_months
    if len(peaks) == 1:
        return RainfallPattern.MONSOONAL_UNIMODAL
    if len(peaks) == 2:
        gap = abs(peaks[0] - peaks[1])
        gap = min(gap, 12 - gap)
        lo, hi = BIMODAL_SEPARATION
        if lo <= gap <= hi:
            return RainfallPattern.EQUATORIAL_BIMODAL
    return RainfallPattern.INDETERMINATE
