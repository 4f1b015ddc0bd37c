from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from src.task.dwt import BoundaryMode, wavedec
from src.task.errors import DecompositionError, ImputationError, LevelRangeError
from src.task.filters import make_filter
from src.task.periods import (
    Aggregation,
    BandConvention,
    ClimatologyProfile,
    Episode,
    RainfallPattern,
    band_for_level,
    bands_frame,
    classify_pattern,
    climatology,
    detect_episodes,
    dominant_level,
    format_frequency,
    level_energies,
    level_for_period,
    peak_months,
    period_calendar,
    print_level_summaries,
    repeat_interval,
    summaries_frame,
    summarize_levels,
)
from src.task.shrinkage import (
    LevelShrinkage,
    ShrinkageReport,
    denoise,
    significant_levels,
)
from src.task.synthetic import (
    BIMODAL_AMPLITUDES,
    UNIMODAL_AMPLITUDES,
    DipPlan,
    PlantedComponent,
    SyntheticSpec,
    components_peaking_at,
    generate_synthetic,
)
from src.utils.series_io import MonthStamp, RainfallSeries

DATA_DIR = Path(__file__).parent / "data"
START = MonthStamp(1991, 1)
HAAR = make_filter("haar")
JUNE, DECEMBER = 6, 12


def _csv(df) -> str:
    return df.to_csv(index=False, lineterminator="\n")


class TestBands:
    def test_golden_table1(self):
        frame = bands_frame([band_for_level(level) for level in (1, 2, 3)])
        assert _csv(frame) == (DATA_DIR / "table1_bands.csv").read_text()

    @pytest.mark.parametrize(
        ("level", "lo", "hi", "median", "median_freq"),
        [(1, 1, 2, 2, "0.5"), (2, 2, 4, 3, "0.333"), (3, 4, 8, 6, "0.166")],
    )
    def test_default_bands(self, level, lo, hi, median, median_freq):
        band = band_for_level(level)
        assert (band.period_lo, band.period_hi) == (lo, hi)
        assert band.freq_lo == Fraction(1, hi)
        assert band.freq_hi == Fraction(1, lo)
        assert band.median_period == median
        assert band.median_frequency == Fraction(1, median)
        assert format_frequency(band.median_frequency) == median_freq

    def test_dyadic_bands(self):
        band = band_for_level(2, BandConvention.DYADIC)
        assert (band.period_lo, band.period_hi, band.median_period) == (4, 8, 6)

    def test_level_below_one(self):
        with pytest.raises(LevelRangeError):
            band_for_level(0)

    @pytest.mark.parametrize(
        ("value", "text"),
        [(Fraction(1), "1"), (Fraction(1, 8), "0.125"), (Fraction(2, 3), "0.666")],
    )
    def test_format_truncates(self, value, text):
        assert format_frequency(value) == text

    @pytest.mark.parametrize(
        ("period", "paper", "dyadic"),
        [(2, 1, 1), (3, 2, 1), (6, 3, 2), (12, 4, 3), (16, 4, 4)],
    )
    def test_level_for_period(self, period, paper, dyadic):
        assert level_for_period(period) == paper
        assert level_for_period(period, BandConvention("shifted")) == paper
        assert level_for_period(period, BandConvention.DYADIC) == dyadic


def _table_report(d, survivors: list[int]) -> ShrinkageReport:
    rows = tuple(
        LevelShrinkage(j, 1.0, 1.0, len(detail), count, 1.0)
        for j, (detail, count) in enumerate(zip(d.details, survivors), start=1)
    )
    return significant_levels(ShrinkageReport(rows), 1)


class TestSummaries:
    @pytest.fixture
    def decomposed(self, bimodal_series):
        return bimodal_series, wavedec(bimodal_series.values, HAAR, depth=4)

    def test_three_significant_levels(self, decomposed, capsys):
        s, d = decomposed
        summaries = summarize_levels(d, _table_report(d, [59, 44, 18, 0]), s)
        assert [x.band.median_period for x in summaries] == [2, 3, 6]
        assert [x.surviving_coeffs for x in summaries] == [59, 44, 18]
        assert all(x.component_min <= x.component_max for x in summaries)
        assert summaries[0].median_relative_frequency == Fraction(1, 2)

        frame = summaries_frame(summaries)
        assert list(frame["median_frequency"]) == ["0.5", "0.333", "0.166"]
        assert list(frame["median_frequency_exact"]) == ["1/2", "1/3", "1/6"]
        print_level_summaries(summaries)
        assert "Period and frequency per level" in capsys.readouterr().out

    def test_calendar_of_significant_levels_matches_golden_table2(self, decomposed):
        s, d = decomposed
        summaries = summarize_levels(d, _table_report(d, [59, 44, 18, 0]), s)
        cal = period_calendar([x.band.median_period for x in summaries])
        assert _csv(cal.to_frame()) == (DATA_DIR / "table2.csv").read_text()

    def test_denoised_synthetic_keeps_three_levels(self, three_level_series):
        s = three_level_series
        result = denoise(s.values, HAAR, BoundaryMode.PERIODIC, depth=4)
        assert [r.significant for r in result.report.levels] == [
            True,
            True,
            True,
            False,
        ]
        assert result.report.highest_significant_level == 3

        summaries = summarize_levels(result.thresholded, result.report, s)
        assert [x.band.median_period for x in summaries] == [2, 3, 6]
        cal = period_calendar([x.band.median_period for x in summaries])
        assert _csv(cal.to_frame()) == (DATA_DIR / "table2.csv").read_text()

    def test_no_significant_level(self, decomposed):
        s, d = decomposed
        assert summarize_levels(d, _table_report(d, [0, 0, 0, 0]), s) == []

    def test_component_is_centred_on_series_mean(self, decomposed):
        s, d = decomposed
        (summary,) = summarize_levels(d, _table_report(d, [0, 0, 0, 5]), s)
        mean = float(np.mean(s.values))
        assert summary.component_min < mean < summary.component_max

    def test_mismatched_report(self, decomposed):
        s, d = decomposed
        shallow = wavedec(s.values, HAAR, depth=2)
        with pytest.raises(DecompositionError):
            summarize_levels(d, _table_report(shallow, [1, 1]), s)

    def test_mismatched_series(self, decomposed):
        s, d = decomposed
        short = RainfallSeries(START, s.values[:100])
        with pytest.raises(DecompositionError):
            summarize_levels(d, _table_report(d, [1, 1, 1, 1]), short)


def _episode(start: int) -> Episode:
    return Episode(1, start, start + 1, START.shift(start - 1), START.shift(start))


class TestEpisodes:
    def test_isolated_dip(self):
        component = np.zeros(30)
        component[[12, 13]] = -1.0
        s = RainfallSeries(START, np.ones(30))
        (episode,) = detect_episodes(component, band_for_level(1), s)
        assert (episode.start_index, episode.end_index) == (13, 14)
        assert episode.start_stamp == MonthStamp(1992, 1)
        assert episode.end_stamp == MonthStamp(1992, 2)
        assert episode.describe() == "month 13 to 14 or January to February 1992"
        assert episode.to_dict()["start"] == "1992-01"

    def test_narrative_across_years(self):
        episode = Episode(2, 12, 14, MonthStamp(1991, 12), MonthStamp(1992, 2))
        assert episode.describe() == "month 12 to 14 or December 1991 to February 1992"

    def test_constant_component(self):
        s = RainfallSeries(START, np.ones(30))
        assert detect_episodes(np.full(30, 4.0), band_for_level(2), s) == []

    def test_tied_windows_are_not_minima(self):
        component = np.zeros(40)
        component[[10, 11, 12, 13]] = -2.0
        s = RainfallSeries(START, np.ones(40))
        assert detect_episodes(component, band_for_level(1), s) == []

    def test_depth_factor(self):
        component = np.zeros(30)
        component[[12, 13]] = -1.0
        s = RainfallSeries(START, np.ones(30))
        assert detect_episodes(component, band_for_level(1), s, depth_factor=5.0) == []

    def test_window_wider_than_series(self):
        s = RainfallSeries(START, np.ones(5))
        with pytest.raises(LevelRangeError):
            detect_episodes(np.zeros(5), band_for_level(4), s)

    def test_length_mismatch(self):
        s = RainfallSeries(START, np.ones(10))
        with pytest.raises(ValueError, match="component"):
            detect_episodes(np.zeros(9), band_for_level(1), s)

    def test_planted_dips_are_recovered(self):
        dips = DipPlan(5, 16, 3, 150.0)
        spec = SyntheticSpec((), 5.0, 312, 300.0, seed=3, dips=dips)
        s, truth = generate_synthetic(spec)
        anomaly = s.values - s.values.mean()
        episodes = detect_episodes(anomaly, band_for_level(2), s)
        starts = [e.start_index for e in episodes]
        hits = sum(
            any(abs(start - planted) <= 1 for start in starts)
            for planted, _ in truth.dip_windows
        )
        assert hits >= 0.9 * len(truth.dip_windows)
        assert repeat_interval(episodes) == 16.0


class TestRepeatInterval:
    def test_examples(self):
        assert repeat_interval([_episode(s) for s in (5, 21, 37)]) == 16.0
        assert repeat_interval([_episode(s) for s in (41, 56, 81, 105, 129)]) == 24.0

    def test_fewer_than_two(self):
        assert repeat_interval([_episode(13)]) is None
        assert repeat_interval([]) is None


class TestClimatology:
    def test_planted_maxima(self):
        values = np.full(24, 100.0)
        values[[5, 17]] = 500.0
        values[[11, 23]] = 480.0
        profile = climatology(RainfallSeries(START, values))
        assert profile.peak_months == (JUNE, DECEMBER)
        assert profile.peak_names == ["June", "December"]
        assert classify_pattern(profile) is RainfallPattern.EQUATORIAL_BIMODAL

    def test_mean_aggregation(self):
        values = np.full(24, 10.0)
        values[0], values[12] = 20.0, 40.0
        profile = climatology(RainfallSeries(START, values), Aggregation.MEAN)
        assert profile.values[0] == 30.0
        assert profile.to_dict()["aggregation"] == "mean"

    def test_constant_has_no_peaks(self):
        profile = climatology(RainfallSeries(START, np.full(36, 7.0)))
        assert profile.peak_months == ()
        assert classify_pattern(profile) is RainfallPattern.INDETERMINATE

    def test_bimodal_synthetic(self):
        spec = SyntheticSpec(
            components_peaking_at(BIMODAL_AMPLITUDES, JUNE, START),
            5.0,
            312,
            300.0,
            seed=11,
        )
        s, _ = generate_synthetic(spec)
        profile = climatology(s)
        assert profile.peak_months == (JUNE, DECEMBER)
        assert classify_pattern(profile) is RainfallPattern.EQUATORIAL_BIMODAL

    def test_unimodal_synthetic(self):
        spec = SyntheticSpec(
            components_peaking_at(UNIMODAL_AMPLITUDES, 1, START),
            5.0,
            312,
            300.0,
            seed=11,
        )
        s, _ = generate_synthetic(spec)
        profile = climatology(s)
        assert profile.peak_months == (1,)
        assert classify_pattern(profile) is RainfallPattern.MONSOONAL_UNIMODAL

    def test_missing_values(self):
        values = np.full(24, 1.0)
        values[3] = np.nan
        with pytest.raises(ImputationError):
            climatology(RainfallSeries(START, values))

    def test_too_short(self):
        with pytest.raises(LevelRangeError):
            climatology(RainfallSeries(START, np.ones(11)))

    @pytest.mark.parametrize(
        ("peaks", "pattern"),
        [
            ((6, 12), RainfallPattern.EQUATORIAL_BIMODAL),
            ((1, 7), RainfallPattern.EQUATORIAL_BIMODAL),
            ((1, 11), RainfallPattern.INDETERMINATE),
            ((1,), RainfallPattern.MONSOONAL_UNIMODAL),
            ((3, 5, 9), RainfallPattern.INDETERMINATE),
            ((), RainfallPattern.INDETERMINATE),
        ],
    )
    def test_classify(self, peaks, pattern):
        profile = ClimatologyProfile((0.0,) * 12, Aggregation.MEDIAN, peaks)
        assert classify_pattern(profile) is pattern


class TestCalendar:
    def test_golden_table2(self):
        cal = period_calendar([2, 3, 6])
        assert _csv(cal.to_frame()) == (DATA_DIR / "table2.csv").read_text()
        assert peak_months(cal) == {JUNE, DECEMBER}

    @pytest.mark.parametrize("periods", [[6], [2, 3], [2, 3, 6]])
    def test_peak_months(self, periods):
        assert peak_months(period_calendar(periods)) == {JUNE, DECEMBER}

    def test_phase_lock_flag(self):
        rows = period_calendar([5, 6]).to_dict()
        assert rows[0] == {
            "period": 5,
            "months": ["May", "October"],
            "phase_locked": False,
        }
        assert rows[1]["phase_locked"] is True

    def test_invalid(self):
        with pytest.raises(ValueError, match="at least 1"):
            period_calendar([0])
        with pytest.raises(ValueError, match="empty"):
            peak_months(period_calendar([]))


class TestDominantLevel:
    @pytest.mark.parametrize("period", [2, 3, 6, 12])
    def test_planted_period_recovery(self, period):
        expected = level_for_period(period, BandConvention.DYADIC)
        tone = (PlantedComponent(period, 100.0),)
        hits = 0
        for seed in range(100):
            s, _ = generate_synthetic(SyntheticSpec(tone, 10.0, 312, 300.0, seed))
            d = wavedec(s.values, HAAR, BoundaryMode.PERIODIC, 4)
            hits += dominant_level(d) == expected
        assert hits >= 95

    def test_energies_per_level(self):
        d = wavedec(np.tile([1.0, -1.0], 16), HAAR, depth=3)
        energies = level_energies(d)
        assert energies[0] == pytest.approx(32.0)
        np.testing.assert_allclose(energies[1:], 0.0, atol=1e-20)
        assert dominant_level(d) == 1
