#!/usr/bin/env python
"""Run as a script to regenerate the golden period-band and calendar tables."""

from pathlib import Path

from src.task.periods import band_for_level, bands_frame, period_calendar
from src.utils.series_io import dump_text

GOLDEN_DIR = Path("tests/data")
LEVELS = (1, 2, 3)
PERIODS = [2, 3, 6]

bands = bands_frame([band_for_level(level) for level in LEVELS])
dump_text(
    GOLDEN_DIR / "table1_bands.csv",
    bands.to_csv(index=False, lineterminator="\n"),
)

calendar = period_calendar(PERIODS).to_frame()
dump_text(
    GOLDEN_DIR / "table2.csv",
    calendar.to_csv(index=False, lineterminator="\n"),
)
