"""Ingest, validate and index calendar-anchored monthly rainfall series."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd

from src.task.errors import ImputationError, LevelRangeError, SeriesParseError
from src.utils import MISSING_TOKENS, MONTH_NAMES, SERIES_COLS

logger = logging.getLogger(__name__)

MONTHS_PER_YEAR = 12


@dataclass(frozen=True, order=True)
class MonthStamp:
    """A Gregorian (year, month) pair. Ordered chronologically."""

    year: int
    month: int

    def __post_init__(self) -> None:
        """Validate the month number."""
        if not 1 <= self.month <= MONTHS_PER_YEAR:
            msg = f"month must be in 1..12, got {self.month}"
            raise ValueError(msg)

    @classmethod
    def from_ordinal(cls, ordinal: int) -> MonthStamp:
        """Build a stamp from a month count since year 0."""
        return cls(ordinal // MONTHS_PER_YEAR, ordinal % MONTHS_PER_YEAR + 1)

    @property
    def ordinal(self) -> int:
        """Months elapsed since January of year 0."""
        return self.year * MONTHS_PER_YEAR + self.month - 1

    @property
    def month_name(self) -> str:
        """English name of the calendar month."""
        return MONTH_NAMES[self.month - 1]

    def shift(self, months: int) -> MonthStamp:
        """Advance the stamp by a (possibly negative) number of months."""
        return MonthStamp.from_ordinal(self.ordinal + months)

    def __str__(self) -> str:
        """Render as `YYYY-MM`."""
        return f"{self.year:04d}-{self.month:02d}"


class ImputePolicy(Enum):
    """How `impute_missing` repairs MISSING entries."""

    LINEAR = "linear"
    CLIMATOLOGY_MEAN = "climatology-mean"
    FAIL = "fail"


@dataclass(frozen=True)
class RainfallSeries:
    """Contiguous monthly rainfall depths (mm/month). MISSING is stored as NaN.

    Sample `i` (1-based) belongs to the month `start` advanced by `i - 1` months.
    """

    start: MonthStamp
    values: np.ndarray = field(compare=False)

    def __post_init__(self) -> None:
        """Freeze a float copy of the values and check every present value."""
        values = np.array(self.values, dtype=float)
        if values.ndim != 1:
            msg = "values must be one-dimensional"
            raise ValueError(msg)
        present = values[~np.isnan(values)]
        if np.any(~np.isfinite(present)) or np.any(present < 0):
            msg = "present rainfall values must be finite and non-negative"
            raise ValueError(msg)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        """Return number of months in the series."""
        return len(self.values)

    def __eq__(self, other: object) -> bool:
        """Compare start stamp and values, treating MISSING == MISSING."""
        if not isinstance(other, RainfallSeries):
            return NotImplemented
        return self.start == other.start and np.array_equal(
            self.values,
            other.values,
            equal_nan=True,
        )

    def __hash__(self) -> int:
        """Hash on the start stamp and the raw value bytes."""
        return hash((self.start, self.values.tobytes()))

    @property
    def missing(self) -> np.ndarray:
        """Boolean mask of MISSING entries."""
        return np.isnan(self.values)

    @property
    def has_missing(self) -> bool:
        """Whether any entry is MISSING."""
        return bool(self.missing.any())

    @property
    def end(self) -> MonthStamp:
        """Stamp of the last sample."""
        return self.start.shift(len(self) - 1)

    def calendar_months(self) -> np.ndarray:
        """Calendar month (1..12) of every sample."""
        offsets = np.arange(len(self)) + self.start.month - 1
        return offsets % MONTHS_PER_YEAR + 1

    def years(self) -> np.ndarray:
        """Calendar year of every sample."""
        offsets = np.arange(len(self)) + self.start.ordinal
        return offsets // MONTHS_PER_YEAR

    def to_frame(self) -> pd.DataFrame:
        """Convert to a DataFrame with columns `SERIES_COLS`."""
        return pd.DataFrame(
            {
                "year": self.years(),
                "month": self.calendar_months(),
                "rainfall_mm": self.values,
            },
            columns=SERIES_COLS,
        )

    def with_values(self, values: np.ndarray) -> RainfallSeries:
        """Return a series with the same calendar anchor and new values."""
        return RainfallSeries(self.start, values)

    def month_index_to_stamp(self, i: int) -> MonthStamp:
        """Calendar stamp of the 1-based sample `i`."""
        return month_index_to_stamp(self, i)

    def stamp_to_month_index(self, stamp: MonthStamp) -> int:
        """1-based sample index of `stamp`."""
        return stamp_to_month_index(self, stamp)

    def check_analysable(self) -> None:
        """Raise unless the series is long enough for any analysis."""
        if len(self) < 2:
            msg = f"series must hold at least 2 months, got {len(self)}"
            raise LevelRangeError(msg)


def read_text(fp: str | Path) -> str:
    """Read a UTF-8 text file."""
    with Path(fp).open(encoding="utf-8") as f:
        return f.read()


def dump_text(file: str | Path, s: str) -> None:
    """Write text with LF line endings, creating parent directories."""
    file_path = Path(file)
    file_path.parent.mkdir(parents=True, exist_ok=True)  # ensure directory exists

    with file_path.open("w", encoding="utf-8", newline="\n") as f:
        f.write(s)


def _looks_like_header(fields: list[str]) -> bool:
    try:
        int(fields[0].strip())
    except ValueError:
        return True
    return False


def parse_csv(
    text: str,
    schema: list[str] | None = None,
    *,
    header: bool | None = None,
    missing_tokens: tuple[str, ...] = MISSING_TOKENS,
) -> RainfallSeries:
    """Parse `year,month,rainfall` CSV text into a contiguous monthly series.

    Calendar gaps become MISSING entries. Rows may come in any order.

    Args:
        text (str): CSV text, LF or CRLF line endings.
        schema (list[str] | None, optional): Names of the year, month and rainfall
            columns. Defaults to `SERIES_COLS`.
        header (bool | None, optional): Whether the first non-blank line is a header.
            `None` detects it (a first field that is not an integer).
        missing_tokens (tuple[str, ...], optional): Case-insensitive tokens read as
            MISSING. The empty field should normally stay in the set.

    Returns:
        RainfallSeries: the parsed series.

    Raises:
        SeriesParseError: on malformed rows, duplicate months, non-numeric rainfall
            or empty input.

    """
    schema = SERIES_COLS if schema is None else schema
    tokens = {t.strip().lower() for t in missing_tokens}
    lines = [
        (lineno, line)
        for lineno, line in enumerate(text.splitlines(), start=1)
        if line.strip()
    ]
    if not lines:
        msg = "empty input"
        raise SeriesParseError(msg)

    n_fields = len(schema)
    positions = list(range(n_fields))
    first_fields = lines[0][1].split(",")
    if header or (header is None and _looks_like_header(first_fields)):
        lineno, _ = lines.pop(0)
        columns = [c.strip().lower() for c in first_fields]
        try:
            positions = [columns.index(name.lower()) for name in schema]
        except ValueError as v:
            msg = f"header must name the columns {', '.join(schema)}"
            raise SeriesParseError(msg, lineno) from v
        n_fields = len(columns)

    def rows():
        for lineno, line in lines:
            fields = line.split(",")
            if len(fields) != n_fields:
                msg = f"expected {n_fields} fields, saw {len(fields)}"
                raise SeriesParseError(msg, lineno)
            year_s, month_s, rain_s = (fields[p].strip() for p in positions)
            try:
                year, month = int(year_s), int(month_s)
                stamp = MonthStamp(year, month)
            except ValueError as v:
                msg = f"invalid year/month {year_s!r}/{month_s!r}"
                raise SeriesParseError(msg, lineno) from v
            if rain_s.lower() in tokens:
                rain = math.nan
            else:
                try:
                    rain = float(rain_s)
                except ValueError as v:
                    msg = f"non-numeric rainfall {rain_s!r}"
                    raise SeriesParseError(msg, lineno) from v
                if not math.isfinite(rain) or rain < 0:
                    msg = f"rainfall must be finite and non-negative, got {rain_s!r}"
                    raise SeriesParseError(msg, lineno)
            yield [lineno, stamp.ordinal, rain]

    df = pd.DataFrame(rows(), columns=["line", "ordinal", "rainfall_mm"])
    if df.empty:
        msg = "empty input"
        raise SeriesParseError(msg)

    dupes = df[df.duplicated("ordinal", keep="first")]
    if not dupes.empty:
        row = dupes.iloc[0]
        stamp = MonthStamp.from_ordinal(int(row["ordinal"]))
        msg = f"duplicate month {stamp}"
        raise SeriesParseError(msg, int(row["line"]))

    first = int(df["ordinal"].min())
    values = np.full(int(df["ordinal"].max()) - first + 1, np.nan)
    values[df["ordinal"].to_numpy() - first] = df["rainfall_mm"].to_numpy()

    series = RainfallSeries(MonthStamp.from_ordinal(first), values)
    logger.debug(
        "Parsed %d months from %s to %s (%d missing)",
        len(series),
        series.start,
        series.end,
        int(series.missing.sum()),
    )
    return series


def serialize_csv(s: RainfallSeries) -> str:
    """Serialize a series to CSV: header, chronological rows, MISSING as empty field.

    Returns:
        str: CSV text that `parse_csv` reads back to an equal series.

    """
    df = s.to_frame()
    df["rainfall_mm"] = [
        "" if np.isnan(v) else np.format_float_positional(v, trim="-")
        for v in s.values
    ]
    return df.to_csv(index=False, lineterminator="\n")


def load_series(file: str | Path, **kwargs) -> RainfallSeries:
    """Load a series CSV file. Keyword arguments are passed on to `parse_csv`.

    Returns:
        RainfallSeries: the parsed series.

    """
    return parse_csv(read_text(file), **kwargs)


def dump_series(s: RainfallSeries, file: str | Path) -> None:
    """Dump a series to a CSV file.

    Args:
        s (RainfallSeries): Series to dump.
        file (str | Path): Where to dump.

    """
    dump_text(file, serialize_csv(s))


def impute_missing(s: RainfallSeries, policy: ImputePolicy) -> RainfallSeries:
    """Replace MISSING entries according to `policy`. Present values never change.

    Args:
        s (RainfallSeries): Series to repair.
        policy (ImputePolicy): `LINEAR` interpolates between the nearest present
            neighbours, `CLIMATOLOGY_MEAN` uses the mean of the same calendar month
            over all years, `FAIL` refuses any MISSING entry.

    Returns:
        RainfallSeries: series without MISSING entries.

    Raises:
        ImputationError: when the policy cannot fill every gap.

    """
    missing = s.missing
    if not missing.any():
        return s

    first_gap = s.month_index_to_stamp(int(np.argmax(missing)) + 1)
    if policy is ImputePolicy.FAIL:
        msg = f"{int(missing.sum())} missing value(s), first at {first_gap}"
        raise ImputationError(msg)

    if policy is ImputePolicy.LINEAR:
        if missing[0] or missing[-1]:
            msg = "linear imputation needs the first and last values present"
            raise ImputationError(msg)
        filled = pd.Series(s.values).interpolate(method="linear").to_numpy()
    else:
        df = s.to_frame()
        means = df.groupby("month")["rainfall_mm"].mean()
        fill = df["month"].map(means).to_numpy()
        if np.isnan(fill[missing]).any():
            empty = sorted(set(df["month"][missing & np.isnan(fill)]))
            names = ", ".join(MONTH_NAMES[m - 1] for m in empty)
            msg = f"no present values for calendar month(s): {names}"
            raise ImputationError(msg)
        filled = np.where(missing, fill, s.values)

    logger.info("Imputed %d missing value(s) with %s", missing.sum(), policy.value)
    return s.with_values(filled)


def month_index_to_stamp(s: RainfallSeries, i: int) -> MonthStamp:
    """Map a 1-based sample index to its calendar month.

    Raises:
        LevelRangeError: if `i` is outside `1..len(s)`.

    """
    if not 1 <= i <= len(s):
        msg = f"month index {i} outside 1..{len(s)}"
        raise LevelRangeError(msg, maximum=len(s))
    return s.start.shift(i - 1)


def stamp_to_month_index(s: RainfallSeries, stamp: MonthStamp) -> int:
    """Map a calendar month to its 1-based sample index (inverse of the above).

    Raises:
        LevelRangeError: if the month is not covered by the series.

    """
    i = stamp.ordinal - s.start.ordinal + 1
    if not 1 <= i <= len(s):
        msg = f"{stamp} is not covered by the series ({s.start} to {s.end})"
        raise LevelRangeError(msg, maximum=len(s))
    return i

