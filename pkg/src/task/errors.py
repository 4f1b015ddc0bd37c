"""Exception hierarchy shared by the analysis modules."""

from __future__ import annotations


class WaveletPeriodError(Exception):
    """Base class for every error raised by the analysis code."""


class SeriesParseError(WaveletPeriodError, ValueError):
    """Input text could not be turned into a monthly series."""

    def __init__(self, msg: str, line: int | None = None) -> None:
        """Initialise the error.

        Args:
            msg (str): Human readable description.
            line (int | None, optional): 1-based input line the error refers to.

        """
        self.line = line
        super().__init__(msg if line is None else f"line {line}: {msg}")


class ImputationError(WaveletPeriodError, ValueError):
    """Missing values could not be repaired under the requested policy."""


class LevelRangeError(WaveletPeriodError, ValueError):
    """A level, depth, index or length is outside its admissible range."""

    def __init__(self, msg: str, maximum: int | None = None) -> None:
        """Initialise the error.

        Args:
            msg (str): Human readable description.
            maximum (int | None, optional): Largest admissible value, if known.

        """
        self.maximum = maximum
        super().__init__(msg)


class DecompositionError(WaveletPeriodError, ValueError):
    """Decomposition bookkeeping is inconsistent."""


class FilterError(WaveletPeriodError, ValueError):
    """Unknown filter or a filter that violates the filter-bank invariants."""


class SyntheticSpecError(WaveletPeriodError, ValueError):
    """Synthetic generator parameters are invalid."""
