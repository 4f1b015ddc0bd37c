"""Contains various utility functions and shared constants."""

TOOL_VERSION = "0.1.0"

SERIES_COLS = ["year", "month", "rainfall_mm"]
MISSING_TOKENS = ("", "na")
MONTH_NAMES = [
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
]
