"""Seeded synthetic rainfall with planted periods and low-rainfall dips."""

from __future__ import annotations

import logging
import math
from typing import NamedTuple

import numpy as np

from src.task.errors import SyntheticSpecError
from src.utils.series_io import MonthStamp, RainfallSeries

logger = logging.getLogger(__name__)

MIN_SYNTHETIC_LENGTH = 24
DEFAULT_START = MonthStamp(1991, 1)

# weights that keep a June/December profile free of secondary maxima
BIMODAL_AMPLITUDES = {6: 100.0, 3: 40.0, 2: 20.0}
UNIMODAL_AMPLITUDES = {12: 100.0}
# June-peaking cycles weak enough against 30 mm noise that level 4 stays empty
THREE_LEVEL_AMPLITUDES = {6: 30.0, 3: 15.0, 2: 8.0}


class PlantedComponent(NamedTuple):
    """One cosine a * cos(2 pi t / period + phase), t counted in months from 0."""

    period: float
    amplitude: float
    phase: float = 0.0

    def to_dict(self) -> dict:
        """JSON-safe dictionary."""
        return {
            "period": self.period,
            "amplitude": self.amplitude,
            "phase": self.phase,
        }


class DipPlan(NamedTuple):
    """Recurring low-rainfall windows subtracted from the series.

    Windows start at the 1-based month `first_start` and every `interval` months
    after, each `width` months wide and `depth` mm deep.
    """

    first_start: int
    interval: int
    width: int
    depth: float

    def windows(self, length: int) -> list[tuple[int, int]]:
        """1-based inclusive windows that fit inside `length` months."""
        return [
            (start, start + self.width - 1)
            for start in range(self.first_start, length + 1, self.interval)
            if start + self.width - 1 <= length
        ]


class SyntheticSpec(NamedTuple):
    """Generator parameters. `seed` is required; there is no ambient randomness."""

    components: tuple[PlantedComponent, ...]
    noise_sigma: float
    length: int
    baseline: float
    seed: int
    start: MonthStamp = DEFAULT_START
    dips: DipPlan | None = None


class GroundTruth(NamedTuple):
    """What the generator planted, for oracle checks."""

    periods: tuple[float, ...]
    dip_windows: tuple[tuple[int, int], ...]
    seed: int

    def to_dict(self) -> dict:
        """JSON-safe dictionary."""
        return {
            "periods": list(self.periods),
            "dip_windows": [list(w) for w in self.dip_windows],
            "seed": self.seed,
        }


def _check(spec: SyntheticSpec) -> None:
    if spec.length < MIN_SYNTHETIC_LENGTH:
        msg = f"length must be at least {MIN_SYNTHETIC_LENGTH}, got {spec.length}"
        raise SyntheticSpecError(msg)
    if spec.noise_sigma < 0:
        msg = f"noise sigma must be non-negative, got {spec.noise_sigma}"
        raise SyntheticSpecError(msg)
    for c in spec.components:
        if c.period <= 0:
            msg = f"period must be positive, got {c.period}"
            raise SyntheticSpecError(msg)
        if c.amplitude < 0:
            msg = f"amplitude must be non-negative, got {c.amplitude}"
            raise SyntheticSpecError(msg)
    if spec.dips is not None:
        dips = spec.dips
        if dips.first_start < 1 or dips.interval < 1 or dips.width < 1:
            msg = "dip start, interval and width must all be at least 1"
            raise SyntheticSpecError(msg)
        if dips.depth < 0:
            msg = f"dip depth must be non-negative, got {dips.depth}"
            raise SyntheticSpecError(msg)


def generate_synthetic(spec: SyntheticSpec) -> tuple[RainfallSeries, GroundTruth]:
    """Generate baseline + sum of cosines + Gaussian noise - dips, clipped at 0.

    Args:
        spec (SyntheticSpec): generator parameters.

    Returns:
        tuple[RainfallSeries, GroundTruth]: the series and what was planted.

    Raises:
        SyntheticSpecError: for invalid parameters or an all-zero result.

    """
    _check(spec)
    rng = np.random.default_rng(spec.seed)
    t = np.arange(spec.length, dtype=float)

    values = np.full(spec.length, float(spec.baseline))
    for c in spec.components:
        values += c.amplitude * np.cos(2 * np.pi * t / c.period + c.phase)
    if spec.noise_sigma > 0:
        values += rng.normal(0.0, spec.noise_sigma, spec.length)

    windows = [] if spec.dips is None else spec.dips.windows(spec.length)
    for start, end in windows:
        values[start - 1 : end] -= spec.dips.depth

    values = np.clip(values, 0.0, None)
    if not np.any(values > 0):
        msg = "parameters produce an all-zero series"
        raise SyntheticSpecError(msg)

    logger.info(
        "Generated %d synthetic months with %d component(s) and %d dip(s)",
        spec.length,
        len(spec.components),
        len(windows),
    )
    truth = GroundTruth(
        tuple(c.period for c in spec.components),
        tuple(windows),
        spec.seed,
    )
    return RainfallSeries(spec.start, values), truth


def phase_for_peak(period: float, peak_month: int, start: MonthStamp) -> float:
    """Phase that puts a cosine's maximum on the first `peak_month` of the series."""
    t0 = (peak_month - start.month) % 12
    return -2 * math.pi * math.fmod(t0, period) / period


def components_peaking_at(
    amplitudes: dict[int, float],
    peak_month: int,
    start: MonthStamp = DEFAULT_START,
) -> tuple[PlantedComponent, ...]:
    """Components whose maxima all coincide on `peak_month`."""
    return tuple(
        PlantedComponent(p, a, phase_for_peak(p, peak_month, start))
        for p, a in amplitudes.items()
    )


def parse_components(text: str) -> tuple[PlantedComponent, ...]:
    """Parse `period:amplitude[:phase]` items separated by commas, e.g. `6:100,3:40`.

    Raises:
        SyntheticSpecError: for malformed items.

    """
    components = []
    for item in text.replace(" ", "").split(","):
        if not item:
            continue
        parts = item.split(":")
        if len(parts) not in {2, 3}:
            msg = f"{item!r} is not period:amplitude[:phase]"
            raise SyntheticSpecError(msg)
        try:
            numbers = [float(p) for p in parts]
        except ValueError as v:
            msg = f"{item!r} contains a non-numeric field"
            raise SyntheticSpecError(msg) from v
        components.append(PlantedComponent(*numbers))
    return tuple(components)


def parse_dips(text: str) -> DipPlan:
    """Parse `first_start:interval:width:depth`, e.g. `5:16:3:150`.

    Raises:
        SyntheticSpecError: for malformed plans.

    """
    parts = text.replace(" ", "").split(":")
    if len(parts) != 4:
        msg = f"{text!r} is not first_start:interval:width:depth"
        raise SyntheticSpecError(msg)
    try:
        return DipPlan(int(parts[0]), int(parts[1]), int(parts[2]), float(parts[3]))
    except ValueError as v:
        msg = f"{text!r} contains a non-numeric field"
        raise SyntheticSpecError(msg) from v


def three_level_spec(seed: int = 1) -> SyntheticSpec:
    """Noisy June/December series with two-month dips every other January.

    With seed 1 and the default Haar analysis of depth 4, levels 1 to 3 are
    significant and level 4 is not. The CLI equivalent is
    `synth --components 6:30,3:15,2:8 --peak-month 6 --noise-sigma 30
    --dips 13:24:2:250 --seed 1`.
    """
    return SyntheticSpec(
        components=components_peaking_at(THREE_LEVEL_AMPLITUDES, 6),
        noise_sigma=30.0,
        length=312,
        baseline=300.0,
        seed=seed,
        dips=DipPlan(13, 24, 2, 250.0),
    )
