"""Multilevel discrete wavelet decomposition and reconstruction.

Phase convention: output index k of an analysis stage correlates the filter with
x[2k], x[2k+1], ... . Periodic boundaries right-pad odd inputs by repeating the
last sample; symmetric boundaries reflect L-2 samples on the left and L-1 on the
right, giving floor((n + L - 1) / 2) coefficients per branch.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Literal

import numpy as np

from src.task.errors import DecompositionError, LevelRangeError
from src.task.filters import WaveletFilter, make_filter

logger = logging.getLogger(__name__)

APPROX = "approx"


class BoundaryMode(Enum):
    """Signal extension used at the edges of each analysis stage."""

    PERIODIC = "periodic"
    SYMMETRIC = "symmetric"


def coeff_length(n: int, filter_length: int, boundary: BoundaryMode) -> int:
    """Coefficients per branch produced by one analysis stage on `n` samples."""
    if boundary is BoundaryMode.PERIODIC:
        return (n + 1) // 2
    return (n + filter_length - 1) // 2


def _windows(n_coeffs: int, filter_length: int, period: int | None) -> np.ndarray:
    idx = 2 * np.arange(n_coeffs)[:, None] + np.arange(filter_length)[None, :]
    return idx if period is None else idx % period


def dwt_step(
    x: np.ndarray,
    f: WaveletFilter,
    b: BoundaryMode = BoundaryMode.PERIODIC,
) -> tuple[np.ndarray, np.ndarray]:
    """Run a single analysis stage.

    Args:
        x (np.ndarray): input samples, at least as many as the filter has taps.
        f (WaveletFilter): filter bank.
        b (BoundaryMode, optional): boundary handling. Defaults to periodic.

    Returns:
        tuple[np.ndarray, np.ndarray]: approximation and detail coefficients.

    """
    x = np.asarray(x, dtype=float)
    n, taps = len(x), f.length
    if n < taps:
        msg = f"input of length {n} is shorter than the {taps}-tap {f.name} filter"
        raise LevelRangeError(msg)

    n_coeffs = coeff_length(n, taps, b)
    if b is BoundaryMode.PERIODIC:
        if n % 2:
            x = np.append(x, x[-1])
        windows = x[_windows(n_coeffs, taps, len(x))]
    else:
        ext = np.pad(x, (taps - 2, taps - 1), mode="symmetric")
        windows = ext[_windows(n_coeffs, taps, None)]

    return windows @ f.dec_lo, windows @ f.dec_hi


def idwt_step(
    approx: np.ndarray,
    detail: np.ndarray,
    f: WaveletFilter,
    b: BoundaryMode,
    out_len: int,
) -> np.ndarray:
    """Run a single synthesis stage, the exact inverse of `dwt_step`.

    Args:
        approx (np.ndarray): approximation coefficients.
        detail (np.ndarray): detail coefficients, same length as `approx`.
        f (WaveletFilter): filter bank used for the analysis.
        b (BoundaryMode): boundary handling used for the analysis.
        out_len (int): length of the signal that was analysed.

    Returns:
        np.ndarray: reconstructed samples of length `out_len`.

    """
    approx = np.asarray(approx, dtype=float)
    detail = np.asarray(detail, dtype=float)
    if approx.shape != detail.shape:
        msg = f"approx/detail lengths differ: {len(approx)} vs {len(detail)}"
        raise DecompositionError(msg)

    n_coeffs, taps = len(approx), f.length
    if coeff_length(out_len, taps, b) != n_coeffs:
        msg = f"{n_coeffs} coefficients cannot come from a signal of length {out_len}"
        raise DecompositionError(msg)

    # rec filters are time-reversed analysis taps
    atoms = approx[:, None] * f.rec_lo[::-1] + detail[:, None] * f.rec_hi[::-1]
    if b is BoundaryMode.PERIODIC:
        y = np.zeros(2 * n_coeffs)
        np.add.at(y, _windows(n_coeffs, taps, len(y)), atoms)
        return y[:out_len]

    y = np.zeros(2 * (n_coeffs - 1) + taps)
    np.add.at(y, _windows(n_coeffs, taps, None), atoms)
    return y[taps - 2 : taps - 2 + out_len]


def max_level(n: int, f: WaveletFilter) -> int:
    """Deepest useful decomposition level for `n` samples.

    floor(log2(n)) for Haar, floor(log2(n / (L - 1))) for longer filters, and at
    least 1 whenever `n` covers the filter.
    """
    taps = f.length
    if n < taps:
        msg = f"{n} samples cannot be analysed with the {taps}-tap {f.name} filter"
        raise LevelRangeError(msg)
    if taps == 2:
        return n.bit_length() - 1
    level = 0
    while (taps - 1) << (level + 1) <= n:
        level += 1
    return max(level, 1)


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Approximation at depth J plus details for levels 1 (finest) .. J (coarsest).

    `input_lengths[j]` is the length of the signal analysed at level `j + 1`,
    so `input_lengths[0]` is the original length.
    """

    filter: WaveletFilter
    boundary: BoundaryMode
    approx: np.ndarray
    details: tuple[np.ndarray, ...]
    input_lengths: tuple[int, ...]

    def __post_init__(self) -> None:
        """Freeze coefficient arrays and check the length bookkeeping."""
        approx = np.array(self.approx, dtype=float)
        details = tuple(np.array(d, dtype=float) for d in self.details)
        for arr in (approx, *details):
            arr.flags.writeable = False
        object.__setattr__(self, "approx", approx)
        object.__setattr__(self, "details", details)
        object.__setattr__(self, "input_lengths", tuple(self.input_lengths))
        self.validate()

    @property
    def depth(self) -> int:
        """Number of decomposition levels J."""
        return len(self.details)

    @property
    def original_length(self) -> int:
        """Length of the analysed signal."""
        return self.input_lengths[0]

    def validate(self) -> None:
        """Raise `DecompositionError` if the recorded lengths are inconsistent."""
        if not self.details or len(self.input_lengths) != len(self.details):
            msg = (
                f"{len(self.details)} detail levels but "
                f"{len(self.input_lengths)} recorded lengths"
            )
            raise DecompositionError(msg)
        taps = self.filter.length
        for j, (n, d) in enumerate(zip(self.input_lengths, self.details), start=1):
            expected = coeff_length(n, taps, self.boundary)
            if len(d) != expected:
                msg = f"level {j}: {len(d)} detail coefficients, expected {expected}"
                raise DecompositionError(msg)
            next_len = (
                self.input_lengths[j] if j < self.depth else len(self.approx)
            )
            if next_len != expected:
                msg = f"level {j}: approximation length {next_len}, expected {expected}"
                raise DecompositionError(msg)

    def with_coefficients(
        self,
        approx: np.ndarray,
        details: tuple[np.ndarray, ...] | list[np.ndarray],
    ) -> Decomposition:
        """Copy with new coefficient vectors and the same bookkeeping."""
        return Decomposition(
            self.filter,
            self.boundary,
            approx,
            tuple(details),
            self.input_lengths,
        )

    def detail(self, level: int) -> np.ndarray:
        """Detail coefficients of a 1-based level."""
        self.check_level(level)
        return self.details[level - 1]

    def level_energy(self, level: int) -> float:
        """Sum of squared detail coefficients at a level."""
        return float(np.sum(self.detail(level) ** 2))

    def total_energy(self) -> float:
        """Sum of squares over the approximation and every detail level."""
        return float(np.sum(self.approx**2)) + sum(
            self.level_energy(j) for j in range(1, self.depth + 1)
        )

    def check_level(self, level: int) -> None:
        """Raise `LevelRangeError` unless `level` is in 1..J."""
        if not 1 <= level <= self.depth:
            msg = f"level {level} outside 1..{self.depth}"
            raise LevelRangeError(msg, maximum=self.depth)

    def to_dict(self) -> dict:
        """JSON-safe dictionary; floats keep full precision."""
        return {
            "filter": self.filter.name,
            "boundary": self.boundary.value,
            "depth": self.depth,
            "original_length": self.original_length,
            "input_lengths": list(self.input_lengths),
            "approx": self.approx.tolist(),
            "details": [d.tolist() for d in self.details],
        }

    @classmethod
    def from_dict(cls, data: dict) -> Decomposition:
        """Rebuild a decomposition written by `to_dict`."""
        return cls(
            make_filter(data["filter"]),
            BoundaryMode(data["boundary"]),
            np.asarray(data["approx"], dtype=float),
            tuple(np.asarray(d, dtype=float) for d in data["details"]),
            tuple(data["input_lengths"]),
        )


def wavedec(
    x: np.ndarray,
    f: WaveletFilter,
    b: BoundaryMode = BoundaryMode.PERIODIC,
    depth: int = 4,
) -> Decomposition:
    """Decompose `x` into `depth` levels by cascading `dwt_step`.

    Raises:
        LevelRangeError: if `depth` is outside 1..max_level(len(x), f).

    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or not np.all(np.isfinite(x)):
        msg = "signal must be a one-dimensional vector of finite values"
        raise ValueError(msg)
    deepest = max_level(len(x), f)
    if not 1 <= depth <= deepest:
        msg = f"depth {depth} outside 1..{deepest} for {len(x)} samples ({f.name})"
        raise LevelRangeError(msg, maximum=deepest)

    logger.debug("Decomposing %d samples with %s to depth %d", len(x), f.name, depth)
    approx = x
    details, lengths = [], []
    for _ in range(depth):
        lengths.append(len(approx))
        approx, detail = dwt_step(approx, f, b)
        details.append(detail)

    return Decomposition(f, b, approx, tuple(details), tuple(lengths))


def waverec(d: Decomposition) -> np.ndarray:
    """Invert a decomposition back to a signal of `d.original_length` samples."""
    d.validate()
    signal = d.approx
    for level in range(d.depth, 0, -1):
        signal = idwt_step(
            signal,
            d.details[level - 1],
            d.filter,
            d.boundary,
            d.input_lengths[level - 1],
        )
    return signal


def reconstruct_component(
    d: Decomposition,
    which: int | Literal["approx"],
) -> np.ndarray:
    """Reconstruct one level's contribution at the original length.

    Every other coefficient vector is zeroed before inversion, so the components of
    all levels plus the approximation add up to `waverec(d)`.

    Args:
        d (Decomposition): decomposition to draw from.
        which (int | Literal["approx"]): detail level 1..J, or `APPROX`.

    Returns:
        np.ndarray: the component signal.

    """
    zero_details = [np.zeros_like(c) for c in d.details]
    if which == APPROX:
        return waverec(d.with_coefficients(d.approx, zero_details))

    level = int(which)
    d.check_level(level)
    zero_details[level - 1] = d.details[level - 1]
    return waverec(d.with_coefficients(np.zeros_like(d.approx), zero_details))
