"""Orthogonal wavelet filter pairs (Haar and Daubechies 2-4) and their checks."""

from __future__ import annotations

import math
from enum import Enum
from functools import cache
from typing import NamedTuple

import numpy as np

from src.task.errors import FilterError

FILTER_TOL = 1e-12

_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)
_SQRT10 = math.sqrt(10.0)
_DB3_ROOT = math.sqrt(5.0 + 2.0 * _SQRT10)

# low-pass analysis taps, dec_lo[0] multiplies x[2k]
_DEC_LO: dict[str, tuple[float, ...]] = {
    "haar": (1 / _SQRT2, 1 / _SQRT2),
    "db2": tuple(
        c / (4 * _SQRT2) for c in (1 + _SQRT3, 3 + _SQRT3, 3 - _SQRT3, 1 - _SQRT3)
    ),
    "db3": tuple(
        c * _SQRT2 / 32
        for c in (
            1 + _SQRT10 + _DB3_ROOT,
            5 + _SQRT10 + 3 * _DB3_ROOT,
            10 - 2 * _SQRT10 + 2 * _DB3_ROOT,
            10 - 2 * _SQRT10 - 2 * _DB3_ROOT,
            5 + _SQRT10 - 3 * _DB3_ROOT,
            1 + _SQRT10 - _DB3_ROOT,
        )
    ),
    "db4": (
        0.2303778133088965,
        0.71484657055291565,
        0.63088076792985891,
        -0.027983769416859854,
        -0.18703481171909308,
        0.030841381835560764,
        0.0328830116668852,
        -0.010597401785069032,
    ),
}


class WaveletName(Enum):
    """Supported orthogonal wavelets."""

    HAAR = "haar"
    DB2 = "db2"
    DB3 = "db3"
    DB4 = "db4"


class WaveletFilter(NamedTuple):
    """Analysis/synthesis filter quadruple of an orthonormal two-channel bank.

    Analysis correlates: approx[k] = sum_n dec_lo[n] * x[2k + n].
    Synthesis filters are the time reverse of the analysis ones.
    """

    name: str
    dec_lo: np.ndarray
    dec_hi: np.ndarray
    rec_lo: np.ndarray
    rec_hi: np.ndarray

    @property
    def length(self) -> int:
        """Number of taps."""
        return len(self.dec_lo)

    def invariant_residuals(self) -> dict[str, float]:
        """Compute how far the filter is from each filter-bank invariant.

        Returns:
            dict[str, float]: residual per invariant; all should be below
            `FILTER_TOL`.

        """
        lo, hi = self.dec_lo, self.dec_hi
        n = self.length
        shifts = [
            abs(float(np.dot(lo[: n - 2 * m], lo[2 * m :]))) for m in range(1, n // 2)
        ]
        mirror = np.array([(-1) ** k * lo[n - 1 - k] for k in range(n)])
        return {
            "lowpass_sum": abs(float(lo.sum()) - _SQRT2),
            "highpass_sum": abs(float(hi.sum())),
            "unit_norm": abs(float(np.dot(lo, lo)) - 1.0),
            "double_shift": max(shifts, default=0.0),
            "quadrature_mirror": float(np.max(np.abs(hi - mirror))),
        }

    def validate(self, tol: float = FILTER_TOL) -> None:
        """Raise if any filter-bank invariant is violated beyond `tol`."""
        bad = {k: v for k, v in self.invariant_residuals().items() if v > tol}
        if bad:
            detail = ", ".join(f"{k}={v:.3e}" for k, v in sorted(bad.items()))
            msg = f"filter {self.name!r} violates invariants: {detail}"
            raise FilterError(msg)


@cache
def make_filter(name: str | WaveletName) -> WaveletFilter:
    """Build and validate the filter quadruple for `name`.

    Args:
        name (str | WaveletName): one of haar, db2, db3, db4.

    Returns:
        WaveletFilter: a validated filter.

    Raises:
        FilterError: for an unknown name or (never expected) a failed invariant.

    """
    key = name.value if isinstance(name, WaveletName) else str(name).lower()
    if key not in _DEC_LO:
        msg = f"unknown wavelet {name!r}; choose from {', '.join(_DEC_LO)}"
        raise FilterError(msg)

    dec_lo = np.array(_DEC_LO[key])
    n = len(dec_lo)
    dec_hi = np.array([(-1) ** k * dec_lo[n - 1 - k] for k in range(n)])
    for arr in (dec_lo, dec_hi):
        arr.flags.writeable = False
    rec_lo, rec_hi = dec_lo[::-1], dec_hi[::-1]

    f = WaveletFilter(key, dec_lo, dec_hi, rec_lo, rec_hi)
    f.validate()
    return f


def haar_psi(u: np.ndarray) -> np.ndarray:
    """Analytic Haar mother wavelet: +1 on [0, 1/2), -1 on [1/2, 1), 0 elsewhere."""
    u = np.asarray(u, dtype=float)
    positive = (u >= 0) & (u < 0.5)
    negative = (u >= 0.5) & (u < 1)
    return positive.astype(float) - negative.astype(float)


def check_admissibility(samples: np.ndarray, dx: float) -> float:
    """Zero-mean residual |sum(samples) * dx| of a sampled wavelet.

    Args:
        samples (np.ndarray): finite samples of the candidate wavelet.
        dx (float): sample spacing, > 0.

    Returns:
        float: the residual; callers compare it against their tolerance.

    """
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        msg = "cannot check admissibility of an empty sample vector"
        raise ValueError(msg)
    if dx <= 0:
        msg = f"dx must be positive, got {dx}"
        raise ValueError(msg)
    if not np.all(np.isfinite(samples)):
        msg = "samples must be finite"
        raise ValueError(msg)
    return abs(float(np.sum(samples)) * dx)
