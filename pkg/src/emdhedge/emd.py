"""Empirical mode decomposition: sifting, IMF tests, adaptive cycle estimates.

The decomposition repeatedly subtracts the mean of the cubic-spline envelopes
through the local maxima and minima until the candidate satisfies the two IMF
conditions (extrema/zero-crossing balance; near-zero envelope mean), then peels
the IMF off and continues on the remainder until only a trend is left.

Envelopes use natural cubic splines with ``boundary_mirror_count`` extrema
mirrored beyond each end to suppress end swings.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DataError, InsufficientDataError

logger = logging.getLogger(__name__)

__all__ = [
    "SiftConfig",
    "Imf",
    "ImfSet",
    "SiftResult",
    "find_extrema",
    "envelope_mean",
    "is_imf",
    "sift",
    "decompose",
    "cycle",
]


@dataclass(frozen=True)
class SiftConfig:
    """Stopping rules and boundary handling for the sifting loop."""

    envelope_tolerance: float = 0.05  # rms(envelope mean) <= tol * rms(candidate)
    max_sifts_per_imf: int = 64
    max_imfs: int = 16
    boundary_mirror_count: int = 2

    def __post_init__(self):
        if not (0.0 < self.envelope_tolerance < 1.0):
            raise ValueError("envelope_tolerance must be in (0, 1)")
        if min(self.max_sifts_per_imf, self.max_imfs, self.boundary_mirror_count) < 1:
            raise ValueError("sift config counts must be positive")


@dataclass(frozen=True)
class Imf:
    """One intrinsic mode function extracted by the decomposition."""

    values: np.ndarray
    index: int  # 1-based position in the decomposition
    cycle: float  # mean period in days
    n_maxima: int
    n_minima: int
    n_zero_crossings: int
    n_sifts: int
    converged: bool


@dataclass(frozen=True)
class ImfSet:
    """Ordered IMFs plus the residue from one decomposition."""

    imfs: tuple[Imf, ...]
    residue: np.ndarray
    source_len: int

    def reconstruct(self) -> np.ndarray:
        out = self.residue.copy()
        for imf in self.imfs:
            out += imf.values
        return out


@dataclass(frozen=True)
class SiftResult:
    values: np.ndarray
    n_sifts: int
    converged: bool
    residue_like: bool = False


def _plateau_runs(x: np.ndarray):
    """Run-length encode x into (start, stop, value) runs of equal values."""
    n = len(x)
    starts = np.flatnonzero(np.r_[True, x[1:] != x[:-1]])
    stops = np.r_[starts[1:], n]
    return starts, stops


def find_extrema(x: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Locate strict local maxima/minima and count zero crossings.

    A flat plateau dominating both neighbours contributes one extremum at its
    midpoint. Zero crossings are sign changes between consecutive nonzero
    samples; an exact zero between opposite signs counts once.
    """
    x = np.asarray(x, dtype=float)
    if len(x) < 3:
        raise InsufficientDataError("need at least 3 samples for extrema detection")

    starts, stops = _plateau_runs(x)
    run_vals = x[starts]
    maxima: list[int] = []
    minima: list[int] = []
    for i in range(1, len(run_vals) - 1):
        v = run_vals[i]
        mid = (starts[i] + stops[i] - 1) // 2
        if v > run_vals[i - 1] and v > run_vals[i + 1]:
            maxima.append(mid)
        elif v < run_vals[i - 1] and v < run_vals[i + 1]:
            minima.append(mid)

    nz = x[x != 0.0]
    crossings = int(np.count_nonzero(np.sign(nz[1:]) != np.sign(nz[:-1]))) if len(nz) > 1 else 0
    return np.array(maxima, dtype=int), np.array(minima, dtype=int), crossings


def _mirrored_knots(idx: np.ndarray, vals: np.ndarray, n: int, mirror: int):
    """Extend extrema by reflecting ``mirror`` of them beyond each end."""
    m = min(mirror, len(idx))
    left_i = -idx[:m][::-1]
    left_v = vals[:m][::-1]
    right_i = 2 * (n - 1) - idx[-m:][::-1]
    right_v = vals[-m:][::-1]
    knots_i = np.concatenate([left_i, idx, right_i])
    knots_v = np.concatenate([left_v, vals, right_v])
    # dedupe any coincident knots from the reflection
    knots_i, keep = np.unique(knots_i, return_index=True)
    return knots_i, knots_v[keep]


def envelope_mean(
    x: np.ndarray,
    maxima: np.ndarray,
    minima: np.ndarray,
    mirror: int = 2,
) -> np.ndarray | None:
    """Pointwise mean of the upper and lower natural cubic spline envelopes.

    Returns None when either side has fewer than 2 extrema, which signals
    decomposition termination rather than a failure.
    """
    x = np.asarray(x, dtype=float)
    if len(maxima) < 2 or len(minima) < 2:
        return None
    n = len(x)
    t = np.arange(n)
    ui, uv = _mirrored_knots(np.asarray(maxima), x[maxima], n, mirror)
    li, lv = _mirrored_knots(np.asarray(minima), x[minima], n, mirror)
    upper = CubicSpline(ui, uv, bc_type="natural")(t)
    lower = CubicSpline(li, lv, bc_type="natural")(t)
    return 0.5 * (upper + lower)


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.square(x))))


def is_imf(x: np.ndarray, envelope_tolerance: float = 0.05, mirror: int = 2) -> tuple[bool, dict]:
    """Test the two IMF conditions.

    Condition 1: |#extrema - #zero crossings| <= 1.
    Condition 2: rms of the envelope mean <= tolerance * rms(x).
    """
    maxima, minima, crossings = find_extrema(x)
    counts = {
        "n_maxima": len(maxima),
        "n_minima": len(minima),
        "n_zero_crossings": crossings,
    }
    n_ext = len(maxima) + len(minima)
    if abs(n_ext - crossings) > 1:
        return False, counts
    m = envelope_mean(x, maxima, minima, mirror)
    if m is None:
        return False, counts
    rx = _rms(x)
    if rx == 0.0:
        return False, counts
    return _rms(m) <= envelope_tolerance * rx, counts


def sift(x: np.ndarray, cfg: SiftConfig = SiftConfig()) -> SiftResult:
    """Refine a candidate by repeated envelope-mean subtraction.

    Stops at the first iterate satisfying both IMF conditions, or after
    ``max_sifts_per_imf`` subtractions (flagged non-converged). If the
    envelopes vanish mid-sift the current iterate is returned residue-like.
    """
    h = np.asarray(x, dtype=float).copy()
    n_sifts = 0
    while True:
        maxima, minima, crossings = find_extrema(h)
        m = envelope_mean(h, maxima, minima, cfg.boundary_mirror_count)
        if m is None:
            return SiftResult(h, n_sifts, converged=False, residue_like=True)
        n_ext = len(maxima) + len(minima)
        rx = _rms(h)
        balanced = abs(n_ext - crossings) <= 1
        if balanced and rx > 0.0 and _rms(m) <= cfg.envelope_tolerance * rx:
            return SiftResult(h, n_sifts, converged=True)
        if n_sifts >= cfg.max_sifts_per_imf:
            return SiftResult(h, n_sifts, converged=False)
        h = h - m
        n_sifts += 1


def cycle(n_maxima: int, n_minima: int, series_len: int) -> float:
    """Mean period estimate from extrema counts: 2 * len / (#max + #min - 1)."""
    denom = n_maxima + n_minima - 1
    if denom < 1:
        raise DataError("cycle undefined: fewer than 2 extrema (residue/trend case)")
    return series_len / denom * 2.0


def _is_monotone(x: np.ndarray) -> bool:
    d = np.diff(x)
    return bool(np.all(d >= 0) or np.all(d <= 0))


def decompose(x: np.ndarray, cfg: SiftConfig = SiftConfig()) -> ImfSet:
    """Full decomposition: extract IMFs until only a trend remains.

    Reconstruction is exact up to float error because sifting is pure
    subtraction. Each emitted IMF carries its extrema counts and cycle.
    """
    x = np.asarray(x, dtype=float)
    if len(x) < 8:
        raise InsufficientDataError("need at least 8 samples to decompose")
    residue = x.copy()
    imfs: list[Imf] = []
    while len(imfs) < cfg.max_imfs:
        maxima, minima, _ = find_extrema(residue)
        if len(maxima) < 2 or len(minima) < 2 or _is_monotone(residue):
            break
        result = sift(residue, cfg)
        if result.residue_like:
            break
        mx, mn, zc = find_extrema(result.values)
        if len(mx) + len(mn) < 2:
            break
        imfs.append(
            Imf(
                values=result.values,
                index=len(imfs) + 1,
                cycle=cycle(len(mx), len(mn), len(x)),
                n_maxima=len(mx),
                n_minima=len(mn),
                n_zero_crossings=zc,
                n_sifts=result.n_sifts,
                converged=result.converged,
            )
        )
        residue = residue - result.values
    if imfs and not all(i.converged for i in imfs):
        logger.warning("decomposition emitted non-converged IMFs (sift cap hit)")
    return ImfSet(imfs=tuple(imfs), residue=residue, source_len=len(x))
