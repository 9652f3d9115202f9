"""Time-series data model: price series, differencing transforms, CSV ingestion.

Conventions
-----------
- Timestamps are numpy ``datetime64[D]`` arrays, strictly increasing.
- Differences are overlapping (stride 1) by default; ``stride='block'``
  subsamples every ``horizon`` observations for sensitivity checks.
- A SegmentedSeries is a set of contiguous slices of one parent series;
  no transform ever differences across a segment boundary.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import DataError, InsufficientDataError

__all__ = [
    "Leg",
    "DiffKind",
    "PriceSeries",
    "ReturnSeries",
    "SegmentedSeries",
    "load_csv",
    "horizon_diff",
    "segment_diffs",
    "restrict",
]


class Leg(Enum):
    SPOT = "spot"
    FUTURES = "futures"


class DiffKind(Enum):
    LEVEL = "level"
    LOG = "log"


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PriceSeries:
    """A timestamped level series for one contract leg."""

    id: str
    leg: Leg
    timestamps: np.ndarray  # datetime64[D]
    values: np.ndarray  # float64, strictly positive

    def __post_init__(self):
        ts = _readonly(np.asarray(self.timestamps, dtype="datetime64[D]"))
        vals = _readonly(np.asarray(self.values, dtype=float))
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)
        if len(ts) != len(vals):
            raise DataError("timestamps and values must have equal length")
        if len(vals) < 2:
            raise InsufficientDataError("price series needs at least 2 rows")
        if not np.all(np.isfinite(vals)):
            raise DataError("price values must be finite")
        if np.any(vals <= 0.0):
            raise DataError("price values must be strictly positive")
        if np.any(np.diff(ts).astype(int) <= 0):
            raise DataError("timestamps must be strictly increasing")

    def __len__(self) -> int:
        return len(self.values)

    def log_values(self) -> np.ndarray:
        return np.log(self.values)


@dataclass(frozen=True)
class ReturnSeries:
    """Horizon-differenced observations of a price series."""

    horizon: int
    kind: DiffKind
    values: np.ndarray
    origin_index: np.ndarray  # index of each observation's later endpoint

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(np.asarray(self.values, dtype=float)))
        object.__setattr__(self, "origin_index", _readonly(np.asarray(self.origin_index, dtype=int)))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SegmentedSeries:
    """Contiguous, non-overlapping slices of a parent price series.

    ``segments`` are half-open index ranges into the parent arrays, in
    chronological order with implicit gaps between them.
    """

    parent: PriceSeries
    segments: tuple[range, ...]

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        last_stop = 0
        for seg in segs:
            if seg.start < last_stop or seg.step != 1:
                raise DataError("segments must be ordered, non-overlapping, step 1")
            if seg.start < 0 or seg.stop > len(self.parent):
                raise DataError("segment out of bounds")
            if len(seg) == 0:
                raise DataError("empty segment")
            last_stop = seg.stop

    @property
    def n_obs(self) -> int:
        return sum(len(s) for s in self.segments)

    def segment_values(self):
        for seg in self.segments:
            yield self.parent.values[seg.start : seg.stop]


def load_csv(
    path: str | Path,
    date_col: str = "date",
    spot_col: str = "spot",
    futures_col: str = "futures",
    spot_id: str = "spot",
    futures_id: str = "futures",
) -> tuple[PriceSeries, PriceSeries, int]:
    """Load a paired spot/futures CSV.

    Rows with a missing value on either leg are dropped pairwise so the two
    legs stay aligned. Returns (spot, futures, n_dropped).
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"input file not found: {path}")
    dates: list[np.datetime64] = []
    spot_vals: list[float] = []
    fut_vals: list[float] = []
    dropped = 0
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty file")
        for col in (date_col, spot_col, futures_col):
            if col not in reader.fieldnames:
                raise DataError(f"{path}: missing column '{col}' (have {reader.fieldnames})")
        for i, row in enumerate(reader, start=2):  # header is line 1
            raw_s = (row[spot_col] or "").strip()
            raw_f = (row[futures_col] or "").strip()
            if not raw_s or not raw_f:
                dropped += 1
                continue
            raw_d = (row[date_col] or "").strip()
            try:
                d = np.datetime64(raw_d, "D")
            except ValueError:
                raise DataError(f"{path}:{i}: unparseable date '{raw_d}'") from None
            try:
                s = float(raw_s)
                f = float(raw_f)
            except ValueError:
                raise DataError(f"{path}:{i}: unparseable price") from None
            if not (math.isfinite(s) and math.isfinite(f)) or s <= 0 or f <= 0:
                raise DataError(f"{path}:{i}: non-positive or non-finite price")
            if dates and d <= dates[-1]:
                raise DataError(f"{path}:{i}: duplicated or out-of-order date {d}")
            dates.append(d)
            spot_vals.append(s)
            fut_vals.append(f)
    if len(dates) < 2:
        raise InsufficientDataError(f"{path}: fewer than 2 usable rows")
    ts = np.array(dates, dtype="datetime64[D]")
    spot = PriceSeries(spot_id, Leg.SPOT, ts, np.array(spot_vals))
    fut = PriceSeries(futures_id, Leg.FUTURES, ts, np.array(fut_vals))
    return spot, fut, dropped


def _diff_values(x: np.ndarray, horizon: int, kind: DiffKind) -> np.ndarray:
    if kind is DiffKind.LOG:
        x = np.log(x)
    return x[horizon:] - x[:-horizon]


def horizon_diff(
    series: PriceSeries,
    horizon: int,
    kind: DiffKind = DiffKind.LOG,
    stride_block: bool = False,
) -> ReturnSeries:
    """Overlapping horizon-h differences of a price series.

    With ``stride_block`` the observations are subsampled every ``horizon``
    steps (non-overlapping blocks) instead of stride 1.
    """
    if horizon < 1:
        raise DataError("horizon must be >= 1")
    if horizon >= len(series):
        raise InsufficientDataError(
            f"horizon {horizon} >= series length {len(series)}"
        )
    vals = _diff_values(series.values, horizon, kind)
    idx = np.arange(horizon, len(series))
    if stride_block:
        vals = vals[::horizon]
        idx = idx[::horizon]
    return ReturnSeries(horizon=horizon, kind=kind, values=vals, origin_index=idx)


def segment_diffs(
    seg: SegmentedSeries | PriceSeries,
    horizon: int,
    kind: DiffKind = DiffKind.LOG,
    stride_block: bool = False,
) -> np.ndarray:
    """Pool horizon-h differences across segments, never crossing a boundary.

    Segments shorter than ``horizon + 1`` contribute no observations.
    """
    if isinstance(seg, PriceSeries):
        return horizon_diff(seg, horizon, kind, stride_block).values
    out = []
    for vals in seg.segment_values():
        if len(vals) > horizon:
            d = _diff_values(vals, horizon, kind)
            if stride_block:
                d = d[::horizon]
            out.append(d)
    if not out:
        return np.empty(0)
    return np.concatenate(out)


def restrict(series: PriceSeries, groups: list[range] | tuple[range, ...]) -> SegmentedSeries:
    """Restrict a series to the given index ranges, merging adjacent ones."""
    ordered = sorted(groups, key=lambda r: r.start)
    merged: list[range] = []
    for g in ordered:
        if g.step != 1:
            raise DataError("group ranges must have step 1")
        if merged and g.start < merged[-1].stop:
            raise DataError(f"overlapping group ranges at index {g.start}")
        if merged and g.start == merged[-1].stop:
            merged[-1] = range(merged[-1].start, g.stop)
        else:
            merged.append(range(g.start, g.stop))
    return SegmentedSeries(parent=series, segments=tuple(merged))
