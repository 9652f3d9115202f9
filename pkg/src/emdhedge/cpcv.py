"""Combinatorial time-series cross-validation with performance paths.

The sample is split chronologically into N groups; every choice of k test
groups gives one train/test split (C(N,k) of them, test sets in lexicographic
order). Each group's test appearances, taken in split order, are assigned
path ids 1..C(N-1,k-1); a path is a chronological reassembly with exactly one
test cell per group. Path scores are the mean of cell scores for variance
reduction and the minimum for VaR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Callable

import numpy as np

from .errors import DataError, InsufficientDataError, NumericError
from .performance import (
    Criterion,
    Moments,
    build_portfolio,
    he_var,
    he_variance,
    moments,
)
from .series import DiffKind, PriceSeries, restrict

__all__ = [
    "Scheme",
    "GroupPartition",
    "SplitSet",
    "PathAssignment",
    "PathReport",
    "partition",
    "enumerate_splits",
    "assign_paths",
    "path_statistics",
    "run_cv",
]


class Scheme(Enum):
    EQUAL_COUNT = "equal"
    CALENDAR_YEAR = "year"


@dataclass(frozen=True)
class GroupPartition:
    scheme: Scheme
    groups: tuple[range, ...]
    sizes: tuple[int, ...]

    @property
    def n_groups(self) -> int:
        return len(self.groups)


@dataclass(frozen=True)
class SplitSet:
    n_groups: int
    k: int
    splits: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]  # (test, train)

    def __len__(self) -> int:
        return len(self.splits)


@dataclass(frozen=True)
class PathAssignment:
    n_paths: int
    # (group index, split index) -> 1-based path id
    cells: dict[tuple[int, int], int]

    def cells_of_path(self, path_id: int) -> list[tuple[int, int]]:
        return sorted(g_s for g_s, p in self.cells.items() if p == path_id)


# cell status markers in the score table
EXCLUDED = "excluded"
FAILED = "failed"


@dataclass(frozen=True)
class PathReport:
    method: str
    horizon: int
    criterion: Criterion
    per_split_values: tuple[float | None, ...]
    per_path_values: tuple[float, ...]
    stats: Moments | None
    excluded_groups: tuple[tuple[int, str], ...]
    n_paths_total: int
    n_paths_voided: int
    failed_splits: tuple[int, ...]


def partition(series: PriceSeries | int, scheme: Scheme, n_groups: int = 10) -> GroupPartition:
    """Partition the sample chronologically.

    EqualCount gives N-1 groups of floor(T/N) samples and a final group with
    the remainder; CalendarYear buckets by timestamp year.
    """
    if scheme is Scheme.EQUAL_COUNT:
        T = series if isinstance(series, int) else len(series)
        if n_groups < 2:
            raise DataError("need at least 2 groups")
        if T < 2 * n_groups:
            raise InsufficientDataError(f"{T} samples for {n_groups} groups")
        base = T // n_groups
        bounds = [i * base for i in range(n_groups)] + [T]
        groups = tuple(range(bounds[i], bounds[i + 1]) for i in range(n_groups))
    elif scheme is Scheme.CALENDAR_YEAR:
        if isinstance(series, int):
            raise DataError("calendar-year partition needs a timestamped series")
        years = series.timestamps.astype("datetime64[Y]").astype(int)
        _, starts = np.unique(years, return_index=True)
        if len(starts) < 2:
            raise InsufficientDataError("need at least 2 distinct calendar years")
        bounds = list(starts) + [len(series)]
        groups = tuple(range(bounds[i], bounds[i + 1]) for i in range(len(starts)))
    else:
        raise DataError(f"unknown partition scheme {scheme}")
    return GroupPartition(scheme=scheme, groups=groups, sizes=tuple(len(g) for g in groups))


def enumerate_splits(n_groups: int, k: int) -> SplitSet:
    """All C(N,k) train/test splits, test sets in lexicographic order."""
    if not (1 <= k < n_groups):
        raise DataError(f"k must satisfy 1 <= k < N, got k={k}, N={n_groups}")
    all_groups = set(range(n_groups))
    splits = tuple(
        (test, tuple(sorted(all_groups - set(test))))
        for test in combinations(range(n_groups), k)
    )
    return SplitSet(n_groups=n_groups, k=k, splits=splits)


def assign_paths(splits: SplitSet) -> PathAssignment:
    """Assign each (group, split) test cell a path id.

    Each group's test appearances, in split order, get ids 1, 2, ...; every
    group appears in exactly C(N-1, k-1) splits so the ids line up into that
    many complete paths.
    """
    n_paths = math.comb(splits.n_groups - 1, splits.k - 1)
    cells: dict[tuple[int, int], int] = {}
    counters = [0] * splits.n_groups
    for s_idx, (test, _) in enumerate(splits.splits):
        for g in test:
            counters[g] += 1
            cells[(g, s_idx)] = counters[g]
    assert all(c == n_paths for c in counters)
    return PathAssignment(n_paths=n_paths, cells=cells)


def path_statistics(
    cell_scores: dict[tuple[int, int], float | str],
    assignment: PathAssignment,
    criterion: Criterion,
) -> tuple[tuple[float, ...], Moments | None, int]:
    """Aggregate cell scores into path values and their moments.

    Variance-reduction paths take the mean of their included cells, VaR paths
    the minimum (minmax rule). A path touching a failed split is voided; a
    path with every cell excluded is dropped. Returns
    (path values, moments, n voided/dropped).
    """
    per_path: list[float] = []
    voided = 0
    for p in range(1, assignment.n_paths + 1):
        scores = [cell_scores[c] for c in assignment.cells_of_path(p)]
        if any(s == FAILED for s in scores):
            voided += 1
            continue
        vals = [s for s in scores if not isinstance(s, str)]
        if not vals:
            voided += 1
            continue
        if criterion is Criterion.VARIANCE_REDUCTION:
            per_path.append(float(np.mean(vals)))
        else:
            per_path.append(float(np.min(vals)))
    stats = moments(np.array(per_path)) if len(per_path) >= 4 else None
    return tuple(per_path), stats, voided


RatioFn = Callable[[tuple[range, ...]], float]


def run_cv(
    spot: PriceSeries,
    fut: PriceSeries,
    ratio_fn: RatioFn,
    horizon: int,
    criteria: tuple[Criterion, ...],
    part: GroupPartition,
    k: int,
    min_obs: int | None = None,
    alpha: float = 0.05,
    method_label: str = "",
) -> dict[Criterion, PathReport]:
    """Run the full combinatorial CV for one (method, horizon).

    ``ratio_fn`` maps the merged training index ranges to a hedge ratio.
    Each test group is scored separately on within-group horizon differences;
    groups with fewer than ``min_obs`` differenced observations are excluded
    at this horizon. Per-split values (for reporting) average the split's
    included test-group scores.
    """
    if len(spot) != len(fut):
        raise DataError("spot and futures series must be aligned")
    if min_obs is None:
        min_obs = max(10, 2 * horizon)
    if Criterion.VAR in criteria:
        min_obs = max(min_obs, 20)  # empirical quantile floor

    splits = enumerate_splits(part.n_groups, k)
    assignment = assign_paths(splits)

    excluded: list[tuple[int, str]] = []
    group_ok: list[bool] = []
    group_rets: list[tuple[np.ndarray, np.ndarray] | None] = []
    for gi, g in enumerate(part.groups):
        n_diffs = len(g) - horizon
        if n_diffs < min_obs:
            excluded.append((gi, f"{max(n_diffs, 0)} observations at horizon {horizon} < {min_obs}"))
            group_ok.append(False)
            group_rets.append(None)
            continue
        sv = np.log(spot.values[g.start : g.stop])
        fv = np.log(fut.values[g.start : g.stop])
        group_rets.append((sv[horizon:] - sv[:-horizon], fv[horizon:] - fv[:-horizon]))
        group_ok.append(True)
    if not any(group_ok):
        raise InsufficientDataError(f"all groups excluded at horizon {horizon}")

    cell_scores: dict[Criterion, dict[tuple[int, int], float | str]] = {c: {} for c in criteria}
    per_split: dict[Criterion, list[float | None]] = {c: [] for c in criteria}
    failed_splits: list[int] = []
    for s_idx, (test, train) in enumerate(splits.splits):
        try:
            train_segments = restrict(spot, [part.groups[g] for g in train]).segments
            ratio = float(ratio_fn(train_segments))
            if not math.isfinite(ratio):
                raise NumericError("non-finite hedge ratio")
        except (NumericError, InsufficientDataError, DataError):
            failed_splits.append(s_idx)
            for c in criteria:
                per_split[c].append(None)
                for g in test:
                    cell_scores[c][(g, s_idx)] = FAILED
            continue
        for c in criteria:
            split_vals = []
            for g in test:
                if not group_ok[g]:
                    cell_scores[c][(g, s_idx)] = EXCLUDED
                    continue
                ds, df = group_rets[g]
                hedged = build_portfolio(ds, df, ratio, horizon)
                if c is Criterion.VARIANCE_REDUCTION:
                    eff = he_variance(ds, hedged.portfolio)
                else:
                    eff = he_var(ds, hedged.portfolio, alpha)
                score = eff.value
                if eff.degenerate or not math.isfinite(score):
                    cell_scores[c][(g, s_idx)] = EXCLUDED
                    continue
                cell_scores[c][(g, s_idx)] = score
                split_vals.append(score)
            per_split[c].append(float(np.mean(split_vals)) if split_vals else None)

    reports: dict[Criterion, PathReport] = {}
    for c in criteria:
        path_vals, stats, voided = path_statistics(cell_scores[c], assignment, c)
        reports[c] = PathReport(
            method=method_label,
            horizon=horizon,
            criterion=c,
            per_split_values=tuple(per_split[c]),
            per_path_values=path_vals,
            stats=stats,
            excluded_groups=tuple(excluded),
            n_paths_total=assignment.n_paths,
            n_paths_voided=voided,
            failed_splits=tuple(failed_splits),
        )
    return reports
