"""Input validation helpers used by the loaders and the estimator facade."""

from __future__ import annotations

import numpy as np

from .errors import DataError, DegenerateDataError


def check_values(x, name: str) -> np.ndarray:
    """Coerce one group's observations to a read-only float64 vector.

    Values must be finite and nonnegative; zeros are understood as an
    exact point mass, so negative inputs are rejected rather than clipped.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.size == 0:
        raise DataError(f"{name}: no observations")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise DataError(f"{name}: non-finite value at position {bad}")
    if np.any(arr < 0):
        bad = int(np.flatnonzero(arr < 0)[0])
        raise DataError(f"{name}: negative value at position {bad} ({arr[bad]!r})")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


def check_min_positives(x: np.ndarray, name: str, k: int = 2) -> None:
    npos = int(np.count_nonzero(x > 0))
    if npos < k:
        raise DegenerateDataError(
            f"{name}: needs at least {k} positive observations, found {npos}"
        )


def check_groups_values(values, groups):
    """Split a pooled ``(values, groups)`` pair into the two group vectors.

    ``groups`` must contain exactly the labels 0 and 1 (ints or anything
    that compares equal to them). Order within each group is preserved.
    """
    v = np.asarray(values, dtype=float).reshape(-1)
    g = np.asarray(groups).reshape(-1)
    if v.shape[0] != g.shape[0]:
        raise DataError(
            f"values and groups have different lengths ({v.shape[0]} vs {g.shape[0]})"
        )
    labels = set(np.unique(g).tolist())
    if labels != {0, 1}:
        raise DataError(f"group labels must be exactly {{0, 1}}, got {sorted(labels)}")
    return v[g == 0], v[g == 1]
