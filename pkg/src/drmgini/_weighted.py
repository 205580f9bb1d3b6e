"""Tie-aware weighted step-function sums shared by the estimators.

All helpers take value arrays already sorted ascending. Ties are
handled with the ``<=`` convention: the cumulative sum at a point
includes the whole tie block, and tail sums use strict ``>``. Tails
are computed as exact complements of the through-sums so that
``through + tail == total`` holds bit-for-bit.
"""

from __future__ import annotations

import numpy as np


def pooled_order(x: np.ndarray, grp: np.ndarray) -> np.ndarray:
    """Deterministic sort order by (value, group, input position)."""
    return np.lexsort((np.arange(x.size), grp, x))


def cum_through(xs: np.ndarray, vals: np.ndarray) -> np.ndarray:
    """Cumulative sums of ``vals`` through each point's tie block."""
    cs = np.cumsum(vals)
    last = np.searchsorted(xs, xs, side="right") - 1
    return cs[last]


def tail_strict(xs: np.ndarray, vals: np.ndarray) -> np.ndarray:
    """Sums of ``vals`` over strictly larger values (exact complement)."""
    through = cum_through(xs, vals)
    return through[-1] - through


def step_eval(xs: np.ndarray, cumvals: np.ndarray, query) -> np.ndarray:
    """Evaluate the right-continuous step function ``q -> sum over xs <= q``.

    ``cumvals`` are plain cumulative sums aligned with ``xs``;
    contiguous ties resolve to the block total automatically.
    """
    q = np.asarray(query, dtype=float)
    idx = np.searchsorted(xs, q, side="right") - 1
    return np.where(idx >= 0, cumvals[np.maximum(idx, 0)], 0.0)
