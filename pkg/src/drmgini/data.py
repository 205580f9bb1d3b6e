"""Two-sample container, zero-proportion summaries, and file loaders.

Data model: each group is a nonnegative sample in which the value 0.0
is an exact point mass (a semicontinuous observation), and strictly
positive values come from a continuous distribution. Group 0 is the
baseline sample, group 1 the comparison sample.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from ._validation import check_min_positives, check_values
from .errors import DataError


@dataclass(frozen=True)
class TwoSampleData:
    """Raw observations of both groups, input order preserved.

    Attributes
    ----------
    x0, x1 : ndarray
        Read-only float64 vectors including any zeros.
    """

    x0: np.ndarray
    x1: np.ndarray

    @classmethod
    def from_arrays(cls, x0, x1, min_positives: int = 2) -> "TwoSampleData":
        x0 = check_values(x0, "group 0")
        x1 = check_values(x1, "group 1")
        check_min_positives(x0, "group 0", min_positives)
        check_min_positives(x1, "group 1", min_positives)
        return cls(x0, x1)

    def group(self, i: int) -> np.ndarray:
        return (self.x0, self.x1)[i]

    def positives(self, i: int) -> np.ndarray:
        x = self.group(i)
        return x[x > 0]

    @property
    def n(self) -> tuple[int, int]:
        return self.x0.size, self.x1.size

    @property
    def n_zero(self) -> tuple[int, int]:
        return (
            int(np.count_nonzero(self.x0 == 0)),
            int(np.count_nonzero(self.x1 == 0)),
        )

    @property
    def n_pos(self) -> tuple[int, int]:
        n, nz = self.n, self.n_zero
        return n[0] - nz[0], n[1] - nz[1]


@dataclass(frozen=True)
class ZeroProportions:
    """Empirical zero-mass summaries of a two-sample data set.

    ``nu_hat[i]`` is the observed zero proportion of group i, ``w[i]``
    the group's share of the pooled sample size, ``delta_hat`` the
    pooled proportion of positive observations, and ``rho_hat`` the
    share of group 1 among the pooled positives.
    """

    nu_hat: tuple[float, float]
    w: tuple[float, float]
    delta_hat: float
    rho_hat: float


def zero_proportions(data: TwoSampleData) -> ZeroProportions:
    n0, n1 = data.n
    z0, z1 = data.n_zero
    p0, p1 = data.n_pos
    n = n0 + n1
    if p0 + p1 == 0:
        raise DataError("no positive observations in either group")
    return ZeroProportions(
        nu_hat=(z0 / n0, z1 / n1),
        w=(n0 / n, n1 / n),
        delta_hat=(p0 + p1) / n,
        rho_hat=p1 / (p0 + p1),
    )


def _parse_value(text: str, where: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise DataError(f"{where}: could not parse value {text!r}") from None
    return v


def load_two_samples(source) -> TwoSampleData:
    """Read long-format CSV with header ``group,value``.

    ``source`` is a path or an open text stream. Group labels must be
    0 or 1; values must be nonnegative numbers with ``.`` as the
    decimal mark. Errors report the 1-based data row number (the
    header line is not counted).
    """
    if hasattr(source, "read"):
        return _load_long(source, getattr(source, "name", "<stream>"))
    with open(source, "r", newline="") as fh:
        return _load_long(fh, str(source))


def _load_long(fh, name: str) -> TwoSampleData:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise DataError(f"{name}: empty input") from None
    header = [c.strip().lower() for c in header]
    if header != ["group", "value"]:
        raise DataError(f"{name}: expected header 'group,value', got {header}")
    buckets: dict[int, list[float]] = {0: [], 1: []}
    for rownum, row in enumerate(reader, start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise DataError(f"{name}: row {rownum}: expected 2 fields, got {len(row)}")
        glab = row[0].strip()
        if glab not in ("0", "1"):
            raise DataError(f"{name}: row {rownum}: unknown group label {glab!r}")
        v = _parse_value(row[1].strip(), f"{name}: row {rownum}")
        if v < 0:
            raise DataError(f"{name}: row {rownum}: negative value {v!r}")
        buckets[int(glab)].append(v)
    if not buckets[0] or not buckets[1]:
        raise DataError(f"{name}: both groups must be present")
    return TwoSampleData.from_arrays(buckets[0], buckets[1])


def load_two_files(path0, path1) -> TwoSampleData:
    """Read one single-column file of values per group (no header)."""

    def read_column(path):
        vals = []
        with open(path, "r") as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.strip()
                if not text:
                    continue
                v = _parse_value(text, f"{path}: line {lineno}")
                if v < 0:
                    raise DataError(f"{path}: line {lineno}: negative value {v!r}")
                vals.append(v)
        if not vals:
            raise DataError(f"{path}: no values")
        return vals

    return TwoSampleData.from_arrays(read_column(path0), read_column(path1))


def save_two_samples(data: TwoSampleData, target) -> None:
    """Write long-format CSV that :func:`load_two_samples` reads back
    to identical arrays (values serialized with shortest round-trip
    ``repr``)."""
    if hasattr(target, "write"):
        _write_long(data, target)
    else:
        with open(target, "w", newline="") as fh:
            _write_long(data, fh)


def _write_long(data: TwoSampleData, fh: io.TextIOBase) -> None:
    fh.write("group,value\n")
    for gid in (0, 1):
        for v in data.group(gid):
            fh.write(f"{gid},{float(v)!r}\n")
