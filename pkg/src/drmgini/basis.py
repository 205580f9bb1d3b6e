"""Basis functions for the density ratio tilt.

The two positive-part distributions are linked through a log-linear
tilt ``dG1(x) = exp(alpha + beta' q(x)) dG0(x)``. The basis object
holds ``q`` and produces the augmented regressor ``Q(x) = (1, q(x)')'``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DataError

_BUILTIN_KINDS = ("log", "identity", "log+identity")


@dataclass(frozen=True)
class BasisFunction:
    """Tilt basis ``q`` with its dimension and a display name.

    Parameters
    ----------
    kind : str
        One of ``"log"``, ``"identity"``, ``"log+identity"`` or
        ``"user"``.
    dim : int
        Dimension of ``q(x)``.
    func : callable
        Vectorized map from a 1d array of positive values to an
        ``(n, dim)`` array.
    """

    kind: str
    dim: int
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    def q(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.func(x), dtype=float)
        if out.ndim == 1:
            out = out[:, None]
        if out.shape != (x.shape[0], self.dim):
            raise DataError(
                f"basis {self.kind!r} returned shape {out.shape}, "
                f"expected {(x.shape[0], self.dim)}"
            )
        return out

    def design(self, x) -> np.ndarray:
        """Augmented regressor matrix ``(1, q(x)')`` of shape (n, dim + 1)."""
        x = np.asarray(x, dtype=float)
        qx = self.q(x)
        if not np.all(np.isfinite(qx)):
            raise DataError(
                f"basis {self.kind!r} produced non-finite values on the data"
            )
        return np.column_stack([np.ones(x.shape[0]), qx])


def make_basis(kind: str = "log", func=None, dim: int | None = None) -> BasisFunction:
    """Construct a basis by name, or wrap a user-supplied callable.

    ``"log"`` suits positive distributions whose ratio is a power law
    (gamma against gamma with common scale); ``"identity"`` suits
    exponential-family tilts in ``x``; ``"log+identity"`` combines both.
    """
    if kind == "log":
        return BasisFunction("log", 1, lambda x: np.log(x)[:, None])
    if kind == "identity":
        return BasisFunction("identity", 1, lambda x: x[:, None])
    if kind == "log+identity":
        return BasisFunction(
            "log+identity", 2, lambda x: np.column_stack([np.log(x), x])
        )
    if kind == "user":
        if func is None or dim is None:
            raise DataError("user basis requires func and dim")
        return BasisFunction("user", int(dim), func)
    raise DataError(f"unknown basis kind {kind!r}; choose from {_BUILTIN_KINDS}")
