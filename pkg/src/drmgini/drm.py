"""Fitting the density ratio model on the pooled positive observations.

The positive parts of the two groups are linked by the tilt
``dG1(x) = exp(theta' Q(x)) dG0(x)`` with ``Q(x) = (1, q(x)')'``.
``theta`` maximizes the dual empirical log-likelihood

    l(theta) = - sum_all log{1 + rho (w(x) - 1)} + sum_group1 theta' Q(x)

where the sums run over pooled positives, ``w(x) = exp(theta' Q(x))``
and ``rho`` is the share of group 1 among the pooled positives. The
function is globally concave, so a damped Newton iteration from 0 is
reliable; a gradient fallback guards against numerically singular
Hessians from near-degenerate bases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import expit

from ._weighted import step_eval
from .basis import BasisFunction
from .data import TwoSampleData, ZeroProportions, zero_proportions
from .errors import ConvergenceError, DataError, RankDeficiencyError

_EXP_CLAMP = 700.0
_COND_LIMIT = 1e12


def _pooled(data: TwoSampleData, basis: BasisFunction):
    """Pooled positives, their group ids, and the design matrix."""
    x0, x1 = data.positives(0), data.positives(1)
    x = np.concatenate([x0, x1])
    grp = np.concatenate([np.zeros(x0.size, dtype=np.int8), np.ones(x1.size, dtype=np.int8)])
    return x, grp, basis.design(x)


def _check_theta(theta, dim):
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if theta.shape[0] != dim:
        raise DataError(f"theta has length {theta.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(theta)):
        raise DataError("theta must be finite")
    return theta


def _loglik_terms(t: np.ndarray, grp: np.ndarray, rho: float) -> float:
    # log{1 + rho(e^t - 1)} = logaddexp(log(1-rho), log(rho) + t), overflow safe
    mix = np.logaddexp(np.log1p(-rho), np.log(rho) + t)
    return float(t[grp == 1].sum() - mix.sum())


def dual_loglik(theta, data: TwoSampleData, basis: BasisFunction, rho: float | None = None) -> float:
    """Dual empirical log-likelihood at ``theta``. Finite for finite ``theta``."""
    x, grp, Q = _pooled(data, basis)
    theta = _check_theta(theta, Q.shape[1])
    if rho is None:
        rho = zero_proportions(data).rho_hat
    return _loglik_terms(Q @ theta, grp, rho)


def dual_grad(theta, data: TwoSampleData, basis: BasisFunction, rho: float | None = None) -> np.ndarray:
    """Analytic gradient of :func:`dual_loglik` in ``theta``."""
    x, grp, Q = _pooled(data, basis)
    theta = _check_theta(theta, Q.shape[1])
    if rho is None:
        rho = zero_proportions(data).rho_hat
    h1 = expit(Q @ theta + np.log(rho / (1.0 - rho)))
    return Q.T @ ((grp == 1).astype(float) - h1)


def dual_hessian(theta, data: TwoSampleData, basis: BasisFunction, rho: float | None = None) -> np.ndarray:
    """Analytic Hessian; negative semidefinite everywhere."""
    x, grp, Q = _pooled(data, basis)
    theta = _check_theta(theta, Q.shape[1])
    if rho is None:
        rho = zero_proportions(data).rho_hat
    h1 = expit(Q @ theta + np.log(rho / (1.0 - rho)))
    return -(Q * (h1 * (1.0 - h1))[:, None]).T @ Q


@dataclass
class DrmFit:
    """Fitted tilt with empirical-likelihood weights on the pooled positives.

    ``x`` holds the pooled positive observations (group 0 first, input
    order preserved), ``grp`` their group ids, ``omega`` the fitted
    tilt values and ``weights`` the baseline probability masses,
    renormalized to sum to one.
    """

    data: TwoSampleData
    basis: BasisFunction
    zeros: ZeroProportions
    theta_hat: np.ndarray
    loglik: float
    iterations: int
    converged: bool
    grad_sup: float
    x: np.ndarray = field(repr=False)
    grp: np.ndarray = field(repr=False)
    omega: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def rho_hat(self) -> float:
        return self.zeros.rho_hat

    def weight_map(self) -> dict[tuple[int, int], float]:
        """Weights keyed by (group, position within the group's vector)."""
        out: dict[tuple[int, int], float] = {}
        k = 0
        for gid in (0, 1):
            xg = self.data.group(gid)
            for pos in np.flatnonzero(xg > 0):
                out[(gid, int(pos))] = float(self.weights[k])
                k += 1
        return out

    def tilt(self, x) -> np.ndarray:
        """Fitted density ratio evaluated at new positive values."""
        t = self.basis.design(np.asarray(x, dtype=float)) @ self.theta_hat
        return np.exp(np.clip(t, -_EXP_CLAMP, _EXP_CLAMP))

    def summary_dict(self) -> dict:
        return {
            "theta_hat": [float(v) for v in self.theta_hat],
            "rho_hat": float(self.rho_hat),
            "nu_hat": [float(v) for v in self.zeros.nu_hat],
            "loglik": float(self.loglik),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "basis": self.basis.kind,
        }


def _finalize(data, basis, zeros, theta, x, grp, Q, rho, iterations, converged, grad_sup) -> DrmFit:
    t = np.clip(Q @ theta, -_EXP_CLAMP, _EXP_CLAMP)
    omega = np.exp(t)
    h = 1.0 + rho * (omega - 1.0)
    raw = 1.0 / (x.size * h)
    weights = raw / raw.sum()
    return DrmFit(
        data=data,
        basis=basis,
        zeros=zeros,
        theta_hat=theta,
        loglik=_loglik_terms(Q @ theta, grp, rho),
        iterations=iterations,
        converged=converged,
        grad_sup=grad_sup,
        x=x,
        grp=grp,
        omega=omega,
        weights=weights,
    )


def fit_theta(
    data: TwoSampleData,
    basis: BasisFunction,
    grad_tol: float = 1e-8,
    max_iter: int = 100,
    theta0=None,
) -> DrmFit:
    """Maximize the dual log-likelihood by damped Newton with step halving.

    Raises
    ------
    RankDeficiencyError
        If the Hessian stays numerically singular (for example when all
        positive values coincide, so the basis is degenerate).
    ConvergenceError
        If the gradient tolerance is not met within ``max_iter``.
    """
    x, grp, Q = _pooled(data, basis)
    zeros = zero_proportions(data)
    rho = zeros.rho_hat
    dim = Q.shape[1]
    theta = np.zeros(dim) if theta0 is None else _check_theta(theta0, dim)
    logit_rho = np.log(rho / (1.0 - rho))
    ind1 = (grp == 1).astype(float)

    value = _loglik_terms(Q @ theta, grp, rho)
    fallbacks = 0
    for it in range(1, max_iter + 1):
        h1 = expit(Q @ theta + logit_rho)
        grad = Q.T @ (ind1 - h1)
        gsup = float(np.max(np.abs(grad)))
        if gsup <= grad_tol:
            return _finalize(data, basis, zeros, theta, x, grp, Q, rho, it - 1, True, gsup)
        hess = -(Q * (h1 * (1.0 - h1))[:, None]).T @ Q
        cond = np.linalg.cond(hess)
        if np.isfinite(cond) and cond <= _COND_LIMIT:
            step = np.linalg.solve(hess, -grad)
        else:
            fallbacks += 1
            if fallbacks > 10:
                raise RankDeficiencyError(
                    "dual Hessian numerically singular; basis is degenerate "
                    "on these data (are all positive values identical?)"
                )
            hnorm = float(np.max(np.abs(np.linalg.eigvalsh(hess))))
            if hnorm == 0.0:
                raise RankDeficiencyError("dual Hessian is exactly zero")
            step = grad / hnorm
        # backtracking on the value; near the optimum the true gain drops
        # below float resolution, so there the full Newton step is accepted
        # whenever it still shrinks the gradient (quadratic terminal phase)
        scale = 1.0
        accepted = False
        for _ in range(50):
            cand = theta + scale * step
            cand_val = _loglik_terms(Q @ cand, grp, rho)
            if cand_val >= value:
                theta, value, accepted = cand, cand_val, True
                break
            if scale == 1.0 and cand_val >= value - 1e-11 * (1.0 + abs(value)):
                cand_grad = Q.T @ (ind1 - expit(Q @ cand + logit_rho))
                if np.max(np.abs(cand_grad)) < gsup:
                    theta, value, accepted = cand, cand_val, True
                    break
            scale *= 0.5
        if not accepted:
            raise ConvergenceError(
                "step halving exhausted without improving the dual likelihood",
                theta=theta, grad_norm=gsup, iterations=it,
            )
    grad = dual_grad(theta, data, basis, rho)
    gsup = float(np.max(np.abs(grad)))
    if gsup <= grad_tol:
        return _finalize(data, basis, zeros, theta, x, grp, Q, rho, max_iter, True, gsup)
    raise ConvergenceError(
        f"no convergence in {max_iter} Newton iterations (grad sup norm {gsup:.3e})",
        theta=theta, grad_norm=gsup, iterations=max_iter,
    )


def fit_at_theta(data: TwoSampleData, basis: BasisFunction, theta) -> DrmFit:
    """Build the weight system at a fixed ``theta`` without optimizing.

    Useful for evaluating plug-in quantities at known parameter values;
    ``converged`` reflects whether ``theta`` already satisfies the
    default gradient tolerance.
    """
    x, grp, Q = _pooled(data, basis)
    zeros = zero_proportions(data)
    rho = zeros.rho_hat
    theta = _check_theta(theta, Q.shape[1])
    grad = Q.T @ ((grp == 1).astype(float) - expit(Q @ theta + np.log(rho / (1.0 - rho))))
    gsup = float(np.max(np.abs(grad)))
    return _finalize(data, basis, zeros, theta, x, grp, Q, rho, 0, gsup <= 1e-8, gsup)


@dataclass(frozen=True)
class FittedCdfPair:
    """Step-function estimates of both positive-part distributions.

    ``support`` is the sorted unique positive values; ``g0``/``g1``
    the cumulative masses through each support point. The baseline
    curve ends exactly at 1; the tilted curve ends there only up to
    the fitting tolerance.
    """

    support: np.ndarray
    g0: np.ndarray
    g1: np.ndarray

    def cdf0(self, x) -> np.ndarray:
        return step_eval(self.support, self.g0, x)

    def cdf1(self, x) -> np.ndarray:
        return step_eval(self.support, self.g1, x)


def fitted_cdfs(fit: DrmFit) -> FittedCdfPair:
    """Weighted CDF pair from a fitted tilt (tilted masses for group 1)."""
    support, inv = np.unique(fit.x, return_inverse=True)
    mass0 = np.bincount(inv, weights=fit.weights)
    mass1 = np.bincount(inv, weights=fit.weights * fit.omega)
    return FittedCdfPair(support, np.cumsum(mass0), np.cumsum(mass1))
