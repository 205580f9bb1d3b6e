"""Plug-in estimators of the asymptotic covariance of the Gini pair.

Both estimators target the limiting covariance of
``sqrt(n) * ((g0_hat, g1_hat) - (g0, g1))`` where ``n`` is the pooled
sample size. The tilt-based version exploits the fitted density ratio
and is never beaten asymptotically by the per-group nonparametric
version; ``efficiency_gap`` checks that ordering numerically.

The influence ingredients for group i evaluate, at each positive value
``a``, the partial moment ``H_i(a) = a G_i(a) + int_{y > a} y dG_i(y)``
and combine it into ``u_i(a) = (2 nu_i - 1) a + (1 - nu_i)(2 H_i(a) -
psi_i)``; at ``a = 0`` the correct limit is ``(1 - nu_i)(2 m_i -
psi_i)``. Tail sums are exact complements of the through-sums, so
``through + tail`` reproduces the fitted mean bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from ._weighted import cum_through, pooled_order
from .data import TwoSampleData, zero_proportions
from .drm import DrmFit
from .errors import DataError, RankDeficiencyError, SingularityError
from .gini import GiniEstimate, emp_gini, mele_gini

_COND_LIMIT = 1e12


@dataclass(frozen=True)
class CovarianceEstimate:
    """2x2 covariance of the scaled Gini pair with its scaling size.

    ``se(target)`` already divides by the pooled sample size, so it is
    directly usable as a standard error of the unscaled estimate.
    """

    kind: str
    sigma: np.ndarray
    n: int
    ingredients: dict

    def var(self, target: str) -> float:
        target = target.upper()
        s = self.sigma
        if target == "G0":
            return float(s[0, 0])
        if target == "G1":
            return float(s[1, 1])
        if target == "DIFF":
            return float(s[0, 0] + s[1, 1] - 2.0 * s[0, 1])
        raise DataError(f"unknown target {target!r}")

    def se(self, target: str) -> float:
        return float(np.sqrt(self.var(target) / self.n))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "sigma": [[float(v) for v in row] for row in self.sigma],
            "n": self.n,
        }


def _spd_solve(mat: np.ndarray, rhs: np.ndarray, what: str) -> np.ndarray:
    cond = np.linalg.cond(mat)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise RankDeficiencyError(f"{what} is numerically singular (cond {cond:.3e})")
    try:
        chol = cho_factor(mat, lower=True)
    except np.linalg.LinAlgError as exc:
        raise RankDeficiencyError(f"{what} is not positive definite: {exc}") from exc
    return cho_solve(chol, rhs)


def estimate_sigma_drm(fit: DrmFit, gini: GiniEstimate | None = None) -> CovarianceEstimate:
    """Tilt-based covariance, evaluated at the fitted weights."""
    if gini is None:
        gini = mele_gini(fit)
    nu = fit.zeros.nu_hat
    rho = fit.zeros.rho_hat
    delta = fit.zeros.delta_hat
    n = sum(fit.data.n)

    order = pooled_order(fit.x, fit.grp)
    xs = fit.x[order]
    p0 = fit.weights[order]
    omega = fit.omega[order]
    p1 = p0 * omega

    g0_at = cum_through(xs, p0)
    g1_at = cum_through(xs, p1)
    thr0 = cum_through(xs, p0 * xs)
    thr1 = cum_through(xs, p1 * xs)
    h_part0 = xs * g0_at + (thr0[-1] - thr0)
    h_part1 = xs * g1_at + (thr1[-1] - thr1)

    u0 = (2.0 * nu[0] - 1.0) * xs + (1.0 - nu[0]) * (2.0 * h_part0 - gini.psi[0])
    u1 = (2.0 * nu[1] - 1.0) * xs + (1.0 - nu[1]) * (2.0 * h_part1 - gini.psi[1])

    u_mat = np.column_stack([xs, u0, omega * xs, omega * u1])
    u_tilde = np.column_stack([-rho * xs, -rho * u0, (1.0 - rho) * xs, (1.0 - rho) * u1])
    design = fit.basis.design(xs)

    h = 1.0 + rho * (omega - 1.0)
    h1 = rho * omega / h

    a_theta = delta * (1.0 - rho) * (design * (p0 * h1)[:, None]).T @ design
    m_cross = (u_tilde * (p0 * h1)[:, None]).T @ design
    b_mat = m_cross @ _spd_solve(a_theta, m_cross.T, "information matrix of the tilt")
    core = (u_mat * (p0 / h)[:, None]).T @ u_mat

    jac = np.array([
        [-gini.g0 / gini.m[0], 1.0 / gini.m[0], 0.0, 0.0],
        [0.0, 0.0, -gini.g1 / gini.m[1], 1.0 / gini.m[1]],
    ])
    sigma = jac @ (core + b_mat / rho**2) @ jac.T / delta
    sigma += np.diag([
        nu[0] * (1.0 - gini.g0) ** 2 / (delta * (1.0 - rho)),
        nu[1] * (1.0 - gini.g1) ** 2 / (delta * rho),
    ])
    sigma = (sigma + sigma.T) / 2.0
    return CovarianceEstimate(
        kind="drm", sigma=sigma, n=n,
        ingredients={
            "delta_hat": delta, "rho_hat": rho,
            "a_theta": a_theta, "b_mat": b_mat, "jacobian": jac,
        },
    )


def _group_sigma_nonparam(x: np.ndarray, w_share: float, nu: float, m: float,
                          psi: float, g: float) -> float:
    pos = np.sort(x[x > 0])
    n1 = pos.size
    cdf = cum_through(pos, np.full(n1, 1.0 / n1))
    thr = cum_through(pos, pos / n1)
    h_part = pos * cdf + (thr[-1] - thr)
    u_pos = (2.0 * nu - 1.0) * pos + (1.0 - nu) * (2.0 * h_part - psi)
    u_zero = (1.0 - nu) * (2.0 * m - psi)
    z = np.concatenate([np.full(x.size - n1, u_zero), u_pos - g * pos])
    mu_whole = (1.0 - nu) * m
    return float(np.var(z) / (w_share * mu_whole**2))


def estimate_sigma_nonparam(data: TwoSampleData, gini: GiniEstimate | None = None) -> CovarianceEstimate:
    """Per-group nonparametric covariance (diagonal by independence)."""
    if gini is None:
        gini = emp_gini(data)
    zp = zero_proportions(data)
    diag = [
        _group_sigma_nonparam(
            data.group(i), zp.w[i], zp.nu_hat[i], gini.m[i], gini.psi[i],
            (gini.g0, gini.g1)[i],
        )
        for i in (0, 1)
    ]
    return CovarianceEstimate(
        kind="nonparametric", sigma=np.diag(diag), n=sum(data.n),
        ingredients={"delta_hat": zp.delta_hat, "rho_hat": zp.rho_hat},
    )


def smooth_gradient(phi: str, gini: GiniEstimate) -> np.ndarray:
    """Gradient of a named smooth functional of the Gini pair."""
    name = phi.lower()
    if name in ("diff", "difference"):
        return np.array([1.0, -1.0])
    if name == "g0":
        return np.array([1.0, 0.0])
    if name == "g1":
        return np.array([0.0, 1.0])
    if name in ("logit-diff", "logit-g0", "logit-g1"):
        grads = []
        for idx, g in enumerate((gini.g0, gini.g1)):
            if name in (f"logit-g{idx}", "logit-diff"):
                if not 0.0 < g < 1.0:
                    raise SingularityError(
                        f"logit transform undefined at gini estimate {g!r}"
                    )
                grads.append(1.0 / (g * (1.0 - g)))
            else:
                grads.append(0.0)
        vec = np.array(grads)
        if name == "logit-diff":
            vec[1] = -vec[1]
        if name == "logit-g1":
            vec[0] = 0.0
        return vec
    raise DataError(f"unknown smooth functional {phi!r}")


def delta_variance(phi, gini: GiniEstimate, sigma: CovarianceEstimate) -> float:
    """Asymptotic variance of a smooth functional by the delta method.

    ``phi`` may be a name understood by :func:`smooth_gradient`, an
    explicit gradient vector, or a callable mapping ``(g0, g1)`` to a
    gradient vector.
    """
    if isinstance(phi, str):
        grad = smooth_gradient(phi, gini)
    elif callable(phi):
        grad = np.asarray(phi((gini.g0, gini.g1)), dtype=float)
    else:
        grad = np.asarray(phi, dtype=float)
    if grad.shape != (2,):
        raise DataError(f"gradient must have shape (2,), got {grad.shape}")
    return float(grad @ sigma.sigma @ grad)


@dataclass(frozen=True)
class EfficiencyGap:
    """Spectral check that the tilt-based covariance is no larger."""

    min_eigenvalue: float
    psd_flag: bool
    tolerance: float


def efficiency_gap(sigma_non: CovarianceEstimate, sigma_drm: CovarianceEstimate,
                   tolerance: float | None = None) -> EfficiencyGap:
    gap = sigma_non.sigma - sigma_drm.sigma
    if tolerance is None:
        tolerance = 1e-6 * float(np.trace(sigma_non.sigma))
    min_eig = float(np.linalg.eigvalsh((gap + gap.T) / 2.0).min())
    return EfficiencyGap(min_eig, min_eig >= -tolerance, tolerance)
