"""Confidence intervals and tests for the Gini indices.

Interval methods, by label:

* ``NA-DRM`` / ``NA-EMP``: normal approximation on the index scale,
  with the tilt-based or the per-group nonparametric variance.
* ``NL-DRM`` / ``NL-EMP``: same, built on the logit scale. For a
  single index the endpoints are mapped back through the inverse
  logit; for the difference the interval stays on the logit-difference
  scale (the back-transform does not exist there).
* ``BT-DRM`` / ``BT-EMP``: bootstrap-t with whole-sample resampling
  within each group, studentized by the matching variance estimate.
* ``BL-DRM``: bootstrap-t on the logit scale.
* ``JEL`` / ``AJEL``: jackknife empirical likelihood calibrated by the
  chi-square quantile, optionally with the mean-reflecting adjustment
  point appended so every candidate value is feasible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit, logit
from scipy.stats import chi2, norm

from .basis import BasisFunction, make_basis
from .data import TwoSampleData
from .drm import DrmFit, fit_theta, fitted_cdfs
from .errors import (
    DataError,
    DegenerateDataError,
    DrmGiniError,
    OpenBoundError,
    SingularityError,
    StudyError,
)
from .gini import GiniEstimate, emp_gini, jackknife_pseudovalues, mele_gini, pairwise_gini
from .variance import CovarianceEstimate, delta_variance, estimate_sigma_drm, estimate_sigma_nonparam

INTERVAL_METHODS = (
    "NA-DRM", "NL-DRM", "BT-DRM", "BL-DRM",
    "NA-EMP", "NL-EMP", "BT-EMP", "JEL", "AJEL",
)
TEST_METHODS = ("NA-DRM", "NL-DRM", "NA-EMP", "NL-EMP", "JEL", "AJEL")


def _rng_for(seed, key: tuple[int, ...]) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


@dataclass(frozen=True)
class IntervalEstimate:
    """A two-sided confidence interval for one target.

    ``scale`` is ``"logit"`` when the interval lives on the logit
    (or logit-difference) scale rather than the index scale.
    """

    target: str
    method: str
    level: float
    lower: float
    upper: float
    estimate: float
    se: float | None = None
    scale: str = "identity"
    extra: dict = field(default_factory=dict)

    @property
    def length(self) -> float:
        return self.upper - self.lower

    def covers(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def to_dict(self) -> dict:
        out = {
            "target": self.target, "method": self.method, "level": self.level,
            "lower": self.lower, "upper": self.upper, "estimate": self.estimate,
            "scale": self.scale,
        }
        if self.se is not None:
            out["se"] = self.se
        out.update(self.extra)
        return out


@dataclass(frozen=True)
class TestResult:
    method: str
    statistic: float
    p_value: float
    level: float
    reject: bool

    def to_dict(self) -> dict:
        return {
            "method": self.method, "statistic": self.statistic,
            "p_value": self.p_value, "level": self.level, "reject": self.reject,
        }


@dataclass(frozen=True)
class ElSolution:
    """Empirical likelihood ratio for one candidate mean."""

    neg2_log_ratio: float
    lam: float
    feasible: bool


def wald_ci(phi_hat: float, sigma_phi: float, n: int, level: float = 0.95,
            target: str = "", method: str = "NA") -> IntervalEstimate:
    """Normal-approximation interval from the scaled asymptotic sd."""
    z = norm.ppf(0.5 + level / 2.0)
    se = sigma_phi / np.sqrt(n)
    return IntervalEstimate(
        target=target, method=method, level=level,
        lower=phi_hat - z * se, upper=phi_hat + z * se,
        estimate=phi_hat, se=float(se),
    )


def logit_ci(g_hat: float, sigma_logit: float, n: int, level: float = 0.95,
             target: str = "", method: str = "NL") -> IntervalEstimate:
    """Normal interval on the logit scale, endpoints mapped back."""
    if not 0.0 < g_hat < 1.0:
        raise SingularityError(f"logit undefined at index estimate {g_hat!r}")
    z = norm.ppf(0.5 + level / 2.0)
    se = sigma_logit / np.sqrt(n)
    center = logit(g_hat)
    return IntervalEstimate(
        target=target, method=method, level=level,
        lower=float(expit(center - z * se)), upper=float(expit(center + z * se)),
        estimate=g_hat, se=float(se),
    )


def equality_test(gini: GiniEstimate, sigma: CovarianceEstimate,
                  method: str = "NA", level: float = 0.05) -> TestResult:
    """Two-sided test of equal Gini indices.

    ``method`` is ``"NA"`` for the plain difference or ``"NL"`` for the
    logit-difference statistic; the variance flavor comes from
    ``sigma`` and is appended to the method label.
    """
    flavor = "DRM" if sigma.kind == "drm" else "EMP"
    if method == "NA":
        phi = gini.diff
        var = delta_variance("diff", gini, sigma)
    elif method == "NL":
        phi = float(logit(gini.g0) - logit(gini.g1))
        var = delta_variance("logit-diff", gini, sigma)
    else:
        raise DataError(f"unknown test statistic {method!r}; choose NA or NL")
    if var <= 0:
        if phi != 0.0:
            raise DegenerateDataError("nonpositive variance estimate in equality test")
        stat = 0.0
    else:
        stat = phi / np.sqrt(var / sigma.n)
    p = 2.0 * float(norm.sf(abs(stat)))
    return TestResult(
        method=f"{method}-{flavor}", statistic=float(stat), p_value=p,
        level=level, reject=bool(p < level),
    )


# ---------------------------------------------------------------------------
# empirical likelihood for a mean


def _el_neg2_centered(z: np.ndarray) -> ElSolution:
    """EL ratio statistic for 'mean of z equals zero'."""
    n = z.size
    zmin = float(z.min())
    zmax = float(z.max())
    if zmin == 0.0 and zmax == 0.0:
        return ElSolution(0.0, 0.0, True)
    if zmin >= 0.0 or zmax <= 0.0:
        return ElSolution(np.inf, np.nan, False)
    lo = -1.0 / zmax
    hi = -1.0 / zmin

    def score(lam: float) -> float:
        return float(np.sum(z / (1.0 + lam * z)))

    s0 = score(0.0)
    if s0 == 0.0:
        return ElSolution(0.0, 0.0, True)
    # score is decreasing; the root lies between 0 and the boundary on
    # the side where the score flips sign
    width = hi - lo
    eps = width * 1e-13
    a, b = (0.0, hi - eps) if s0 > 0 else (lo + eps, 0.0)
    fa, fb = score(a), score(b)
    tries = 0
    while fa * fb > 0 and tries < 40:
        # push the outer end closer to the boundary until the sign flips
        eps *= 0.1
        a, b = (0.0, hi - eps) if s0 > 0 else (lo + eps, 0.0)
        fa, fb = score(a), score(b)
        tries += 1
    if fa * fb > 0:
        return ElSolution(np.inf, np.nan, False)
    lam = brentq(score, a, b, xtol=1e-14, maxiter=200)
    neg2 = 2.0 * float(np.sum(np.log1p(lam * z)))
    return ElSolution(max(neg2, 0.0), float(lam), True)


def el_mean_logratio(values, mu: float) -> ElSolution:
    """Minus twice the log empirical likelihood ratio for a mean.

    Returns ``+inf`` with ``feasible=False`` when ``mu`` lies outside
    the open hull of the values.
    """
    v = np.asarray(values, dtype=float).reshape(-1)
    if v.size < 2:
        raise DegenerateDataError("empirical likelihood needs at least two values")
    return _el_neg2_centered(v - mu)


def _adjusted_values(values: np.ndarray, mu: float) -> np.ndarray:
    z = values - mu
    extra = -0.5 * np.log(values.size) * float(z.mean())
    return np.append(z, extra)


def _el_stat(values: np.ndarray, mu: float, adjusted: bool) -> float:
    if adjusted:
        return _el_neg2_centered(_adjusted_values(values, mu)).neg2_log_ratio
    return el_mean_logratio(values, mu).neg2_log_ratio


def _golden_min(f, lo: float, hi: float, iters: int = 90) -> float:
    """Golden-section minimum of a unimodal function on [lo, hi]."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    best = min(fc, fd)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
        best = min(best, fc, fd)
        if (b - a) <= 1e-12 * (1.0 + abs(a) + abs(b)):
            break
    return best


def _profile_diff_stat(v0: np.ndarray, v1: np.ndarray, delta: float,
                       adjusted: bool) -> float:
    """Profiled two-group EL statistic for 'mean0 - mean1 = delta'."""
    lo = max(float(v0.min()), delta + float(v1.min()))
    hi = min(float(v0.max()), delta + float(v1.max()))
    if adjusted:
        span0 = float(v0.max() - v0.min())
        span1 = float(v1.max() - v1.min())
        pad = max(span0, span1, 1e-8)
        lo -= pad
        hi += pad
    if not lo < hi:
        return np.inf
    width = hi - lo
    margin = width * 1e-12

    def objective(t: float) -> float:
        w0 = _el_stat(v0, t, adjusted)
        if not np.isfinite(w0):
            return np.inf
        return w0 + _el_stat(v1, t - delta, adjusted)

    return _golden_min(objective, lo + margin, hi - margin)


def _el_bound(stat_fn, center: float, edge: float, cutoff: float,
              adjusted: bool) -> float:
    """Solve stat_fn(value) == cutoff between the center and one edge."""

    def f(value: float) -> float:
        s = stat_fn(value)
        return (s if np.isfinite(s) else 1e300) - cutoff

    span = abs(edge - center)
    if span == 0.0:
        raise OpenBoundError("degenerate pseudo-value hull")
    probe = center + (edge - center) * (1.0 - 1e-9)
    if f(probe) < 0.0:
        if not adjusted:
            raise OpenBoundError(
                "confidence bound not bracketed inside the pseudo-value hull"
            )
        # the adjusted statistic is finite beyond the hull; expand outward
        for _ in range(60):
            probe = center + (probe - center) * 2.0
            if f(probe) >= 0.0:
                break
        else:
            raise OpenBoundError("adjusted EL bound not bracketed")
    return float(brentq(f, min(center, probe), max(center, probe),
                        xtol=1e-10 * max(1.0, span), maxiter=200))


def jel_ci(data: TwoSampleData, target: str = "DIFF", level: float = 0.95,
           adjusted: bool = False) -> IntervalEstimate:
    """Jackknife empirical likelihood interval for one target.

    Pseudo-values of the pairwise Gini statistic are treated as an
    approximately independent sample; the interval collects the means
    whose EL ratio stays under the chi-square(1) quantile. The
    difference target profiles a shared mean shift across both groups.
    """
    target = target.upper()
    cutoff = float(chi2.ppf(level, 1))
    method = "AJEL" if adjusted else "JEL"
    if target in ("G0", "G1"):
        gid = 0 if target == "G0" else 1
        pv = jackknife_pseudovalues(data.group(gid))
        center = float(pv.mean())
        stat = lambda g: _el_stat(pv, g, adjusted)
        lower = _el_bound(stat, center, float(pv.min()), cutoff, adjusted)
        upper = _el_bound(stat, center, float(pv.max()), cutoff, adjusted)
        estimate = pairwise_gini(data.group(gid))
    elif target == "DIFF":
        pv0 = jackknife_pseudovalues(data.group(0))
        pv1 = jackknife_pseudovalues(data.group(1))
        center = float(pv0.mean() - pv1.mean())
        stat = lambda d: _profile_diff_stat(pv0, pv1, d, adjusted)
        lo_edge = float(pv0.min() - pv1.max())
        hi_edge = float(pv0.max() - pv1.min())
        lower = _el_bound(stat, center, lo_edge, cutoff, adjusted)
        upper = _el_bound(stat, center, hi_edge, cutoff, adjusted)
        estimate = pairwise_gini(data.group(0)) - pairwise_gini(data.group(1))
    else:
        raise DataError(f"unknown target {target!r}")
    return IntervalEstimate(
        target=target, method=method, level=level,
        lower=lower, upper=upper, estimate=float(estimate),
    )


def jel_equality_test(data: TwoSampleData, adjusted: bool = False,
                      level: float = 0.05) -> TestResult:
    """Equality test from the profiled jackknife EL at zero difference."""
    pv0 = jackknife_pseudovalues(data.group(0))
    pv1 = jackknife_pseudovalues(data.group(1))
    stat = _profile_diff_stat(pv0, pv1, 0.0, adjusted)
    p = float(chi2.sf(stat, 1)) if np.isfinite(stat) else 0.0
    return TestResult(
        method="AJEL" if adjusted else "JEL", statistic=float(stat),
        p_value=p, level=level, reject=bool(p < level),
    )


# ---------------------------------------------------------------------------
# bootstrap


def _resample_indices(rng: np.random.Generator, n: int) -> np.ndarray:
    """One with-replacement index draw; separated out so studies can
    stub the resampling step."""
    return rng.integers(0, n, n)


def _point_and_se(data: TwoSampleData, target: str, core: str,
                  basis: BasisFunction | None, use_logit: bool) -> tuple[float, float]:
    """Estimate and standard error on the requested scale."""
    if core == "drm":
        fit = fit_theta(data, basis)
        gini = mele_gini(fit)
        sigma = estimate_sigma_drm(fit, gini)
    else:
        gini = emp_gini(data)
        sigma = estimate_sigma_nonparam(data, gini)
    if not use_logit:
        return gini.target(target), sigma.se(target)
    if target == "DIFF":
        phi = float(logit(gini.g0) - logit(gini.g1))
        var = delta_variance("logit-diff", gini, sigma)
    else:
        g = gini.target(target)
        if not 0.0 < g < 1.0:
            raise SingularityError(f"logit undefined at index estimate {g!r}")
        phi = float(logit(g))
        var = delta_variance(f"logit-{target.lower()}", gini, sigma)
    return phi, float(np.sqrt(var / sigma.n))


def bootstrap_t_ci(data: TwoSampleData, target: str = "DIFF", core: str = "drm",
                   basis: BasisFunction | None = None, B: int = 1000,
                   level: float = 0.95, seed=None, spawn_key: tuple[int, ...] = (),
                   use_logit: bool = False) -> IntervalEstimate:
    """Bootstrap-t interval with per-group whole-sample resampling.

    Replicates that fail to fit are dropped; more than 10 percent of
    failures raises :class:`StudyError`. With ``use_logit`` the
    studentization happens on the logit scale and single-index
    endpoints map back through the inverse logit.
    """
    target = target.upper()
    if core not in ("drm", "emp"):
        raise DataError(f"unknown bootstrap core {core!r}")
    if B < 50:
        raise DataError("bootstrap needs at least 50 replicates")
    if core == "drm" and basis is None:
        basis = make_basis("log")
    phi_hat, se_hat = _point_and_se(data, target, core, basis, use_logit)
    if se_hat <= 0:
        raise DegenerateDataError("zero standard error; cannot studentize")
    n0, n1 = data.n
    tstats = []
    failed = 0
    for b in range(B):
        rng = _rng_for(seed, spawn_key + (b,))
        idx0 = _resample_indices(rng, n0)
        idx1 = _resample_indices(rng, n1)
        try:
            data_b = TwoSampleData.from_arrays(data.x0[idx0], data.x1[idx1])
            phi_b, se_b = _point_and_se(data_b, target, core, basis, use_logit)
        except DrmGiniError:
            failed += 1
            continue
        if se_b <= 0 or not np.isfinite(phi_b):
            failed += 1
            continue
        tstats.append((phi_b - phi_hat) / se_b)
    if failed > 0.1 * B:
        raise StudyError(f"{failed} of {B} bootstrap replicates failed")
    tstats = np.asarray(tstats)
    alpha = 1.0 - level
    q_lo, q_hi = np.quantile(tstats, [alpha / 2.0, 1.0 - alpha / 2.0], method="linear")
    lower = phi_hat - q_hi * se_hat
    upper = phi_hat - q_lo * se_hat
    method = ("BL-" if use_logit else "BT-") + ("DRM" if core == "drm" else "EMP")
    scale = "identity"
    estimate = phi_hat
    if use_logit:
        if target == "DIFF":
            scale = "logit"
        else:
            lower, upper = float(expit(lower)), float(expit(upper))
            estimate = float(expit(phi_hat))
    return IntervalEstimate(
        target=target, method=method, level=level,
        lower=float(lower), upper=float(upper), estimate=float(estimate),
        se=se_hat, scale=scale, extra={"B": B, "failed": failed},
    )


# ---------------------------------------------------------------------------
# goodness of fit


@dataclass(frozen=True)
class GofResult:
    statistic: float
    p_value: float
    B: int
    failed: int

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic, "p_value": self.p_value,
            "B": self.B, "failed": self.failed,
        }


def _gof_statistic(fit: DrmFit) -> float:
    """Scaled sup distance between the tilted and the empirical CDF of
    group 1, over the pooled positive observations."""
    cdfs = fitted_cdfs(fit)
    pos1 = np.sort(fit.data.positives(1))
    emp_at = lambda q: np.searchsorted(pos1, q, side="right") / pos1.size
    gap = np.abs(cdfs.cdf1(cdfs.support) - emp_at(cdfs.support))
    n01, n11 = fit.data.n_pos
    return float(np.sqrt(n01 * n11 / (n01 + n11)) * gap.max())


def gof_test(data: TwoSampleData, basis: BasisFunction, B: int = 1000,
             seed=None, spawn_key: tuple[int, ...] = ()) -> GofResult:
    """Bootstrap assessment of the density ratio link.

    Bootstrap positives are drawn from the fitted pair (baseline
    weights for group 0, tilted weights for group 1) with the observed
    positive counts, the tilt is refitted, and the p-value is the
    share of bootstrap statistics at least as large as the observed
    one.
    """
    fit = fit_theta(data, basis)
    t_obs = _gof_statistic(fit)
    n01, n11 = data.n_pos
    w0 = fit.weights / fit.weights.sum()
    w1_raw = fit.weights * fit.omega
    w1 = w1_raw / w1_raw.sum()
    stats = []
    failed = 0
    for b in range(B):
        rng = _rng_for(seed, spawn_key + (b,))
        pos0 = rng.choice(fit.x, size=n01, replace=True, p=w0)
        pos1 = rng.choice(fit.x, size=n11, replace=True, p=w1)
        try:
            data_b = TwoSampleData.from_arrays(pos0, pos1)
            stats.append(_gof_statistic(fit_theta(data_b, basis)))
        except DrmGiniError:
            failed += 1
    if failed > 0.1 * B:
        raise StudyError(f"{failed} of {B} goodness-of-fit replicates failed")
    stats = np.asarray(stats)
    return GofResult(
        statistic=t_obs, p_value=float(np.mean(stats >= t_obs)),
        B=B, failed=failed,
    )


# ---------------------------------------------------------------------------
# shared per-sample cache and method dispatch


class AnalysisCache:
    """Lazy store of the fitted objects one sample can share across
    interval and test methods."""

    def __init__(self, data: TwoSampleData, basis: BasisFunction):
        self.data = data
        self.basis = basis
        self._fit = None
        self._mele = None
        self._emp = None
        self._sigma_drm = None
        self._sigma_non = None
        self._pseudo: dict[int, np.ndarray] = {}

    def fit(self) -> DrmFit:
        if self._fit is None:
            self._fit = fit_theta(self.data, self.basis)
        return self._fit

    def mele(self) -> GiniEstimate:
        if self._mele is None:
            self._mele = mele_gini(self.fit())
        return self._mele

    def emp(self) -> GiniEstimate:
        if self._emp is None:
            self._emp = emp_gini(self.data)
        return self._emp

    def sigma_drm(self) -> CovarianceEstimate:
        if self._sigma_drm is None:
            self._sigma_drm = estimate_sigma_drm(self.fit(), self.mele())
        return self._sigma_drm

    def sigma_non(self) -> CovarianceEstimate:
        if self._sigma_non is None:
            self._sigma_non = estimate_sigma_nonparam(self.data, self.emp())
        return self._sigma_non

    def pseudovalues(self, gid: int) -> np.ndarray:
        if gid not in self._pseudo:
            self._pseudo[gid] = jackknife_pseudovalues(self.data.group(gid))
        return self._pseudo[gid]


def compute_interval(cache: AnalysisCache, target: str, method: str,
                     level: float = 0.95, B: int = 1000, seed=None,
                     spawn_key: tuple[int, ...] = ()) -> IntervalEstimate:
    """Dispatch one interval method on a shared cache."""
    target = target.upper()
    method = method.upper()
    if method in ("NA-DRM", "NA-EMP", "NL-DRM", "NL-EMP"):
        drm = method.endswith("DRM")
        gini = cache.mele() if drm else cache.emp()
        sigma = cache.sigma_drm() if drm else cache.sigma_non()
        if method.startswith("NA"):
            out = wald_ci(gini.target(target), np.sqrt(sigma.var(target)),
                          sigma.n, level, target=target, method=method)
            return out
        if target == "DIFF":
            phi = float(logit(gini.g0) - logit(gini.g1))
            sd = np.sqrt(delta_variance("logit-diff", gini, sigma))
            out = wald_ci(phi, sd, sigma.n, level, target=target, method=method)
            return IntervalEstimate(
                target=target, method=method, level=level, lower=out.lower,
                upper=out.upper, estimate=phi, se=out.se, scale="logit",
            )
        sd = np.sqrt(delta_variance(f"logit-{target.lower()}", gini, sigma))
        return logit_ci(gini.target(target), sd, sigma.n, level,
                        target=target, method=method)
    if method in ("JEL", "AJEL"):
        return jel_ci(cache.data, target, level, adjusted=method == "AJEL")
    if method in ("BT-DRM", "BT-EMP", "BL-DRM"):
        return bootstrap_t_ci(
            cache.data, target, core="drm" if method.endswith("DRM") else "emp",
            basis=cache.basis, B=B, level=level, seed=seed, spawn_key=spawn_key,
            use_logit=method.startswith("BL"),
        )
    raise DataError(f"unknown interval method {method!r}; choose from {INTERVAL_METHODS}")


def compute_test(cache: AnalysisCache, method: str, level: float = 0.05) -> TestResult:
    """Dispatch one equality-test method on a shared cache."""
    method = method.upper()
    if method in ("NA-DRM", "NL-DRM", "NA-EMP", "NL-EMP"):
        drm = method.endswith("DRM")
        gini = cache.mele() if drm else cache.emp()
        sigma = cache.sigma_drm() if drm else cache.sigma_non()
        return equality_test(gini, sigma, method=method[:2], level=level)
    if method in ("JEL", "AJEL"):
        return jel_equality_test(cache.data, adjusted=method == "AJEL", level=level)
    raise DataError(f"unknown test method {method!r}; choose from {TEST_METHODS}")
