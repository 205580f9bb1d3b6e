"""Interval constructions, equality tests, bootstrap, model check.

Closed-form hand values pin the normal intervals; the empirical
likelihood value at (1, 2, 3) with candidate mean 1.9 was frozen from
an independent constrained optimization.
"""

import numpy as np
import pytest
from scipy.special import expit, logit
from scipy.stats import norm

import drmgini.inference as inference_mod
from drmgini import (
    AnalysisCache,
    CovarianceEstimate,
    DataError,
    DegenerateDataError,
    GiniEstimate,
    INTERVAL_METHODS,
    OpenBoundError,
    StudyError,
    TEST_METHODS,
    TwoSampleData,
    bootstrap_t_ci,
    compute_interval,
    compute_test,
    el_mean_logratio,
    emp_gini,
    equality_test,
    estimate_sigma_drm,
    estimate_sigma_nonparam,
    fit_theta,
    gof_test,
    jel_ci,
    jel_equality_test,
    logit_ci,
    make_basis,
    mele_gini,
    wald_ci,
)

EL_ORACLE_1_9 = 0.04517044241592588  # values (1,2,3), candidate mean 1.9
Z_975 = norm.ppf(0.975)


def gamma_data(seed=52, n0=40, n1=35):
    rng = np.random.default_rng(seed)
    return TwoSampleData.from_arrays(rng.gamma(2, 2, n0), rng.gamma(3, 1.5, n1))


def toy_sigma(diag=(1.0, 1.0), n=2):
    return CovarianceEstimate(
        kind="nonparametric", sigma=np.diag(diag).astype(float), n=n, ingredients={}
    )


def toy_gini(g0, g1):
    return GiniEstimate(
        method="EMP", g0=g0, g1=g1, m=(1.0, 1.0), psi=(1.5, 1.5), nu_hat=(0.0, 0.0)
    )


# ---------------------------------------------------------------- normal intervals


def test_wald_ci_hand_value():
    ci = wald_ci(0.5, 1.0, 100, level=0.95, target="G0")
    assert ci.lower == pytest.approx(0.5 - Z_975 * 0.1, abs=1e-12)
    assert ci.upper == pytest.approx(0.5 + Z_975 * 0.1, abs=1e-12)
    assert ci.lower == pytest.approx(0.3040036, abs=1e-6)
    assert ci.se == pytest.approx(0.1)
    assert ci.covers(0.5) and not ci.covers(0.7)
    assert ci.length == ci.upper - ci.lower


def test_wald_ci_zero_sd_degenerates_to_point():
    ci = wald_ci(0.42, 0.0, 50)
    assert (ci.lower, ci.upper) == (0.42, 0.42)


def test_wald_ci_levels_nest():
    wide = wald_ci(0.0, 1.0, 30, level=0.95)
    narrow = wald_ci(0.0, 1.0, 30, level=0.90)
    assert wide.lower < narrow.lower < narrow.upper < wide.upper


def test_logit_ci_maps_back():
    ci = logit_ci(0.4, 2.0, 100, level=0.95)
    center = logit(0.4)
    assert ci.lower == pytest.approx(expit(center - Z_975 * 0.2), abs=1e-12)
    assert ci.upper == pytest.approx(expit(center + Z_975 * 0.2), abs=1e-12)
    assert 0.0 < ci.lower < ci.upper < 1.0
    assert ci.estimate == 0.4


def test_logit_ci_width_shrinks_with_n():
    a = logit_ci(0.4, 2.0, 100)
    b = logit_ci(0.4, 2.0, 10000)
    assert b.length < a.length


def test_logit_ci_rejects_boundary():
    from drmgini import SingularityError

    with pytest.raises(SingularityError, match="logit"):
        logit_ci(1.0, 1.0, 50)


def test_interval_to_dict():
    ci = wald_ci(0.5, 1.0, 100, target="DIFF", method="NA-DRM")
    d = ci.to_dict()
    assert d["target"] == "DIFF"
    assert d["method"] == "NA-DRM"
    assert d["scale"] == "identity"
    assert d["lower"] == ci.lower


# ---------------------------------------------------------------- equality tests


def test_equality_exact_null_with_zero_variance():
    out = equality_test(toy_gini(0.4, 0.4), toy_sigma((0.0, 0.0)))
    assert out.statistic == 0.0
    assert out.p_value == 1.0
    assert out.reject is False


def test_equality_zero_variance_nonzero_diff_raises():
    with pytest.raises(DegenerateDataError, match="nonpositive variance"):
        equality_test(toy_gini(0.5, 0.4), toy_sigma((0.0, 0.0)))


def test_equality_critical_statistic():
    # diff 1.959964 with unit standard error sits at the 5 percent edge
    out = equality_test(toy_gini(1.959964, 0.0), toy_sigma())
    assert out.statistic == pytest.approx(1.959964, abs=1e-12)
    assert out.p_value == pytest.approx(0.05, abs=1e-5)
    assert out.method == "NA-EMP"


def test_equality_logit_statistic():
    gini = toy_gini(0.6, 0.4)
    out = equality_test(gini, toy_sigma(), method="NL")
    expected_phi = logit(0.6) - logit(0.4)
    grad_sq = (1 / (0.6 * 0.4)) ** 2 + (1 / (0.4 * 0.6)) ** 2
    assert out.statistic == pytest.approx(expected_phi / np.sqrt(grad_sq / 2), abs=1e-12)
    assert out.method == "NL-EMP"


def test_equality_unknown_method():
    with pytest.raises(DataError, match="choose NA or NL"):
        equality_test(toy_gini(0.5, 0.4), toy_sigma(), method="KS")


def test_equality_label_swap_flips_sign():
    data = gamma_data(61, 60, 60)
    swapped = TwoSampleData.from_arrays(data.x1, data.x0)
    out = []
    for d in (data, swapped):
        fit = fit_theta(d, make_basis("log"))
        gini = mele_gini(fit)
        out.append(equality_test(gini, estimate_sigma_drm(fit, gini)))
    assert out[0].statistic == pytest.approx(-out[1].statistic, abs=1e-6)
    assert out[0].p_value == pytest.approx(out[1].p_value, abs=1e-8)
    assert out[0].method == "NA-DRM"


# ---------------------------------------------------------------- EL for a mean


def test_el_zero_at_sample_mean():
    sol = el_mean_logratio([1.0, 2.0, 6.0], 3.0)
    assert sol.neg2_log_ratio == pytest.approx(0.0, abs=1e-12)
    assert sol.lam == pytest.approx(0.0, abs=1e-10)
    assert sol.feasible


def test_el_frozen_oracle():
    sol = el_mean_logratio([1.0, 2.0, 3.0], 1.9)
    assert sol.feasible
    assert sol.neg2_log_ratio == pytest.approx(EL_ORACLE_1_9, abs=1e-10)


def test_el_infeasible_outside_hull():
    for mu in (1.0, 0.5, 3.0, 4.0):
        sol = el_mean_logratio([1.0, 2.0, 3.0], mu)
        assert sol.neg2_log_ratio == np.inf
        assert not sol.feasible


def test_el_increases_away_from_mean():
    vals = [1.0, 2.0, 3.0, 5.0]
    mean = np.mean(vals)
    stats = [el_mean_logratio(vals, mu).neg2_log_ratio for mu in (mean, 2.2, 1.8, 1.3)]
    assert stats[0] < stats[1] < stats[2] < stats[3]


def test_el_needs_two_values():
    with pytest.raises(DegenerateDataError, match="at least two"):
        el_mean_logratio([1.0], 1.0)


# ---------------------------------------------------------------- jackknife EL intervals


def test_jel_ci_contains_pseudovalue_mean():
    from drmgini import jackknife_pseudovalues

    data = gamma_data()
    for target, center in (
        ("G0", jackknife_pseudovalues(data.group(0)).mean()),
        ("G1", jackknife_pseudovalues(data.group(1)).mean()),
        (
            "DIFF",
            jackknife_pseudovalues(data.group(0)).mean()
            - jackknife_pseudovalues(data.group(1)).mean(),
        ),
    ):
        ci = jel_ci(data, target)
        assert ci.lower < center < ci.upper
        assert ci.method == "JEL"


def test_ajel_contains_jel():
    data = gamma_data()
    for target in ("G0", "DIFF"):
        plain = jel_ci(data, target)
        adj = jel_ci(data, target, adjusted=True)
        assert adj.method == "AJEL"
        assert adj.lower <= plain.lower
        assert adj.upper >= plain.upper


def test_jel_ci_levels_nest():
    data = gamma_data()
    wide = jel_ci(data, "G0", level=0.95)
    narrow = jel_ci(data, "G0", level=0.80)
    assert wide.lower <= narrow.lower < narrow.upper <= wide.upper


def test_jel_ci_unknown_target():
    with pytest.raises(DataError, match="unknown target"):
        jel_ci(gamma_data(), "RATIO")


def test_jel_ci_degenerate_hull():
    data = TwoSampleData.from_arrays([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(OpenBoundError, match="degenerate"):
        jel_ci(data, "G0")


def test_jel_equality_identical_groups():
    rng = np.random.default_rng(52)
    x = rng.gamma(2, 2, 30)
    out = jel_equality_test(TwoSampleData.from_arrays(x, x))
    assert out.statistic == pytest.approx(0.0, abs=1e-6)
    assert out.p_value > 0.99
    assert out.reject is False


def test_jel_equality_swap_invariant():
    data = gamma_data(63, 30, 30)
    swapped = TwoSampleData.from_arrays(data.x1, data.x0)
    a = jel_equality_test(data)
    b = jel_equality_test(swapped)
    assert a.statistic == pytest.approx(b.statistic, abs=1e-6)
    assert a.statistic >= 0.0


# ---------------------------------------------------------------- bootstrap-t


def test_bootstrap_validates_arguments():
    data = gamma_data()
    with pytest.raises(DataError, match="at least 50"):
        bootstrap_t_ci(data, B=49)
    with pytest.raises(DataError, match="unknown bootstrap core"):
        bootstrap_t_ci(data, core="wild")


def test_bootstrap_identity_resampling_collapses(monkeypatch):
    monkeypatch.setattr(inference_mod, "_resample_indices", lambda rng, n: np.arange(n))
    data = gamma_data()
    ci = bootstrap_t_ci(data, "DIFF", core="emp", B=60, seed=3)
    assert ci.lower == ci.estimate == ci.upper
    assert ci.extra["failed"] == 0


def test_bootstrap_seeded_runs_identical():
    data = gamma_data()
    a = bootstrap_t_ci(data, "DIFF", core="emp", B=60, seed=9)
    b = bootstrap_t_ci(data, "DIFF", core="emp", B=60, seed=9)
    assert (a.lower, a.upper) == (b.lower, b.upper)
    assert a.lower < a.upper
    assert a.method == "BT-EMP"
    assert a.extra["B"] == 60


def test_bootstrap_seed_changes_interval():
    data = gamma_data()
    a = bootstrap_t_ci(data, "DIFF", core="emp", B=60, seed=9)
    b = bootstrap_t_ci(data, "DIFF", core="emp", B=60, seed=10)
    assert (a.lower, a.upper) != (b.lower, b.upper)


def test_bootstrap_failure_budget(monkeypatch):
    # empty resamples make every replicate unanalyzable
    monkeypatch.setattr(
        inference_mod, "_resample_indices", lambda rng, n: np.array([], dtype=int)
    )
    data = gamma_data()
    with pytest.raises(StudyError, match="60 of 60"):
        bootstrap_t_ci(data, "G0", core="emp", B=60, seed=3)


def test_bootstrap_zero_se_raises():
    data = TwoSampleData.from_arrays([4.0, 4.0, 4.0], [4.0, 4.0, 4.0])
    with pytest.raises(DegenerateDataError, match="zero standard error"):
        bootstrap_t_ci(data, "G0", core="emp", B=60, seed=1)


def test_bootstrap_drm_core_runs():
    data = gamma_data(64, 50, 50)
    ci = bootstrap_t_ci(data, "G0", core="drm", basis=make_basis("log"), B=60, seed=5)
    assert ci.method == "BT-DRM"
    assert ci.lower < ci.upper
    gini = mele_gini(fit_theta(data, make_basis("log")))
    assert ci.estimate == pytest.approx(gini.g0)


def test_bootstrap_logit_scale_single_target():
    data = gamma_data(65, 50, 50)
    ci = bootstrap_t_ci(data, "G0", core="drm", basis=make_basis("log"), B=60,
                        seed=5, use_logit=True)
    assert ci.method == "BL-DRM"
    assert ci.scale == "identity"  # endpoints mapped back to the index scale
    assert 0.0 < ci.lower < ci.upper < 1.0


def test_bootstrap_logit_scale_difference():
    data = gamma_data(65, 50, 50)
    ci = bootstrap_t_ci(data, "DIFF", core="drm", basis=make_basis("log"), B=60,
                        seed=5, use_logit=True)
    assert ci.scale == "logit"
    gini = mele_gini(fit_theta(data, make_basis("log")))
    assert ci.estimate == pytest.approx(logit(gini.g0) - logit(gini.g1))


# ---------------------------------------------------------------- model check


def test_gof_null_behaves():
    rng = np.random.default_rng(50)
    data = TwoSampleData.from_arrays(rng.exponential(2.0, 80), rng.exponential(1.0, 80))
    out = gof_test(data, make_basis("identity"), B=99, seed=77)
    assert out.statistic >= 0.0
    assert 0.0 <= out.p_value <= 1.0
    assert out.p_value > 0.02
    assert out.failed == 0
    assert out.to_dict()["B"] == 99


def test_gof_rejects_wrong_link():
    rng = np.random.default_rng(51)
    data = TwoSampleData.from_arrays(rng.lognormal(0, 1, 300), rng.gamma(2, 1, 300))
    out = gof_test(data, make_basis("identity"), B=79, seed=78)
    assert out.p_value < 0.05


def test_gof_deterministic():
    rng = np.random.default_rng(53)
    data = TwoSampleData.from_arrays(rng.exponential(1, 50), rng.exponential(1, 50))
    a = gof_test(data, make_basis("log"), B=49, seed=11)
    b = gof_test(data, make_basis("log"), B=49, seed=11)
    assert a.statistic == b.statistic
    assert a.p_value == b.p_value


# ---------------------------------------------------------------- dispatch


def test_cache_computes_once():
    cache = AnalysisCache(gamma_data(), make_basis("log"))
    assert cache.fit() is cache.fit()
    assert cache.mele() is cache.mele()
    assert cache.sigma_drm() is cache.sigma_drm()
    assert cache.pseudovalues(0) is cache.pseudovalues(0)


def test_compute_interval_matches_direct_calls():
    data = gamma_data()
    cache = AnalysisCache(data, make_basis("log"))
    na = compute_interval(cache, "G0", "NA-DRM")
    gini = cache.mele()
    sigma = cache.sigma_drm()
    direct = wald_ci(gini.g0, np.sqrt(sigma.var("G0")), sigma.n, target="G0",
                     method="NA-DRM")
    assert (na.lower, na.upper) == (direct.lower, direct.upper)

    jel_direct = jel_ci(data, "G1")
    jel_disp = compute_interval(cache, "G1", "JEL")
    assert (jel_disp.lower, jel_disp.upper) == (jel_direct.lower, jel_direct.upper)

    bt_disp = compute_interval(cache, "DIFF", "BT-EMP", B=60, seed=4)
    bt_direct = bootstrap_t_ci(data, "DIFF", core="emp", B=60, seed=4)
    assert (bt_disp.lower, bt_disp.upper) == (bt_direct.lower, bt_direct.upper)


def test_compute_interval_logit_difference_scale():
    cache = AnalysisCache(gamma_data(), make_basis("log"))
    out = compute_interval(cache, "DIFF", "NL-DRM")
    assert out.scale == "logit"
    gini = cache.mele()
    assert out.estimate == pytest.approx(logit(gini.g0) - logit(gini.g1))
    single = compute_interval(cache, "G0", "NL-EMP")
    assert 0.0 < single.lower < single.upper < 1.0


def test_compute_interval_unknown_method():
    cache = AnalysisCache(gamma_data(), make_basis("log"))
    with pytest.raises(DataError, match="unknown interval method"):
        compute_interval(cache, "G0", "HDI")


def test_compute_test_dispatch():
    data = gamma_data()
    cache = AnalysisCache(data, make_basis("log"))
    for method in TEST_METHODS:
        out = compute_test(cache, method)
        assert out.method == method
        assert 0.0 <= out.p_value <= 1.0
    direct = equality_test(cache.mele(), cache.sigma_drm(), method="NA")
    disp = compute_test(cache, "NA-DRM")
    assert disp.statistic == direct.statistic
    with pytest.raises(DataError, match="unknown test method"):
        compute_test(cache, "PERM")


def test_method_tuples_cover_dispatch():
    assert "BT-DRM" in INTERVAL_METHODS
    assert "AJEL" in TEST_METHODS
    assert len(set(INTERVAL_METHODS)) == len(INTERVAL_METHODS)
