import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import zipf_tail
from scipy import optimize, special, stats

from syscallnet.callgraph import SystemCallGraph
from syscallnet.errors import InsufficientTail
from syscallnet.powerlaw import (
    PowerLawFit,
    bootstrap_ks,
    degree_sample,
    fit_power_law,
    goodness_of_fit,
    hurwitz_zeta,
    p_value_from_ensemble,
    power_law_test,
    sample_power_law,
)


def mle_oracle(x, x_min):
    tail = x[x >= x_min]
    sumlog = np.log(tail).sum()

    def nll(a):
        return tail.size * np.log(special.zeta(a, x_min)) + a * sumlog

    return optimize.minimize_scalar(nll, bounds=(1.01, 10.0), method="bounded",
                                    options={"xatol": 1e-10}).x


def ks_oracle(x, x_min, alpha):
    tail = np.sort(x[x >= x_min])
    top = int(tail.max())
    k = np.arange(x_min, top + 1)
    cdf_model = 1.0 - special.zeta(alpha, k + 1) / special.zeta(alpha, x_min)
    cdf_emp = np.searchsorted(tail, k, side="right") / tail.size
    return np.max(np.abs(cdf_emp - cdf_model))


def test_hurwitz_zeta_matches_scipy():
    s = np.array([1.05, 1.5, 2.0, 2.5, 3.7, 8.0, 15.0])
    for q in (1, 2, 5, 39, 40, 41, 1000, 10**6):
        np.testing.assert_allclose(hurwitz_zeta(s, q), special.zeta(s, q), rtol=1e-12)


def test_zeta_derivative_matches_finite_difference():
    s = np.array([1.3, 2.5, 4.0])
    q = np.array([1, 7, 300])
    _, d = hurwitz_zeta(s, q, deriv=True)
    h = 1e-6
    fd = (special.zeta(s + h, q) - special.zeta(s - h, q)) / (2 * h)
    np.testing.assert_allclose(d, fd, rtol=1e-6)


def test_recovers_exponent_from_reference_sampler():
    x = zipf_tail(2.5, 5, 5000, seed=1)
    fit = fit_power_law(x)
    assert 2.4 <= fit.alpha <= 2.6
    assert fit.n == 5000 and fit.n_tail >= 10


def test_mle_matches_numerical_optimizer():
    rng = np.random.default_rng(2)
    for alpha, x_min in ((1.8, 1), (2.5, 5), (3.2, 2)):
        x = zipf_tail(alpha, x_min, 2000, seed=rng)
        for cut in (x_min, x_min + 3):
            fit = fit_power_law(x, x_min=cut)
            assert fit.x_min == cut
            assert fit.alpha == pytest.approx(mle_oracle(x, cut), abs=1e-6)
            assert fit.ks_statistic == pytest.approx(ks_oracle(x, cut, fit.alpha), abs=1e-9)


def test_scan_picks_minimum_ks():
    x = np.concatenate([zipf_tail(2.3, 6, 800, seed=3), np.random.default_rng(3).integers(1, 6, 400)])
    best = fit_power_law(x)
    for cut in np.unique(x)[:12]:
        try:
            other = fit_power_law(x, x_min=int(cut))
        except InsufficientTail:
            continue
        assert best.ks_statistic <= other.ks_statistic + 1e-12


def test_p_of_xmin_is_mass_at_cutoff():
    x = zipf_tail(2.5, 3, 1000, seed=4)
    fit = fit_power_law(x, x_min=3)
    assert fit.p_of_xmin == pytest.approx(np.mean(x == 3))


def test_sampler_matches_reference_distribution():
    ours = sample_power_law(2.5, 5, 20000, np.random.default_rng(5))
    ref = zipf_tail(2.5, 5, 20000, seed=6)
    assert ours.min() >= 5
    assert stats.ks_2samp(np.minimum(ours, 200), np.minimum(ref, 200)).pvalue > 0.01
    k = np.arange(5, 9)
    expected = k ** -2.5 / special.zeta(2.5, 5)
    observed = np.array([(ours == v).mean() for v in k])
    np.testing.assert_allclose(observed, expected, atol=0.01)


def test_sampler_extreme_exponent_stays_finite():
    x = sample_power_law(1.0001, 1, 5000, np.random.default_rng(0))
    assert np.all(x >= 1) and np.all(x <= 2**53)


def test_insufficient_tail():
    with pytest.raises(InsufficientTail):
        fit_power_law([3] * 50)
    with pytest.raises(InsufficientTail):
        fit_power_law([1, 2, 3, 4, 5])
    with pytest.raises(ValueError):
        fit_power_law([0, 1, 2])


def test_plausibility_rule():
    fit = PowerLawFit(x_min=2, alpha=2.2, p_of_xmin=0.1, ks_statistic=0.05, n_tail=30, n=40)
    assert fit.plausible is None
    fit.p_value = 0.65634
    assert fit.plausible
    fit.p_value = 0.1
    assert not fit.plausible
    doc = json.loads(fit.to_json())
    assert set(doc) == {"x_min", "alpha", "p_of_xmin", "ks", "p_value", "n_tail", "n", "n_bootstrap", "seed"}


def test_goodness_of_fit_deterministic_and_job_independent():
    x = zipf_tail(2.5, 2, 600, seed=8)
    fit = fit_power_law(x)
    a = bootstrap_ks(fit, x, 120, seed=3)
    b = bootstrap_ks(fit, x, 120, seed=3, jobs=3)
    np.testing.assert_array_equal(a, b)
    assert goodness_of_fit(fit, x, 120, seed=3) == goodness_of_fit(fit, x, 120, seed=3)
    with pytest.raises(ValueError):
        goodness_of_fit(fit, x, 50)


def test_power_law_test_fills_fields():
    x = zipf_tail(2.5, 2, 500, seed=9)
    fit = power_law_test(x, n_bootstrap=100, seed=4)
    assert 0.0 <= fit.p_value <= 1.0
    assert (fit.n_bootstrap, fit.seed) == (100, 4)


def test_p_value_monotone_in_observed_ks():
    ens = np.random.default_rng(0).random(200)
    ks = np.linspace(0, 1, 50)
    p = [p_value_from_ensemble(k, ens) for k in ks]
    assert all(a >= b for a, b in zip(p, p[1:]))
    assert p_value_from_ensemble(0.5, [np.nan, 0.7, 0.2]) == 0.5


def test_degree_sample_drops_zeros():
    g = SystemCallGraph.from_edges({("a", "b"): 3, ("c", "b"): 1, ("b", "b"): 2})
    assert sorted(degree_sample(g, "in")) == [3]
    assert sorted(degree_sample([g, g], "in", weighted=True)) == [6, 6]
    assert sorted(degree_sample(g, "out")) == [1, 1, 1]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_fit_is_permutation_invariant(seed):
    rng = np.random.default_rng(seed)
    x = zipf_tail(2.2, 1, 300, seed=rng)
    a = fit_power_law(x)
    b = fit_power_law(rng.permutation(x))
    assert a == b
