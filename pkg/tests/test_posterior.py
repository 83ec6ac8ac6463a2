import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracle
from privmarket._logspace import is_log_zero, logsumexp
from privmarket.laplace import PrivacyParams
from privmarket.posterior import log_posterior_matrix, posterior
from privmarket.priors import AvailabilityPrior, binomial, uniform, unit_correlation


@st.composite
def priors(draw, max_n=150):
    kind = draw(st.sampled_from(["unit", "binomial", "uniform"]))
    n = draw(st.integers(1, max_n))
    if kind == "uniform":
        return uniform(n)
    p = draw(st.one_of(st.floats(0.0, 1.0), st.sampled_from([0.0, 1.0])))
    return AvailabilityPrior(kind, n, p)


lams = st.floats(0.01, 5.0)


def test_turning_point_is_half():
    post = posterior(unit_correlation(100, 0.5), PrivacyParams(1.5), 50.0)
    assert post.weights()[100] == pytest.approx(0.5, abs=1e-12)


def test_full_declaration_is_nearly_certain():
    post = posterior(unit_correlation(100, 0.5), PrivacyParams(1.5), 100.0)
    assert post.weights()[100] == pytest.approx(1 / (1 + math.exp(-150)), abs=1e-15)
    assert post.weights()[0] == pytest.approx(math.exp(-150), rel=1e-10)


def test_uniform_posterior_symmetric_about_integer_declaration():
    w = posterior(uniform(10), PrivacyParams(1.0), 5.0).weights()
    np.testing.assert_allclose(w, w[::-1], rtol=1e-14)
    assert int(np.argmax(w)) == 5
    kernel = np.exp(-np.abs(5 - np.arange(11)))
    np.testing.assert_allclose(w, kernel / kernel.sum(), rtol=1e-12)


@pytest.mark.parametrize("p", [0.01, 0.3, 0.5, 0.9])
@pytest.mark.parametrize("x", [-7.0, 0.0, 12.3, 50.0, 88.0, 100.0, 131.0])
def test_unit_posterior_matches_odds_formula(p, x):
    n, lam = 100, 0.2
    expected = 1 / (1 + (1 - p) / p * math.exp(-lam * (abs(x) - abs(n - x))))
    got = posterior(unit_correlation(n, p), PrivacyParams(lam), x).weights()[n]
    assert got == pytest.approx(expected, rel=1e-12)


@settings(max_examples=300, deadline=None)
@given(prior=priors(), lam=lams, x=st.floats(-50, 250))
def test_normalised_and_nonpositive(prior, lam, x):
    lw = posterior(prior, PrivacyParams(lam), x).log_weights
    assert abs(logsumexp(lw)) < 1e-10
    assert np.all(lw[~is_log_zero(lw)] <= 0.0)
    # impossible counts stay impossible
    assert np.array_equal(is_log_zero(lw), is_log_zero(prior.log_pmf_vector()))


@pytest.mark.parametrize("kind, p", [("unit", 0.35), ("binomial", 0.35), ("binomial", 0.9), ("uniform", None)])
@pytest.mark.parametrize("n", [1, 2, 5, 12])
@pytest.mark.parametrize("lam", [0.5, 1.5, 4.0])
def test_matches_extended_precision_oracle(kind, p, n, lam):
    prior = AvailabilityPrior(kind, n, p)
    for x in [-3.0, -0.4, 0.0, n / 3, n / 2, n - 0.1, float(n), n + 2.7]:
        got = posterior(prior, PrivacyParams(lam), x).weights()
        ref = oracle.posterior(kind, n, lam, x, p)
        for i in range(n + 1):
            if ref[i] == 0:
                assert got[i] == 0.0
            else:
                assert got[i] == pytest.approx(float(ref[i]), rel=1e-10)


@pytest.mark.parametrize("prior", [unit_correlation(30, 0.2), binomial(30, 0.7), uniform(30)])
def test_uninformative_noise_recovers_prior(prior):
    w = posterior(prior, PrivacyParams(1e-8), 12.5).weights()
    prior_w = np.where(is_log_zero(prior.log_pmf_vector()), 0.0, np.exp(prior.log_pmf_vector()))
    np.testing.assert_allclose(w, prior_w, atol=1e-6)


@settings(max_examples=200, deadline=None)
@given(prior=priors(60), lam=lams, x1=st.floats(-20, 80), dx=st.floats(0, 40))
def test_larger_declaration_dominates(prior, lam, x1, dx):
    xs = [x1, x1 + dx]
    w = np.exp(log_posterior_matrix(prior, PrivacyParams(lam), xs))
    cdf = np.cumsum(np.where(np.isfinite(w), w, 0.0), axis=1)
    # first-order stochastic dominance: CDF at the larger x is pointwise lower
    assert np.all(cdf[1] <= cdf[0] + 1e-12)


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 200), lam=lams, x=st.floats(-30, 230))
def test_uniform_posterior_is_normalised_likelihood(n, lam, x):
    w = posterior(uniform(n), PrivacyParams(lam), x).weights()
    log_k = -lam * np.abs(x - np.arange(n + 1))
    ref = np.exp(log_k - logsumexp(log_k))
    np.testing.assert_allclose(w, ref, rtol=1e-12, atol=1e-300)


def test_batch_rows_equal_single_calls():
    prior = binomial(40, 0.45)
    xs = np.array([-2.0, 3.3, 20.0, 39.9, 51.0])
    batch = log_posterior_matrix(prior, PrivacyParams(0.8), xs)
    for row, x in zip(batch, xs):
        assert np.array_equal(row, posterior(prior, PrivacyParams(0.8), x).log_weights)


def test_diagnostics():
    post = posterior(uniform(10), PrivacyParams(1.0), 5.0)
    assert post.mean() == pytest.approx(5.0, abs=1e-12)
    assert post.tail_probability(10) == 0.0
    assert post.tail_probability(-1) == pytest.approx(1.0)
    assert post.tail_probability(4) == pytest.approx(post.weights()[5:].sum())
