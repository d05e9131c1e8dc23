"""Tests for the beta-binomial likelihood ratios."""

import math

import numpy as np
import pytest

from rarelr.beta_binomial import (
    BetaParams,
    BinomialData,
    lr_full,
    lr_joint,
    lr_plugin,
    lr_two_step,
    posterior,
)


def random_inputs(rng, n_cases, alpha_hi=100.0, n_hi=10**6):
    """Seeded random (prior, data) pairs across the documented ranges."""
    for _ in range(n_cases):
        alpha = float(rng.uniform(1e-6, alpha_hi))
        beta = float(rng.uniform(1e-6, alpha_hi))
        n = int(rng.integers(0, n_hi + 1))
        b = int(rng.integers(0, n + 1))
        yield BetaParams(alpha, beta), BinomialData(n, b)


class TestValidation:
    @pytest.mark.parametrize("alpha,beta", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0),
                                            (math.inf, 1.0), (math.nan, 1.0)])
    def test_hyperparameters_must_be_positive_finite(self, alpha, beta):
        with pytest.raises(ValueError):
            BetaParams(alpha, beta)

    def test_count_bounds(self):
        with pytest.raises(ValueError):
            BinomialData(10, 11)
        with pytest.raises(ValueError):
            BinomialData(10, -1)
        with pytest.raises(ValueError):
            BinomialData(-1, 0)


class TestPosterior:
    def test_uniform_prior_rare_match_with_suspect(self):
        post = posterior(BetaParams(1, 1), BinomialData(100, 0), include_suspect=True)
        assert (post.alpha, post.beta) == (2.0, 101.0)

    def test_no_data_leaves_prior_unchanged(self):
        post = posterior(BetaParams(2.5, 7.0), BinomialData(0, 0), include_suspect=False)
        assert (post.alpha, post.beta) == (2.5, 7.0)

    def test_general_update(self):
        post = posterior(BetaParams(2, 3), BinomialData(10, 4), include_suspect=True)
        assert (post.alpha, post.beta) == (7.0, 9.0)


class TestClosedForms:
    def test_full_uniform_rare_match(self):
        assert lr_full(BetaParams(1, 1), BinomialData(100, 0)).lr == pytest.approx(
            51.5, abs=1e-12
        )

    def test_full_prior_only(self):
        assert lr_full(BetaParams(1, 1), BinomialData(0, 0)).lr == pytest.approx(
            1.5, abs=1e-14
        )

    def test_full_asymmetric_prior(self):
        assert lr_full(BetaParams(1, 5), BinomialData(100, 0)).lr == pytest.approx(
            53.5, abs=1e-12
        )

    def test_plugin_values(self):
        assert lr_plugin(BetaParams(1, 1), BinomialData(100, 0)).lr == pytest.approx(
            102.0, abs=1e-12
        )
        assert lr_plugin(BetaParams(1, 1), BinomialData(0, 0)).lr == pytest.approx(
            2.0, abs=1e-14
        )
        assert lr_plugin(BetaParams(1, 5), BinomialData(100, 0)).lr == pytest.approx(
            106.0, abs=1e-12
        )

    def test_joint_values(self):
        assert lr_joint(BetaParams(1, 1), BinomialData(100, 0)).lr == pytest.approx(
            51.5, rel=1e-13
        )
        assert lr_joint(BetaParams(1, 1), BinomialData(0, 0)).lr == pytest.approx(
            1.5, rel=1e-13
        )

    def test_two_step_values(self):
        assert lr_two_step(BetaParams(1, 1), BinomialData(100, 0)).lr == pytest.approx(
            51.5, rel=1e-13
        )
        assert lr_two_step(BetaParams(1, 1), BinomialData(100, 5)).lr == pytest.approx(
            103.0 / 7.0, rel=1e-13
        )
        # With no data the closed form reduces to (alpha+beta+1)/(alpha+1).
        assert lr_two_step(BetaParams(2, 3), BinomialData(0, 0)).lr == pytest.approx(
            6.0 / 3.0, rel=1e-13
        )

    def test_result_tags(self):
        res = lr_full(BetaParams(1, 1), BinomialData(100, 0))
        assert res.method == "full_bayes"
        assert res.model == "beta"
        assert lr_plugin(BetaParams(1, 1), BinomialData(100, 0)).method == "plugin"
        assert res.log10_lr == pytest.approx(math.log10(res.lr), abs=1e-14)


class TestFormulationAgreement:
    def test_three_routes_agree(self):
        rng = np.random.default_rng(101)
        for prior, data in random_inputs(rng, 2000):
            full = lr_full(prior, data).lr
            joint = lr_joint(prior, data).lr
            two = lr_two_step(prior, data).lr
            assert abs(joint - full) <= 1e-12 * full
            assert abs(two - full) <= 1e-12 * full


class TestAntiConservativeness:
    def test_plugin_always_exceeds_full(self):
        rng = np.random.default_rng(202)
        for prior, data in random_inputs(rng, 5000):
            assert lr_plugin(prior, data).lr > lr_full(prior, data).lr


class TestSensitivityShape:
    def test_strictly_decreasing_in_alpha(self):
        data = BinomialData(100, 0)
        alphas = np.geomspace(0.01, 20.0, 100)
        for beta in (1.0, 10.0, 20.0):
            fulls = [lr_full(BetaParams(a, beta), data).lr for a in alphas]
            plugs = [lr_plugin(BetaParams(a, beta), data).lr for a in alphas]
            assert all(x > y for x, y in zip(fulls, fulls[1:]))
            assert all(x > y for x, y in zip(plugs, plugs[1:]))

    def test_small_alpha_asymptote_of_full(self):
        data = BinomialData(100, 0)
        for beta in (1.0, 5.0, 20.0):
            value = lr_full(BetaParams(1e-9, beta), data).log10_lr
            assert value == pytest.approx(math.log10(1 + beta + 100), abs=1e-8)

    def test_plugin_grows_like_log_one_over_alpha(self):
        # log10 plugin - log10 full - log10(1/alpha) stays bounded as
        # alpha -> 0 (here: visibly stable across eight decades).
        data = BinomialData(100, 0)
        beta = 5.0
        gaps = []
        for alpha in np.geomspace(1e-10, 1e-2, 9):
            prior = BetaParams(float(alpha), beta)
            gap = (
                lr_plugin(prior, data).log10_lr
                - lr_full(prior, data).log10_lr
                - math.log10(1.0 / alpha)
            )
            gaps.append(gap)
        assert max(gaps) - min(gaps) < 0.05
        assert all(abs(g) < 0.1 for g in gaps)
