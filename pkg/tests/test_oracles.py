"""Tests for the quadrature, exact-enumeration, and sampling oracles."""

import math

import pytest

from rarelr.beta_binomial import BetaParams, BinomialData, lr_full
from rarelr.dirichlet_multinomial import (
    DirichletModel,
    EmptySupportError,
    RareMatchData,
    lr_series,
)
from rarelr.kpriors import Degenerate, PoissonTrunc
from rarelr.oracles import (
    DegenerateWeightsError,
    OracleConfig,
    ScaleExceededError,
    TypeAssignment,
    beta_lr_quadrature,
    dirichlet_posterior_mean_exact,
    dirichlet_posterior_mean_mc,
)


class TestTypeAssignment:
    def test_orders_and_validates(self):
        TypeAssignment((1, 3, 7))
        with pytest.raises(ValueError):
            TypeAssignment((3, 1))
        with pytest.raises(ValueError):
            TypeAssignment((0, 2))

    def test_enumerate_counts(self):
        assert sum(1 for _ in TypeAssignment.enumerate_all(6, 3)) == math.comb(6, 3)


class TestOracleConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            OracleConfig(mc_samples=0)
        with pytest.raises(ValueError):
            OracleConfig(tolerance=0.0)


class TestQuadrature:
    def test_uniform_rare_match(self):
        value = beta_lr_quadrature(BetaParams(1, 1), BinomialData(100, 0))
        assert value == pytest.approx(51.5, rel=1e-9)

    def test_prior_only(self):
        value = beta_lr_quadrature(BetaParams(1, 1), BinomialData(0, 0))
        assert value == pytest.approx(1.5, rel=1e-12)

    def test_fractional_alpha(self):
        value = beta_lr_quadrature(BetaParams(0.5, 3.0), BinomialData(10, 2))
        assert value == pytest.approx(14.5 / 3.5, rel=1e-9)

    def test_large_database_narrow_posterior(self):
        prior = BetaParams(2.0, 1.0)
        data = BinomialData(10_000, 5000)
        value = beta_lr_quadrature(prior, data)
        assert value == pytest.approx(lr_full(prior, data).lr, rel=1e-9)

    def test_extreme_hyperparameters(self):
        for alpha, beta, n, b in [(0.01, 50.0, 10_000, 0), (50.0, 0.01, 500, 499)]:
            prior = BetaParams(alpha, beta)
            data = BinomialData(n, b)
            value = beta_lr_quadrature(prior, data)
            assert value == pytest.approx(lr_full(prior, data).lr, rel=1e-9)


class TestExactEnumeration:
    def test_degenerate_hand_instance(self):
        model = DirichletModel(Degenerate(3), m=6)
        data = RareMatchData(2, 1, counts=(2,))
        mean = dirichlet_posterior_mean_exact(model, data)
        assert mean == pytest.approx(1.0 / 3.0, rel=1e-15)

    def test_single_possible_type(self):
        model = DirichletModel(Degenerate(1), m=1)
        data = RareMatchData(0, 0, counts=())
        mean = dirichlet_posterior_mean_exact(model, data)
        assert mean == pytest.approx(1.0, rel=1e-15)

    def test_poisson_prior_matches_series(self):
        model = DirichletModel(PoissonTrunc(3.0, m=8), m=8)
        data = RareMatchData(3, 2, counts=(2, 1))
        mean = dirichlet_posterior_mean_exact(model, data)
        series = lr_series(model, data)
        assert 1.0 / mean == pytest.approx(series.lr, rel=1e-9)

    def test_explicit_mode_equals_collapsed(self):
        # The collapsed assignment count is exactly what the explicit
        # enumeration must reproduce.
        for prior, n, k_obs, counts in [
            (Degenerate(4), 3, 2, (2, 1)),
            (PoissonTrunc(2.0, m=7), 4, 2, (3, 1)),
            (PoissonTrunc(5.0, m=7), 2, 2, (1, 1)),
        ]:
            model = DirichletModel(prior, m=7)
            data = RareMatchData(n, k_obs, counts=counts)
            a = dirichlet_posterior_mean_exact(model, data, mode="collapsed")
            b = dirichlet_posterior_mean_exact(model, data, mode="explicit")
            assert a == b

    def test_relabeling_invariance(self):
        model = DirichletModel(PoissonTrunc(3.0, m=7), m=7)
        data = RareMatchData(3, 2, counts=(2, 1))
        base = dirichlet_posterior_mean_exact(model, data, mode="explicit")
        for cells, suspect in [((2, 5), 7), ((6, 7), 1), ((1, 7), 4)]:
            moved = dirichlet_posterior_mean_exact(
                model, data, mode="explicit", observed_cells=cells, suspect_cell=suspect
            )
            assert moved == base

    def test_scale_guard(self):
        with pytest.raises(ScaleExceededError):
            dirichlet_posterior_mean_exact(
                DirichletModel(Degenerate(3), m=13), RareMatchData(2, 1, counts=(2,))
            )
        with pytest.raises(ScaleExceededError):
            dirichlet_posterior_mean_exact(
                DirichletModel(Degenerate(3), m=8), RareMatchData(7, 1, counts=(7,))
            )
        with pytest.raises(ScaleExceededError):
            dirichlet_posterior_mean_exact(
                DirichletModel(PoissonTrunc(3.0), m=8),  # unbounded prior support
                RareMatchData(2, 1, counts=(2,)),
            )

    def test_contradictory_prior(self):
        model = DirichletModel(Degenerate(2), m=6)
        data = RareMatchData(3, 3, counts=(1, 1, 1))
        with pytest.raises(EmptySupportError):
            dirichlet_posterior_mean_exact(model, data)

    def test_counts_required(self):
        with pytest.raises(ValueError):
            dirichlet_posterior_mean_exact(
                DirichletModel(Degenerate(3), m=6), RareMatchData(2, 1)
            )


class TestImportanceSampling:
    def test_matches_exact_on_small_instance(self):
        model = DirichletModel(Degenerate(3), m=6)
        data = RareMatchData(2, 1, counts=(2,))
        cfg = OracleConfig(mc_samples=200_000, rng_seed=11)
        estimate, std_error = dirichlet_posterior_mean_mc(model, data, cfg)
        assert std_error > 0
        assert abs(estimate - 1.0 / 3.0) <= 3 * std_error

    def test_seeded_determinism(self):
        model = DirichletModel(Degenerate(3), m=6)
        data = RareMatchData(2, 1, counts=(2,))
        cfg = OracleConfig(mc_samples=50_000, rng_seed=99)
        assert dirichlet_posterior_mean_mc(model, data, cfg) == dirichlet_posterior_mean_mc(
            model, data, cfg
        )

    def test_contradictory_prior_raises(self):
        model = DirichletModel(Degenerate(1), m=6)
        data = RareMatchData(2, 1, counts=(2,))
        with pytest.raises((EmptySupportError, DegenerateWeightsError)):
            dirichlet_posterior_mean_mc(model, data, OracleConfig(mc_samples=1000, rng_seed=1))

    def test_too_few_samples_degenerate_weights(self):
        model = DirichletModel(PoissonTrunc(5.0, m=12), m=12)
        data = RareMatchData(4, 3, counts=(2, 1, 1))
        with pytest.raises(DegenerateWeightsError):
            dirichlet_posterior_mean_mc(model, data, OracleConfig(mc_samples=100, rng_seed=5))

    def test_standard_error_scales_like_root_n(self):
        model = DirichletModel(Degenerate(3), m=6)
        data = RareMatchData(2, 1, counts=(2,))
        ses = []
        for n in (10_000, 100_000, 1_000_000):
            cfg = OracleConfig(mc_samples=n, rng_seed=7)
            ses.append(dirichlet_posterior_mean_mc(model, data, cfg)[1])
        for lo, hi in zip(ses[1:], ses[:-1]):
            ratio = hi / lo  # expected sqrt(10) ~ 3.16
            assert math.sqrt(10) / 2 < ratio < math.sqrt(10) * 2

    def test_poisson_prior_matches_series_at_scale(self):
        model = DirichletModel(PoissonTrunc(10.0, m=30), m=30)
        data = RareMatchData(4, 3, counts=(2, 1, 1))
        cfg = OracleConfig(mc_samples=1_000_000, rng_seed=13)
        estimate, std_error = dirichlet_posterior_mean_mc(model, data, cfg)
        target = 1.0 / lr_series(model, data).lr
        assert abs(estimate - target) <= 3 * std_error
