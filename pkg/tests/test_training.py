import math

import numpy as np
import pytest

from conftest import make_registry, random_params, zero_params
from draftlab.data import Dataset, MatchRecord, SyntheticSpec, generate_synthetic
from draftlab.errors import ContractError, NumericalError
from draftlab.model import ModelParams, Roster, match_logit
from draftlab.training import (AdaGradState, GradientSet, TrainConfig,
                               adagrad_step, default_init_scale,
                               finite_difference_check, gradients, init_params,
                               l2_penalty, negative_log_likelihood,
                               penalized_loss, train)


def random_batch(rng, n, size):
    batch = []
    for _ in range(size):
        picks = rng.choice(n, size=10, replace=False)
        batch.append(MatchRecord(red=Roster(picks[:5]), blue=Roster(picks[5:]),
                                 outcome=int(rng.integers(0, 2))))
    return batch


def biased_logit_params(n=10, logit=0.2):
    """Zero interactions; bias arranged so red {0..4} vs blue {5..9} has the
    given logit."""
    bias = np.zeros(n)
    bias[0] = logit
    return ModelParams(embeddings=np.zeros((n, 2)), synergy=np.zeros((2, 2)),
                       opposition=np.zeros((2, 2)), bias=bias,
                       registry=make_registry(n))


def five_v_five(outcome=1):
    return MatchRecord(red=Roster([0, 1, 2, 3, 4]), blue=Roster([5, 6, 7, 8, 9]),
                       outcome=outcome)


class TestNegativeLogLikelihood:
    def test_zero_params_single_match_is_ln2(self):
        ds = Dataset(make_registry(10), [five_v_five()])
        params = zero_params(10, 2)
        assert negative_log_likelihood(params, ds) == pytest.approx(math.log(2), abs=1e-12)

    def test_duplicating_matches_leaves_mean_unchanged(self):
        rng = np.random.default_rng(0)
        params = random_params(10, 3, seed=1)
        batch = random_batch(rng, 10, 6)
        ds = Dataset(make_registry(10), batch)
        doubled = Dataset(make_registry(10), batch + batch)
        assert negative_log_likelihood(params, ds) == pytest.approx(
            negative_log_likelihood(params, doubled), abs=1e-12)

    def test_known_logit_outcome_one(self):
        ds = Dataset(make_registry(10), [five_v_five(outcome=1)])
        params = biased_logit_params(logit=0.2)
        assert negative_log_likelihood(params, ds) == pytest.approx(0.598139, abs=1e-6)

    def test_penalized_loss_reported_separately(self):
        ds = Dataset(make_registry(10), [five_v_five()])
        params = random_params(10, 3, seed=2)
        bare = negative_log_likelihood(params, ds)
        pen = penalized_loss(params, ds, l2_lambda=0.1)
        assert pen == pytest.approx(bare + l2_penalty(params, 0.1), abs=1e-12)
        assert l2_penalty(params, 0.0) == 0.0

    def test_loss_non_negative(self):
        rng = np.random.default_rng(3)
        params = random_params(10, 3, seed=4)
        ds = Dataset(make_registry(10), random_batch(rng, 10, 20))
        assert negative_log_likelihood(params, ds) >= 0.0


class TestGradients:
    def test_zero_params_bias_gradient(self):
        params = zero_params(10, 2)
        g = gradients(params, [five_v_five(outcome=1)])
        # (p - o) = -0.5 lands on red biases, +0.5 on blue
        assert np.allclose(g.d_bias[:5], -0.5)
        assert np.allclose(g.d_bias[5:], 0.5)
        assert np.all(g.d_embeddings == 0.0)
        assert np.all(g.d_synergy == 0.0)
        assert np.all(g.d_opposition == 0.0)

    def test_saturated_match_contributes_only_l2(self):
        # logit 40 makes p exactly 1.0 in doubles, so (p - o) vanishes
        params = biased_logit_params(logit=40.0)
        g0 = gradients(params, [five_v_five(outcome=1)], l2_lambda=0.0)
        for _, block in g0.blocks():
            assert np.all(block == 0.0)
        g = gradients(params, [five_v_five(outcome=1)], l2_lambda=0.25)
        assert np.allclose(g.d_bias, 0.25 * params.bias)
        assert np.allclose(g.d_embeddings, 0.25 * params.embeddings)

    def test_empty_batch_rejected(self):
        with pytest.raises(ContractError):
            gradients(random_params(10, 2, seed=5), [])

    def test_finite_difference_oracle(self):
        rng = np.random.default_rng(6)
        params = random_params(10, 4, seed=7)
        batch = random_batch(rng, 10, 8)
        report = finite_difference_check(params, batch, step=1e-5)
        assert report.max_relative_error < 1e-5

    def test_finite_difference_with_l2(self):
        rng = np.random.default_rng(8)
        params = random_params(10, 4, seed=9)
        batch = random_batch(rng, 10, 8)
        report = finite_difference_check(params, batch, step=1e-5, l2_lambda=0.3)
        assert report.max_relative_error < 1e-5

    def test_zero_gradient_block_has_tiny_absolute_error(self):
        params = zero_params(10, 3)
        report = finite_difference_check(params, [five_v_five()], step=1e-5)
        for block in ("embeddings", "synergy", "opposition"):
            assert report.block_absolute_error[block] < 1e-9

    def test_checker_catches_corrupted_gradient(self):
        rng = np.random.default_rng(10)
        params = random_params(10, 4, seed=11)
        batch = random_batch(rng, 10, 8)
        g = gradients(params, batch)
        bad = g.d_synergy.copy()
        bad[0, 0] += 1.0
        corrupted = GradientSet(d_embeddings=g.d_embeddings, d_synergy=bad,
                                d_opposition=g.d_opposition, d_bias=g.d_bias)
        report = finite_difference_check(params, batch, step=1e-5, analytic=corrupted)
        assert report.max_relative_error > 0.1


class TestAdaGrad:
    def fresh(self, value=1.0):
        params = ModelParams(embeddings=np.full((2, 1), value),
                             synergy=np.full((1, 1), value),
                             opposition=np.full((1, 1), value),
                             bias=np.full(2, value), registry=make_registry(2))
        return params, AdaGradState.zeros_like(params)

    def grad_of(self, params, g):
        return GradientSet(d_embeddings=np.full_like(params.embeddings, g),
                           d_synergy=np.full_like(params.synergy, g),
                           d_opposition=np.full_like(params.opposition, g),
                           d_bias=np.full_like(params.bias, g))

    def test_first_step_magnitude_is_learning_rate(self):
        params, state = self.fresh()
        cfg = TrainConfig(latent_dim=1, learning_rate=0.1, adagrad_epsilon=1e-8)
        new, _ = adagrad_step(params, state, self.grad_of(params, 0.5), cfg)
        assert new.bias[0] == pytest.approx(1.0 - 0.1, abs=1e-7)

    def test_zero_gradient_leaves_params_unchanged(self):
        params, state = self.fresh()
        cfg = TrainConfig(latent_dim=1, learning_rate=0.1)
        new, new_state = adagrad_step(params, state, self.grad_of(params, 0.0), cfg)
        assert np.array_equal(new.bias, params.bias)
        assert np.array_equal(new.embeddings, params.embeddings)
        assert np.array_equal(new_state.bias, state.bias)

    def test_second_identical_gradient_steps_lr_over_sqrt2(self):
        params, state = self.fresh()
        cfg = TrainConfig(latent_dim=1, learning_rate=0.1)
        g = self.grad_of(params, 0.5)
        p1, s1 = adagrad_step(params, state, g, cfg)
        p2, _ = adagrad_step(p1, s1, g, cfg)
        second_step = p1.bias[0] - p2.bias[0]
        assert second_step == pytest.approx(0.1 / math.sqrt(2), abs=1e-7)

    def test_accumulators_never_decrease(self):
        rng = np.random.default_rng(12)
        params = random_params(10, 3, seed=13)
        state = AdaGradState.zeros_like(params)
        cfg = TrainConfig(latent_dim=3, learning_rate=0.05)
        prev = state
        for step in range(5):
            batch = random_batch(rng, 10, 4)
            g = gradients(params, batch)
            params, state = adagrad_step(params, prev, g, cfg)
            assert np.all(state.embeddings >= prev.embeddings)
            assert np.all(state.bias >= prev.bias)
            prev = state

    def test_shape_mismatch_rejected(self):
        params, state = self.fresh()
        cfg = TrainConfig(latent_dim=1)
        bad = GradientSet(d_embeddings=np.zeros((3, 1)), d_synergy=np.zeros((1, 1)),
                          d_opposition=np.zeros((1, 1)), d_bias=np.zeros(2))
        with pytest.raises(ContractError):
            adagrad_step(params, state, bad, cfg)


class TestInitParams:
    def test_same_seed_is_bit_identical(self):
        reg = make_registry(20)
        cfg = TrainConfig(latent_dim=5, seed=99)
        a = init_params(reg, cfg)
        b = init_params(reg, cfg)
        assert np.array_equal(a.embeddings, b.embeddings)
        assert np.array_equal(a.synergy, b.synergy)
        assert np.array_equal(a.opposition, b.opposition)

    def test_zero_init_scale_gives_zero_matrices(self):
        reg = make_registry(5)
        cfg = TrainConfig(latent_dim=3, init_scale=0.0, seed=1)
        p = init_params(reg, cfg)
        assert np.all(p.embeddings == 0.0)
        assert np.all(p.synergy == 0.0)
        assert np.all(p.opposition == 0.0)
        assert np.all(p.bias == 0.0)

    def test_bias_starts_at_zero(self):
        p = init_params(make_registry(8), TrainConfig(latent_dim=4, seed=2))
        assert np.all(p.bias == 0.0)

    def test_default_scale_keeps_initial_logits_small(self):
        rng = np.random.default_rng(14)
        for k in (2, 8, 32):
            reg = make_registry(200)
            p = init_params(reg, TrainConfig(latent_dim=k, seed=15))
            assert TrainConfig(latent_dim=k).init_scale is None
            assert default_init_scale(k) == pytest.approx(0.1 / math.sqrt(k))
            for _ in range(50):
                picks = rng.choice(200, size=10, replace=False)
                logit = match_logit(p, Roster(picks[:5]), Roster(picks[5:]))
                assert abs(logit) < 3.0

    def test_single_avatar_registry_rejected(self):
        with pytest.raises(ContractError):
            init_params(make_registry(1), TrainConfig(latent_dim=2))


class TestTrainConfigValidation:
    @pytest.mark.parametrize("kwargs", [
        dict(latent_dim=0), dict(learning_rate=0.0), dict(learning_rate=-1.0),
        dict(batch_size=0), dict(epochs=0), dict(l2_lambda=-0.1),
        dict(adagrad_epsilon=0.0), dict(seed=-1),
    ])
    def test_invalid_configs_rejected(self, kwargs):
        with pytest.raises(ContractError):
            TrainConfig(**kwargs)


class TestTrain:
    def small_dataset(self, n_matches=400, seed=20):
        spec = SyntheticSpec(n_avatars=16, latent_dim=3, embedding_scale=0.55,
                             matrix_scale=0.35, bias_scale=0.12,
                             n_matches=n_matches, seed=seed)
        return generate_synthetic(spec)[0]

    def test_deterministic_end_to_end(self):
        ds = self.small_dataset()
        cfg = TrainConfig(latent_dim=3, learning_rate=0.1, epochs=4,
                          batch_size=64, seed=5)
        a = train(cfg, ds)
        b = train(cfg, ds)
        assert a.loss_history == b.loss_history
        assert np.array_equal(a.params.embeddings, b.params.embeddings)
        assert np.array_equal(a.params.bias, b.params.bias)

    def test_full_batch_small_step_descends(self):
        ds = self.small_dataset(n_matches=500, seed=42)
        cfg = TrainConfig(latent_dim=4, learning_rate=0.01, epochs=100,
                          batch_size=500, seed=3)
        res = train(cfg, ds)
        hist = np.array(res.loss_history)
        assert np.all(np.diff(hist) <= 1e-9)

    def test_coin_flip_outcomes_give_chance_auc(self):
        spec = SyntheticSpec(n_avatars=16, latent_dim=3, embedding_scale=0.0,
                             matrix_scale=0.0, bias_scale=0.0,
                             n_matches=6000, seed=30)
        ds, _ = generate_synthetic(spec)
        train_ds = ds.subset(range(3000))
        val_ds = ds.subset(range(3000, 6000))
        cfg = TrainConfig(latent_dim=3, learning_rate=0.05, epochs=3,
                          batch_size=256, seed=6)
        res = train(cfg, train_ds, validation=val_ds)
        assert 0.45 <= res.val_auc_history[-1] <= 0.55

    def test_best_validation_epoch_is_returned(self):
        ds = self.small_dataset(n_matches=600, seed=21)
        train_ds = ds.subset(range(400))
        val_ds = ds.subset(range(400, 600))
        cfg = TrainConfig(latent_dim=3, learning_rate=0.2, epochs=6,
                          batch_size=64, seed=7)
        res = train(cfg, train_ds, validation=val_ds)
        assert res.val_auc_history[res.best_epoch] == max(res.val_auc_history)
        from draftlab.evaluation import auc
        from draftlab.model import win_probabilities_batch
        got = auc(win_probabilities_batch(res.params, val_ds.red_idx, val_ds.blue_idx),
                  val_ds.outcomes)
        assert got == pytest.approx(max(res.val_auc_history), abs=1e-12)

    def test_penalized_history_only_with_l2(self):
        ds = self.small_dataset(n_matches=200, seed=22)
        plain = train(TrainConfig(latent_dim=2, epochs=2, batch_size=64, seed=8), ds)
        assert plain.penalized_history is None
        reg = train(TrainConfig(latent_dim=2, epochs=2, batch_size=64, seed=8,
                                l2_lambda=0.01), ds)
        assert reg.penalized_history is not None
        assert all(p >= u for p, u in zip(reg.penalized_history, reg.loss_history))

    def test_divergent_run_aborts_with_diagnostic(self):
        ds = self.small_dataset(n_matches=100, seed=23)
        cfg = TrainConfig(latent_dim=2, learning_rate=1e150, epochs=2,
                          batch_size=100, seed=9)
        with pytest.raises(NumericalError):
            train(cfg, ds)

    def test_gauge_rescaling_leaves_logits_unchanged(self):
        params = random_params(12, 3, seed=24)
        c = 2.5
        rescaled = ModelParams(embeddings=c * params.embeddings,
                               synergy=params.synergy / c ** 2,
                               opposition=params.opposition / c ** 2,
                               bias=params.bias, registry=params.registry)
        rng = np.random.default_rng(25)
        for _ in range(20):
            picks = rng.choice(12, size=10, replace=False)
            red, blue = Roster(picks[:5]), Roster(picks[5:])
            assert match_logit(params, red, blue) == pytest.approx(
                match_logit(rescaled, red, blue), abs=1e-10)
