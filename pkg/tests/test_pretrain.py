"""Feasibility-policy pretraining: the latent map, the evaluation metrics,
and the training loop's bookkeeping guarantees."""

import csv

import numpy as np
import pytest

from actmap.autodiff import load_checkpoint
from actmap.envs import make_env
from actmap.envs.toy import DiskPair
from actmap.feasibility.models import FeasibilityModel, make_model
from actmap.pretrain import (
    FeasEvalReport,
    FeasTrainConfig,
    evaluate,
    evaluate_actions,
    mean_pairwise_distance,
    pretrain,
    toy_mode_occupancy,
)
from actmap.pretrain.policy import build_policy_params, map_latent, map_latent_batch


def tiny_config(**overrides):
    base = dict(
        n_samples=64, states_per_batch=2, learning_rate=1e-3, steps=20,
        eval_interval=10, eval_states=2, eval_samples=32, hidden=(16,),
    )
    base.update(overrides)
    return FeasTrainConfig(**base)


class TestLatentMap:
    def test_actions_stay_in_box(self):
        rng = np.random.default_rng(0)
        params = build_policy_params(6, 2, (16, 16), rng)
        feats = rng.normal(size=6)
        z = rng.uniform(-3.0, 3.0, size=(200, 2))  # out-of-box latents get clipped
        actions = map_latent_batch(params, feats, z)
        assert actions.shape == (200, 2)
        assert np.all(np.abs(actions) <= 1.0)

    def test_single_matches_batch(self):
        rng = np.random.default_rng(1)
        params = build_policy_params(4, 3, (8,), rng)
        feats = rng.normal(size=4)
        z = rng.uniform(-1, 1, size=(5, 3))
        batch = map_latent_batch(params, feats, z)
        for i in range(5):
            # single-row and batched matmuls may take different BLAS paths
            np.testing.assert_allclose(map_latent(params, feats, z[i]), batch[i], atol=1e-14)

    def test_deterministic(self):
        rng = np.random.default_rng(2)
        params = build_policy_params(4, 2, (8,), rng)
        feats = np.ones(4)
        z = np.array([0.2, -0.7])
        assert np.array_equal(map_latent(params, feats, z), map_latent(params, feats, z))


class TestEvalMetrics:
    def test_pairwise_distance_hand_value(self):
        pts = np.array([[0.0, 0.0], [3.0, 4.0], [0.0, 0.0]])
        # pairs: 5, 0, 5 -> mean 10/3
        assert mean_pairwise_distance(pts) == pytest.approx(10.0 / 3.0, abs=1e-12)

    def test_pairwise_distance_undefined_below_two(self):
        assert mean_pairwise_distance(np.zeros((1, 2))) is None
        assert mean_pairwise_distance(np.zeros((0, 2))) is None

    def test_report_rejects_bad_precision(self):
        with pytest.raises(ValueError):
            FeasEvalReport(1.5, None, np.array([1.5]), [None])

    def test_collapsed_generator_scores_zero_coverage(self):
        # every action identical and feasible: precision 1, coverage 0
        partial = np.array([0.0, 0.0, 0.6, 0.6, 0.3, 0.25])
        model = make_model("toy")
        actions = np.zeros((50, 2))  # all at disk-0 center
        report = evaluate_actions([partial], [actions], model)
        assert report.precision == 1.0
        assert report.coverage == 0.0

    def test_uniform_actions_hit_area_fraction(self):
        partial = np.array([-0.4, -0.4, 0.45, 0.45, 0.3, 0.35])
        model = make_model("toy")
        rng = np.random.default_rng(3)
        actions = rng.uniform(-1.0, 1.0, size=(100_000, 2))
        report = evaluate_actions([partial], [actions], model)
        want = np.pi * (0.3**2 + 0.35**2) / 4.0  # disk area over box area
        assert report.precision == pytest.approx(want, rel=0.02)

    def test_mode_occupancy_counts_feasible_per_disk(self):
        partial = np.array([-0.5, 0.0, 0.5, 0.0, 0.2, 0.2])
        actions = np.array([
            [-0.5, 0.0], [-0.45, 0.05],  # disk 0
            [0.5, 0.0],                  # disk 1
            [0.0, 0.9],                  # outside
        ])
        report = evaluate_actions([partial], [actions], make_model("toy"),
                                  mode_fn=toy_mode_occupancy)
        assert report.mode_occupancy[0].tolist() == [2, 1]

    def test_evaluate_needs_two_samples(self):
        env = make_env("toy")
        params = build_policy_params(6, 2, (8,), np.random.default_rng(0))
        with pytest.raises(ValueError):
            evaluate(params, env, [np.zeros(6)], 1, make_model("toy"),
                     np.random.default_rng(1))

    def test_evaluate_uses_given_latent_count(self):
        env = make_env("toy")
        env.reset(0)
        params = build_policy_params(6, 2, (8,), np.random.default_rng(0))
        partials = [env.generate_partial_state(np.random.default_rng(4))]
        report = evaluate(params, env, partials, 128, make_model("toy"),
                          np.random.default_rng(5))
        assert 0.0 <= report.precision <= 1.0
        assert len(report.per_state_precision) == 1


class RejectEverything(FeasibilityModel):
    def violation_batch(self, partial, actions):
        return np.ones(len(np.atleast_2d(actions)))


class TestPretrainLoop:
    def test_zero_learning_rate_leaves_params_unchanged(self):
        env = make_env("toy")
        model = make_model("toy")
        rng = np.random.default_rng(6)
        params = build_policy_params(6, 2, (16,), rng)
        before = params.values.copy()
        pretrain(tiny_config(learning_rate=0.0, steps=5), env, model, rng, params=params)
        assert np.array_equal(params.values, before)

    def test_degenerate_states_apply_no_update(self):
        env = make_env("toy")
        rng = np.random.default_rng(7)
        params = build_policy_params(6, 2, (16,), rng)
        before = params.values.copy()
        pretrain(tiny_config(steps=3), env, RejectEverything(), rng, params=params)
        assert np.array_equal(params.values, before)

    def test_training_is_bitwise_reproducible(self):
        def run():
            env = make_env("toy")
            out = pretrain(tiny_config(), env, make_model("toy"),
                           np.random.default_rng(8))
            return out.values

        assert np.array_equal(run(), run())

    def test_eval_cadence_does_not_disturb_training(self):
        # identical training streams with different eval intervals
        def run(interval):
            env = make_env("toy")
            out = pretrain(tiny_config(eval_interval=interval), env, make_model("toy"),
                           np.random.default_rng(9))
            return out.values

        assert np.array_equal(run(5), run(20))

    def test_short_training_raises_precision(self):
        env = make_env("toy")
        model = make_model("toy")
        rng = np.random.default_rng(10)
        config = tiny_config(n_samples=256, states_per_batch=2, steps=500,
                             eval_interval=500, eval_states=4, eval_samples=256,
                             hidden=(32, 32))
        history = []
        params = pretrain(config, env, model, rng, history=history)
        eval_rng = np.random.default_rng(11)
        partials = [env.generate_partial_state(eval_rng) for _ in range(4)]
        fresh = build_policy_params(6, 2, config.hidden, np.random.default_rng(10))
        before = evaluate(fresh, env, partials, 256, model, np.random.default_rng(12))
        after = evaluate(params, env, partials, 256, model, np.random.default_rng(12))
        assert after.precision > before.precision
        assert after.precision > 0.5
        assert history[-1].step == 500

    def test_history_and_csv_agree(self, tmp_path):
        env = make_env("toy")
        log_path = tmp_path / "pretrain.csv"
        history = []
        pretrain(tiny_config(steps=20, eval_interval=10), env, make_model("toy"),
                 np.random.default_rng(13), log_path=str(log_path), history=history)
        with open(log_path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["step", "precision", "coverage", "dropped"]
        assert len(rows) == 1 + len(history) == 3
        for row, rec in zip(rows[1:], history):
            assert int(row[0]) == rec.step
            assert float(row[1]) == rec.precision  # repr round-trips exactly
            assert int(row[3]) == rec.dropped

    def test_checkpoints_written_and_loadable(self, tmp_path):
        env = make_env("toy")
        params = pretrain(tiny_config(steps=10, eval_interval=5), env, make_model("toy"),
                          np.random.default_rng(14), checkpoint_dir=str(tmp_path))
        names = sorted(p.name for p in tmp_path.iterdir())
        assert names == ["feas_0000005.ckpt", "feas_final.ckpt"]
        loaded = load_checkpoint(str(tmp_path / "feas_final.ckpt"))
        assert np.array_equal(loaded["feasibility"].values, params.values)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            FeasTrainConfig(n_samples=0)
        with pytest.raises(ValueError):
            FeasTrainConfig(sigma=-0.1)
        with pytest.raises(ValueError):
            FeasTrainConfig(eval_interval=0)
        assert FeasTrainConfig(sigma=0.1, sigma_prime_factor=2.0).sigma_prime == pytest.approx(0.2)
