import numpy as np
import pytest

from socialgf.errors import ConfigurationError, UsageError
from socialgf.examples import ExampleCategory, ExampleSet
from socialgf.numerics import MLPSpec, ParamStore, finite_diff_gradient
from socialgf.scorefield import (
    GFTrainConfig, GradientField, NoiseSchedule, analytic_gaussian_score,
    dsm_loss, eval_field, field_score, init_score_network, langevin_descend,
    load_field, perturb, save_field, train_gf,
)
from socialgf.scorefield.network import (
    ScoreNetwork, kind_onehots, network_params, score_backward, score_forward,
    time_features,
)


class _ZeroDraws:
    """Stub rng whose normal draws are all zero."""

    def standard_normal(self, shape):
        return np.zeros(shape)


class TestSchedule:
    def test_sigma_is_geometric(self):
        s = NoiseSchedule(sigma0=25.0)
        assert s.sigma(0.0) == 1.0
        assert s.sigma(1.0) == 25.0
        assert s.sigma(0.5) == pytest.approx(5.0)

    def test_weight_is_sigma_squared(self):
        s = NoiseSchedule()
        t = np.array([0.1, 0.7])
        np.testing.assert_allclose(s.weight(t), s.sigma(t) ** 2)

    def test_invalid_schedules_rejected(self):
        with pytest.raises(ConfigurationError):
            NoiseSchedule(sigma0=0.9)
        with pytest.raises(ConfigurationError):
            NoiseSchedule(t_min=0.5, t_max=0.1)


class TestPerturb:
    def test_zero_draw_returns_clean_record(self):
        sched = NoiseSchedule()
        x = np.array([1.0, -2.0, 0.5, 3.0])
        noisy, target = perturb(x, 0.3, _ZeroDraws(), sched)
        np.testing.assert_array_equal(noisy, x)
        np.testing.assert_array_equal(target, np.zeros_like(x))

    def test_target_formula_holds_exactly(self):
        sched = NoiseSchedule()
        rng = np.random.default_rng(0)
        x = rng.standard_normal((32, 6))
        t = rng.uniform(sched.t_min, sched.t_max, 32)
        noisy, target = perturb(x, t, rng, sched)
        sigma2 = sched.sigma(t)[:, None] ** 2
        np.testing.assert_allclose(target, (x - noisy) / sigma2, rtol=1e-12)

    def test_scalar_arithmetic_case(self):
        # x = 0 perturbed to x~ = 1 at noise sigma: target = -1/sigma^2
        sched = NoiseSchedule()
        t = 0.25
        sigma = float(sched.sigma(t))

        class _One:
            def standard_normal(self, shape):
                return np.full(shape, 1.0 / sigma)

        noisy, target = perturb(np.zeros(1), t, _One(), sched)
        assert noisy[0] == pytest.approx(1.0)
        assert target[0] == pytest.approx(-1.0 / sigma ** 2)

    def test_noise_variance_matches_sigma(self):
        sched = NoiseSchedule()
        rng = np.random.default_rng(1)
        t = 0.4
        x = np.zeros((100_000, 1))
        noisy, _ = perturb(x, t, rng, sched)
        var = float(np.var(noisy - x))
        assert abs(var - float(sched.sigma(t)) ** 2) / float(sched.sigma(t)) ** 2 < 0.03


def identity_denoiser_network():
    """Hand-built network whose denoiser output equals its input exactly,
    making the score identically zero. Exercises the full forward wiring."""
    kinds = ("grass",)
    feat = 2 + 1 + 3
    W = 64
    emb_w = np.zeros((feat, W))
    # route +x, +y, -x, -y through relu lanes
    emb_w[0, 0], emb_w[1, 1], emb_w[0, 2], emb_w[1, 3] = 1, 1, -1, -1
    embedder = ParamStore(MLPSpec((feat, W), "relu", out_activation="relu"),
                          {"w0": emb_w, "b0": np.zeros(W)})
    h1 = np.zeros((2 * W, W))
    h1[0, 0], h1[1, 1], h1[2, 2], h1[3, 3] = 1, 1, 1, 1
    h2 = np.eye(W)
    out = np.zeros((W, 2))
    out[0, 0], out[2, 0], out[1, 1], out[3, 1] = 1, -1, 1, -1
    head = ParamStore(MLPSpec((2 * W, W, W, 2), "relu"),
                      {"w0": h1, "b0": np.zeros(W), "w1": h2, "b1": np.zeros(W),
                       "w2": out, "b2": np.zeros(2)})
    return ScoreNetwork(kinds, embedder, head)


class TestScoreNetwork:
    def test_identity_denoiser_zeroes_the_score(self):
        net = identity_denoiser_network()
        sched = NoiseSchedule()
        rng = np.random.default_rng(2)
        rel = rng.standard_normal((5, 1, 2))
        tfeat = time_features(sched, np.full(5, 0.3))
        scores, _ = score_forward(net, rel, kind_onehots(net, ("grass",)), tfeat)
        np.testing.assert_allclose(scores, 0.0, atol=1e-12)

    def test_unknown_slot_kind_rejected(self):
        rng = np.random.default_rng(3)
        net = init_score_network(("grass",), rng)
        with pytest.raises(UsageError, match="vocabulary"):
            kind_onehots(net, ("wolf",))

    def test_dsm_gradients_match_finite_differences(self):
        rng = np.random.default_rng(4)
        net = init_score_network(("grass", "wolf"), rng)
        sched = NoiseSchedule()
        batch = rng.standard_normal((6, 8))  # 4 slots of 2
        kinds = ("grass", "grass", "wolf", "wolf")

        def loss_with(params_name, value):
            merged = network_params(net)
            old = merged[params_name].copy()
            merged[params_name][...] = value
            loss, _ = dsm_loss(net, batch, kinds, sched,
                               np.random.default_rng(11), fixed_t=0.35)
            merged[params_name][...] = old
            return loss

        _, grads = dsm_loss(net, batch, kinds, sched,
                            np.random.default_rng(11), fixed_t=0.35)
        for name in ("emb/w0", "head/w2", "head/b0"):
            fd = finite_diff_gradient(lambda v: loss_with(name, v),
                                      network_params(net)[name], 1e-5)
            scale = max(np.max(np.abs(fd)), 1e-8)
            assert np.max(np.abs(grads[name] - fd)) / scale < 1e-6


class TestDSMLoss:
    def test_perfect_score_gives_zero_loss(self):
        # residual form: loss = mean(weight * ||s - target||^2), so s == target
        # on every sample is exactly zero
        sched = NoiseSchedule()
        rng = np.random.default_rng(5)
        t = rng.uniform(sched.t_min, sched.t_max, 64)
        target = rng.standard_normal((64, 4))
        weights = sched.weight(t)
        loss = float(np.mean(weights * ((target - target) ** 2).sum(axis=1)))
        assert loss == 0.0

    def test_zero_score_expected_weighted_loss_is_dimension(self):
        # E[ weight * ||0 - (x - x~)/sigma^2||^2 ] = d for weight = sigma^2
        sched = NoiseSchedule()
        rng = np.random.default_rng(6)
        d = 6
        x = rng.standard_normal((200_000, d))
        t = rng.uniform(sched.t_min, sched.t_max, x.shape[0])
        _, target = perturb(x, t, rng, sched)
        weighted = sched.weight(t) * (target ** 2).sum(axis=1)
        assert abs(float(weighted.mean()) - d) / d < 0.02
        # and the unweighted expectation at fixed t is d / sigma(t)^2
        t0 = 0.5
        _, target0 = perturb(x, t0, rng, sched)
        expect = d / float(sched.sigma(t0)) ** 2
        assert abs(float((target0 ** 2).sum(axis=1).mean()) - expect) / expect < 0.02

    def test_loss_internally_consistent_with_score_forward(self):
        rng_seed = 7
        net = init_score_network(("grass",), np.random.default_rng(8))
        sched = NoiseSchedule()
        batch = np.random.default_rng(9).standard_normal((16, 2))
        loss, _ = dsm_loss(net, batch, ("grass",), sched,
                           np.random.default_rng(rng_seed), fixed_t=0.2)
        # replicate the exact draws
        rng = np.random.default_rng(rng_seed)
        noisy, target = perturb(batch, np.full(16, 0.2), rng, sched)
        tfeat = time_features(sched, np.full(16, 0.2))
        scores, _ = score_forward(net, noisy.reshape(16, 1, 2),
                                  kind_onehots(net, ("grass",)), tfeat)
        resid = scores.reshape(16, 2) - target
        expected = float(np.mean(sched.weight(np.full(16, 0.2))
                                 * (resid ** 2).sum(axis=1)))
        assert loss == pytest.approx(expected, rel=1e-12)

    def test_empty_batch_rejected(self):
        net = init_score_network(("grass",), np.random.default_rng(10))
        with pytest.raises(ConfigurationError):
            dsm_loss(net, np.zeros((0, 2)), ("grass",), NoiseSchedule(),
                     np.random.default_rng(0))


class TestTrainedFields:
    def test_point_mass_recovers_fixed_sigma_target(self, pointmass_field):
        field, x0 = pointmass_field
        sched = field.schedule
        t = 0.2
        sigma = float(sched.sigma(t))
        rng = np.random.default_rng(12)
        probes = x0 + sigma * rng.standard_normal((64, 2))
        pred = field_score(field, probes[:, None, :], ("grass",), t=t)
        pred = pred.reshape(-1, 2)
        ref = (x0 - probes) / sigma ** 2
        rel = np.linalg.norm(pred - ref) / np.linalg.norm(ref)
        assert rel < 0.10

    def test_gaussian_field_matches_analytic_score(self, gaussian_field):
        field, mean, std, _ = gaussian_field
        axis = np.linspace(-2 * std, 2 * std, 9)
        xs, ys = np.meshgrid(axis + mean[0], axis + mean[1])
        pts = np.stack([xs.ravel(), ys.ravel()], axis=1)
        pred = field_score(field, pts[:, None, :], ("grass",)).reshape(-1, 2)
        ref = analytic_gaussian_score(mean, std ** 2, field.schedule,
                                      field.t_eval, pts)
        assert np.linalg.norm(pred - ref) / np.linalg.norm(ref) < 0.15

    def test_training_loss_halves_from_initialization(self, gaussian_field):
        _, _, _, curve = gaussian_field
        assert curve[-1][1] < 0.5 * curve[0][1]

    def test_eval_field_is_negative_slot_sum(self, gaussian_field):
        field, _, _, _ = gaussian_field
        rel = np.array([[[1.0, 2.0]]])
        scores = field_score(field, rel, ("grass",))
        grad = eval_field(field, rel, ("grass",))
        np.testing.assert_allclose(grad, -scores.sum(axis=1))

    def test_permutation_invariance_under_same_kind_shuffle(self):
        rng = np.random.default_rng(13)
        net = init_score_network(("grass",), rng)
        field = GradientField(net, NoiseSchedule(), 0.01, "t", "attractive", "any")
        rel = rng.standard_normal((5, 2))
        kinds = ("grass",) * 5
        base = eval_field(field, rel, kinds)
        for _ in range(10):
            perm = rng.permutation(5)
            out = eval_field(field, rel[perm], kinds)
            assert np.max(np.abs(out - base)) < 1e-9

    def test_symmetric_two_point_set_balances_at_origin(self):
        cat = ExampleCategory("sym", "attractive", "any", ("grass",))
        a = 4.0
        records = np.array([[-a, 0.0], [a, 0.0]] * 500)
        es = ExampleSet(cat, ("grass",), records, {})
        field, _ = train_gf(es, GFTrainConfig(steps=3000), seed=14)
        g_origin = eval_field(field, np.array([[0.0, 0.0]]), ("grass",))
        g_side = eval_field(field, np.array([[a / 2, 0.0]]), ("grass",))
        assert abs(g_origin[0]) < 0.3 * abs(g_side[0])

    def test_translation_consistency_is_exact(self, gaussian_field):
        field, _, _, _ = gaussian_field
        # agent-centric records ignore absolute placement by construction
        entity = np.array([3.0, 1.0])
        agent = np.array([1.0, -1.0])
        shift = np.array([17.5, -42.0])
        rel_a = (entity - agent)[None, :]
        rel_b = ((entity + shift) - (agent + shift))[None, :]
        np.testing.assert_array_equal(
            eval_field(field, rel_a, ("grass",)),
            eval_field(field, rel_b, ("grass",)))

    def test_empty_set_rejected(self):
        cat = ExampleCategory("none", "attractive", "any", ("grass",))
        es = ExampleSet(cat, ("grass",), np.zeros((0, 2)), {})
        with pytest.raises(ConfigurationError):
            train_gf(es, GFTrainConfig(steps=10), seed=0)

    def test_field_checkpoint_roundtrip(self, gaussian_field, tmp_path):
        field, mean, std, _ = gaussian_field
        p = tmp_path / "f.sgff"
        save_field(p, field)
        loaded, meta = load_field(p)
        assert meta["category"] == field.category
        probe = np.array([[0.5, -0.5]])
        np.testing.assert_array_equal(eval_field(loaded, probe, ("grass",)),
                                      eval_field(field, probe, ("grass",)))


class TestAnalyticScore:
    def test_zero_at_the_mean(self):
        s = analytic_gaussian_score(np.array([1.0, 2.0]), 1.0, NoiseSchedule(),
                                    0.3, np.array([1.0, 2.0]))
        np.testing.assert_array_equal(s, np.zeros(2))

    def test_formula_arithmetic(self):
        sched = NoiseSchedule()
        t = 0.5
        sigma2 = float(sched.sigma(t)) ** 2
        x = np.array([2.0, 0.0])
        s = analytic_gaussian_score(np.zeros(2), 1.0, sched, t, x)
        np.testing.assert_allclose(s, -x / (1.0 + sigma2))

    def test_matches_log_density_finite_difference(self):
        sched = NoiseSchedule()
        mean = np.array([0.5, -1.0])
        s2 = 2.0
        t = 0.4
        var = s2 + float(sched.sigma(t)) ** 2

        def logpdf(x):
            return float(-0.5 * np.sum((x - mean) ** 2) / var
                         - np.log(2 * np.pi * var))

        x = np.array([1.3, 0.7])
        fd = finite_diff_gradient(logpdf, x, 1e-5)
        np.testing.assert_allclose(
            analytic_gaussian_score(mean, s2, sched, t, x), fd, atol=1e-6)


class TestLangevin:
    def test_zero_field_is_a_pure_random_walk(self):
        net = identity_denoiser_network()
        field = GradientField(net, NoiseSchedule(), 0.01, "zero", "attractive",
                              "any")
        rng = np.random.default_rng(15)
        traj = langevin_descend(field, np.zeros(2), ("grass",), steps=400,
                                step_size=0.01, rng=rng)
        increments = np.diff(traj, axis=0)
        # drift-free: mean increment is statistically zero
        se = increments.std() / np.sqrt(increments.shape[0])
        assert np.all(np.abs(increments.mean(axis=0)) < 4 * se)
        np.testing.assert_allclose(increments.std(),
                                   np.sqrt(2 * 0.01), rtol=0.15)

    def test_gaussian_field_iterates_approach_the_mean(self, gaussian_field):
        field, mean, std, _ = gaussian_field
        rng = np.random.default_rng(16)
        start = mean + np.array([2 * std, 0.0])
        traj = langevin_descend(field, start, ("grass",), steps=100,
                                step_size=0.5, rng=rng)
        d = np.linalg.norm(traj - mean, axis=1)
        assert d[-20:].mean() < d[0]

    def test_point_mass_iterates_concentrate(self, pointmass_field):
        field, x0 = pointmass_field
        rng = np.random.default_rng(17)
        traj = langevin_descend(field, x0 + 3.0, ("grass",), steps=200,
                                step_size=0.3, rng=rng)
        d = np.linalg.norm(traj - x0, axis=1)
        assert d[-50:].mean() < d[0]

    def test_bad_start_width_rejected(self, pointmass_field):
        field, _ = pointmass_field
        with pytest.raises(UsageError):
            langevin_descend(field, np.zeros(3), ("grass",), 5, 0.1,
                             np.random.default_rng(0))
