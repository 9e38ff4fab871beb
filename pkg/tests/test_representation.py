import numpy as np
import pytest

from socialgf.errors import AdaptationError, ConfigurationError
from socialgf.representation import (
    GFRepresentation, GFSlot, ShapingConfig, ZeroField, compose_observation,
    compose_observations_batch, load_manifest, representation_from_fields,
    save_manifest, shaped_reward, shaping_penalty, shaping_penalty_from_obs,
    swap_slots,
)
from socialgf.scorefield import analytic_gaussian_score, eval_field, save_field
from socialgf.world import ScenarioConfig, reset


def zero_rep(role, n_slots, polarities=None, velocity=True):
    polarities = polarities or ["attractive"] * n_slots
    slots = tuple(GFSlot(i, ZeroField(p), p) for i, p in enumerate(polarities))
    return GFRepresentation(role, slots, velocity)


class TestObservationLayout:
    def test_three_slots_plus_velocity_is_eight_wide(self):
        rep = zero_rep("sheep", 3, ["attractive", "attractive", "repulsive"])
        assert rep.width == 8

    def test_single_slot_plus_velocity_is_four_wide(self):
        rep = zero_rep("agent", 1)
        assert rep.width == 4

    def test_zero_fields_pass_velocity_through(self):
        cfg = ScenarioConfig(scenario="vanilla_nav", n_agents=2)
        state = reset(cfg, seed=0)
        state.vel[0] = [0.3, -0.7]
        rep = zero_rep("agent", 2)
        obs = compose_observation(state, 0, rep)
        np.testing.assert_array_equal(obs, [0.3, -0.7, 0, 0, 0, 0])

    def test_width_is_population_independent(self, gaussian_field):
        field, _, _, _ = gaussian_field
        rep = representation_from_fields("sheep", [field])
        for n in (2, 4):
            cfg = ScenarioConfig(scenario="grassland", n_wolves=n, n_sheep=n,
                                 n_grass=3)
            state = reset(cfg, seed=1)
            sheep = int(state.indices_of(0)[0])
            obs = compose_observation(state, sheep, rep)
            assert obs.size == rep.width == 4

    def test_batch_matches_single_composition(self, gaussian_field):
        field, _, _, _ = gaussian_field
        rep = representation_from_fields("sheep", [field])
        cfg = ScenarioConfig(scenario="grassland", n_wolves=2, n_sheep=2,
                             n_grass=3)
        states = [reset(cfg, seed=s) for s in (1, 2, 3)]
        sheep = [int(s.indices_of(0)[0]) for s in states]
        batch = compose_observations_batch(states, sheep, rep)
        for row, (st, i) in enumerate(zip(states, sheep)):
            np.testing.assert_allclose(batch[row], compose_observation(st, i, rep),
                                       atol=1e-12)

    def test_missing_selector_entities_raise_adaptation_error(self, gaussian_field):
        field, _, _, _ = gaussian_field  # selects grass
        rep = representation_from_fields("agent", [field])
        cfg = ScenarioConfig(scenario="vanilla_nav", n_agents=2)
        state = reset(cfg, seed=2)
        with pytest.raises(AdaptationError, match="slot 0"):
            compose_observation(state, 0, rep)


class _StubField:
    category = "stub"
    polarity = "attractive"


class TestShapedReward:
    def test_arithmetic_from_observation(self):
        # a gf+ of (3, 4) observed at lambda 0.01 costs exactly 0.05
        obs = np.array([0.0, 0.0, 3.0, 4.0])
        live = GFRepresentation(
            "agent", (GFSlot(0, _StubField(), "attractive"),), True)
        assert shaping_penalty_from_obs(obs, live) == pytest.approx(5.0)
        assert 0.0 - 0.01 * shaping_penalty_from_obs(obs, live) \
            == pytest.approx(-0.05)
        # zero-filled slots contribute nothing
        zeroed = zero_rep("agent", 1)
        assert shaping_penalty_from_obs(obs, zeroed) == 0.0

    def test_penalty_reads_attractive_slots_only(self, gaussian_field):
        field, mean, std, _ = gaussian_field
        cfg = ScenarioConfig(scenario="grassland", n_wolves=2, n_sheep=2,
                             n_grass=3)
        state = reset(cfg, seed=3)
        sheep = int(state.indices_of(0)[0])
        rep_attr = representation_from_fields("sheep", [field])
        pen = shaping_penalty(state, sheep, rep_attr)
        obs = compose_observation(state, sheep, rep_attr)
        assert pen == pytest.approx(float(np.linalg.norm(obs[2:4])))
        assert pen == pytest.approx(float(shaping_penalty_from_obs(obs, rep_attr)))
        # flip the slot to repulsive: the penalty ignores it
        rep_rep = GFRepresentation(
            "sheep", (GFSlot(0, field, "repulsive"),), True)
        assert shaping_penalty(state, sheep, rep_rep) == 0.0

    def test_lambda_zero_is_identity(self, gaussian_field):
        field, _, _, _ = gaussian_field
        cfg = ScenarioConfig(scenario="grassland", n_wolves=2, n_sheep=2,
                             n_grass=3)
        state = reset(cfg, seed=4)
        sheep = int(state.indices_of(0)[0])
        rep = representation_from_fields("sheep", [field])
        r = shaped_reward(1.25, state, sheep, rep, ShapingConfig(0.0, True))
        assert r == 1.25

    def test_disabled_shaping_is_identity(self, gaussian_field):
        field, _, _, _ = gaussian_field
        cfg = ScenarioConfig(scenario="grassland", n_wolves=2, n_sheep=2,
                             n_grass=3)
        state = reset(cfg, seed=5)
        sheep = int(state.indices_of(0)[0])
        rep = representation_from_fields("sheep", [field])
        assert shaped_reward(-3.5, state, sheep, rep,
                             ShapingConfig(0.01, False)) == -3.5

    def test_exact_arithmetic_with_analytic_field(self):
        # gf+ = (3, 4), lambda = 0.01: shaped = raw - 0.05
        pen = 0.01 * float(np.linalg.norm([3.0, 4.0]))
        assert 0.0 - pen == pytest.approx(-0.05)

    def test_monotone_in_attractive_magnitude(self):
        # holding raw fixed, growing |gf+| can only lower the shaped reward
        sched_pen = [0.01 * m for m in (0.0, 0.5, 1.0, 2.0)]
        rewards = [1.0 - p for p in sched_pen]
        assert all(a >= b for a, b in zip(rewards, rewards[1:]))

    def test_penalty_decreases_along_approach_to_gaussian_mean(self):
        from socialgf.scorefield import NoiseSchedule
        sched = NoiseSchedule()
        mean = np.zeros(2)
        start = np.array([6.0, 3.0])
        line = [start * (1 - a) for a in np.linspace(0, 0.95, 12)]
        mags = [np.linalg.norm(analytic_gaussian_score(mean, 2.0, sched, 0.01, x))
                for x in line]
        assert all(a > b for a, b in zip(mags, mags[1:]))

    def test_shaping_requires_an_attractive_slot(self, gaussian_field):
        field, _, _, _ = gaussian_field
        rep = GFRepresentation("sheep", (GFSlot(0, field, "repulsive"),), True)
        cfg = ScenarioConfig(scenario="grassland", n_wolves=2, n_sheep=2,
                             n_grass=3)
        state = reset(cfg, seed=6)
        with pytest.raises(ConfigurationError):
            shaped_reward(0.0, state, int(state.indices_of(0)[0]), rep,
                          ShapingConfig(0.01, True))


class TestSwap:
    def test_identity_mapping_preserves_observations(self, gaussian_field):
        field, _, _, _ = gaussian_field
        rep = representation_from_fields("sheep", [field])
        swapped = swap_slots(rep, {0: "keep"})
        cfg = ScenarioConfig(scenario="grassland", n_wolves=2, n_sheep=2,
                             n_grass=3)
        state = reset(cfg, seed=7)
        sheep = int(state.indices_of(0)[0])
        np.testing.assert_array_equal(compose_observation(state, sheep, rep),
                                      compose_observation(state, sheep, swapped))

    def test_zero_fill_directive(self, gaussian_field):
        field, _, _, _ = gaussian_field
        rep = representation_from_fields("sheep", [field, field])
        swapped = swap_slots(rep, {0: "keep", 1: "zero"})
        assert not swapped.slots[0].is_zero
        assert swapped.slots[1].is_zero
        assert swapped.width == rep.width

    def test_unmapped_slot_rejected(self, gaussian_field):
        field, _, _, _ = gaussian_field
        rep = representation_from_fields("sheep", [field, field])
        with pytest.raises(ConfigurationError, match="slot 1"):
            swap_slots(rep, {0: "keep"})

    def test_new_field_takes_its_own_polarity(self, gaussian_field, pointmass_field):
        field, _, _, _ = gaussian_field
        pf, _ = pointmass_field
        rep = representation_from_fields("sheep", [field])
        swapped = swap_slots(rep, {0: pf})
        assert swapped.slots[0].field is pf


class TestManifest:
    def test_roundtrip(self, gaussian_field, tmp_path):
        field, _, _, _ = gaussian_field
        fpath = tmp_path / "f.sgff"
        save_field(fpath, field)
        rep = representation_from_fields("sheep", [field])
        shaping = ShapingConfig(0.02, True)
        mpath = tmp_path / "manifest.json"
        save_manifest(mpath, rep, shaping, {0: fpath})
        rep2, shaping2 = load_manifest(mpath)
        assert shaping2 == shaping
        assert rep2.role == "sheep"
        assert rep2.width == rep.width
        probe = np.array([[1.0, 1.0]])
        np.testing.assert_array_equal(
            eval_field(rep2.slots[0].field, probe, ("grass",)),
            eval_field(field, probe, ("grass",)))
