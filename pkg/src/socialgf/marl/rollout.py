"""Vectorized rollout collection over a pool of independent worlds.

The pool steps every world one tick at a time, auto-resetting at the
episode length with a fresh seed from the world's own stream. Streams are
(env, agent) pairs in env-major order, which keeps merging deterministic.
Episode ends are treated as terminal for advantage estimation (no bootstrap
across the time limit), following the common particle-world convention.
"""

from dataclasses import dataclass

import numpy as np

from socialgf.errors import ConfigurationError
from socialgf.marl.buffer import allocate_buffer
from socialgf.marl.policy import sample_action
from socialgf.representation import compose_observations_batch, shaping_penalty_from_obs
from socialgf.world import (
    GREEN, RED, SHEEP, SUCCESS, WOLF, observe_baseline, reset,
    reward_engineering, reward_original, step,
)
from socialgf.world.observe import baseline_width

# method variants
ORIGINAL_REWARD = "original_reward"
REWARD_ENGINEERING = "reward_engineering"
SOCIALGFS = "socialgfs"
SOCIALGFS_PLUS = "socialgfs_plus"
SOCIALGFS_STAR = "socialgfs_star"
VARIANTS = (ORIGINAL_REWARD, REWARD_ENGINEERING, SOCIALGFS, SOCIALGFS_PLUS,
            SOCIALGFS_STAR)
GF_VARIANTS = (SOCIALGFS, SOCIALGFS_PLUS, SOCIALGFS_STAR)


def role_members(config):
    """{role: entity indices} using a throwaway reset; membership is static."""
    state = reset(config, 0)
    movers = state.movable_indices()
    if config.scenario == "grassland":
        return {"wolf": movers[state.kind[movers] == WOLF],
                "sheep": movers[state.kind[movers] == SHEEP]}
    if config.scenario == "vanilla_nav":
        return {"agent": movers}
    return {"red": movers[state.color[movers] == RED],
            "green": movers[state.color[movers] == GREEN]}


def role_rows(config):
    """{role: rows into the movable-ordered action array}."""
    state = reset(config, 0)
    movers = list(state.movable_indices())
    return {role: np.array([movers.index(int(i)) for i in members])
            for role, members in role_members(config).items()}


class BaselineObsProvider:
    mode = "baseline"

    def __init__(self, config):
        self._width = baseline_width(config)

    @property
    def width(self):
        return self._width

    def observe_batch(self, states, agent_indices):
        return np.stack([observe_baseline(s, i)
                         for s, i in zip(states, agent_indices)])


class GFObsProvider:
    mode = "gf"

    def __init__(self, rep):
        self.rep = rep

    @property
    def width(self):
        return self.rep.width

    def observe_batch(self, states, agent_indices):
        return compose_observations_batch(states, agent_indices, self.rep)


@dataclass
class StepOut:
    state: object     # post-step world, before any episode reset
    events: list
    done: bool


class EnvPool:
    def __init__(self, config, n_envs, seed):
        if n_envs < 1:
            raise ConfigurationError("need at least one environment")
        self.config = config
        self.n_envs = n_envs
        children = np.random.SeedSequence(seed).spawn(n_envs)
        self._seeders = [np.random.default_rng(c) for c in children]
        self.states = [reset(config, self._draw_seed(e)) for e in range(n_envs)]
        self._ticks = [0] * n_envs

    def _draw_seed(self, e):
        return int(self._seeders[e].integers(0, 2 ** 63))

    def step(self, actions):
        """actions (n_envs, n_movable, 2). Returns per-env StepOut; worlds that
        hit the episode length are already reset in self.states."""
        outs = []
        for e in range(self.n_envs):
            state, events = step(self.states[e], actions[e])
            self._ticks[e] += 1
            done = self._ticks[e] >= self.config.episode_length
            outs.append(StepOut(state, events, done))
            if done:
                self.states[e] = reset(self.config, self._draw_seed(e))
                self._ticks[e] = 0
            else:
                self.states[e] = state
        return outs


def make_reward_fn(variant, reps, shaping):
    """reward(state, events, entity_index, role, obs_row) for one transition.

    The shaped variant subtracts lambda * |gf+| measured at the decision-time
    observation, which is already in hand as obs_row.
    """
    if variant in (ORIGINAL_REWARD, SOCIALGFS, SOCIALGFS_STAR):
        return lambda state, events, i, role, obs_row: reward_original(state, events, i)
    if variant == REWARD_ENGINEERING:
        return lambda state, events, i, role, obs_row: reward_engineering(state, events, i)
    if variant == SOCIALGFS_PLUS:
        def shaped(state, events, i, role, obs_row):
            raw = reward_original(state, events, i)
            pen = shaping_penalty_from_obs(obs_row, reps[role])
            return raw - shaping[role].lam * float(pen)
        return shaped
    raise ConfigurationError(f"unknown method variant {variant!r}")


def collect_rollouts(pool, policies, providers, reward_fn, horizon, rng,
                     episode_log=None):
    """Gather horizon steps from every world. Returns {role: RolloutBuffer}.

    episode_log, when given, receives one dict per finished episode with the
    per-role mean trained reward and the final-step success flag.
    """
    config = pool.config
    members = role_members(config)
    rows = role_rows(config)
    roles = list(config.roles())
    n_envs = pool.n_envs
    n_movable = config.n_movable

    buffers = {r: allocate_buffer(horizon, n_envs * len(members[r]),
                                  providers[r].width) for r in roles}
    ep_reward = {r: np.zeros((n_envs, len(members[r]))) for r in roles}

    for t in range(horizon):
        actions_env = np.zeros((n_envs, n_movable, 2))
        per_role = {}
        for role in roles:
            idxs = members[role]
            states = [pool.states[e] for e in range(n_envs) for _ in idxs]
            agent_ids = [int(i) for _ in range(n_envs) for i in idxs]
            obs = providers[role].observe_batch(states, agent_ids)
            act, logp, value, raw = sample_action(policies[role], obs, rng,
                                                  return_raw=True)
            per_role[role] = (obs, raw, logp, value)
            k = len(idxs)
            for e in range(n_envs):
                actions_env[e, rows[role]] = act[e * k:(e + 1) * k]

        outs = pool.step(actions_env)

        for role in roles:
            obs, act, logp, value = per_role[role]
            buf = buffers[role]
            buf.obs[t] = obs
            buf.actions[t] = act
            buf.logp[t] = logp
            buf.values[t] = value
            idxs = members[role]
            k = len(idxs)
            for e, out in enumerate(outs):
                for j, i in enumerate(idxs):
                    r = reward_fn(out.state, out.events, int(i), role,
                                  obs[e * k + j])
                    buf.rewards[t, e * k + j] = r
                    ep_reward[role][e, j] += r
                buf.dones[t, e * k:(e + 1) * k] = 1.0 if out.done else 0.0

        for e, out in enumerate(outs):
            if out.done:
                if episode_log is not None:
                    entry = {"success": any(ev.kind == SUCCESS
                                            for ev in out.events)}
                    for role in roles:
                        entry[f"reward/{role}"] = float(ep_reward[role][e].mean())
                    episode_log.append(entry)
                for role in roles:
                    ep_reward[role][e] = 0.0

    for role in roles:
        idxs = members[role]
        states = [pool.states[e] for e in range(n_envs) for _ in idxs]
        agent_ids = [int(i) for _ in range(n_envs) for i in idxs]
        obs = providers[role].observe_batch(states, agent_ids)
        _, _, value = sample_action(policies[role], obs, rng, deterministic=True)
        buffers[role].last_values[:] = value
    return buffers
