"""Deterministic episode evaluation and the paper's headline metrics.

Policies act through their Gaussian mean here, so a (checkpoint, seed)
pair always reproduces the same report. An episode report tracks per-role
original-reward sums, grass-eaten counts, per-step landmark occupancy, and
whether the final step satisfied the success predicate.
"""

from dataclasses import dataclass, field

import numpy as np

from socialgf.errors import UsageError
from socialgf.marl.policy import sample_action
from socialgf.marl.rollout import role_members, role_rows
from socialgf.world import (
    GRASS_EATEN, GRASSLAND, LANDMARK, SUCCESS, reset, reward_original, step,
)
from socialgf.world.engine import LANDMARK_OCCUPIED
from socialgf.world.scenario import NAV_SCENARIOS


@dataclass
class EpisodeStats:
    reward_sums: dict                 # role -> mean per-agent original reward
    grass_eaten: int = 0
    success_final: bool = False
    success_steps: int = 0
    occupied_landmark_steps: int = 0  # correctly-occupied (landmark, step) pairs
    landmark_steps: int = 0
    steps: int = 0


@dataclass
class RoleActor:
    """One role's policy plus its observation provider; the unit cross_match
    mixes and matches."""

    policy: object
    provider: object


def role_actors(bundle, roles=None):
    roles = roles or bundle.config.roles()
    return {r: RoleActor(bundle.policies[r], bundle.providers[r]) for r in roles}


class ScriptedRoleActor:
    """Adapter so scripted/random behavior policies slot into evaluations."""

    def __init__(self, behavior):
        self.behavior = behavior


def run_episode(config, actors, seed, horizon=None, rng_for_scripted=None):
    """Run one episode with deterministic policy actions. actors: {role:
    RoleActor | ScriptedRoleActor} covering every role of the scenario."""
    for role in config.roles():
        if role not in actors:
            raise UsageError(f"no actor supplied for role {role!r}")
    state = reset(config, seed)
    members = role_members(config)
    rows = role_rows(config)
    horizon = horizon or config.episode_length
    scripted_rng = rng_for_scripted or np.random.default_rng(seed)
    stats = EpisodeStats(reward_sums={r: 0.0 for r in config.roles()})
    n_landmarks = len(state.indices_of(LANDMARK))

    for _ in range(horizon):
        actions = np.zeros((config.n_movable, 2))
        scripted_filled = set()
        for role, actor in actors.items():
            if isinstance(actor, ScriptedRoleActor):
                if id(actor.behavior) not in scripted_filled:
                    all_actions = actor.behavior.act(state, scripted_rng)
                    for r2, a2 in actors.items():
                        if isinstance(a2, ScriptedRoleActor) \
                                and a2.behavior is actor.behavior:
                            actions[rows[r2]] = all_actions[rows[r2]]
                    scripted_filled.add(id(actor.behavior))
                continue
            idxs = members[role]
            obs = actor.provider.observe_batch([state] * len(idxs),
                                               [int(i) for i in idxs])
            act, _, _ = sample_action(actor.policy, obs, None, deterministic=True)
            actions[rows[role]] = act
        state, events = step(state, actions)
        stats.steps += 1
        for role in config.roles():
            vals = [reward_original(state, events, int(i))
                    for i in members[role]]
            stats.reward_sums[role] += float(np.mean(vals))
        for ev in events:
            if ev.kind == GRASS_EATEN:
                stats.grass_eaten += 1
        if config.scenario in NAV_SCENARIOS:
            stats.landmark_steps += n_landmarks
            occupied = {ev.participants[0] for ev in events
                        if ev.kind == LANDMARK_OCCUPIED}
            stats.occupied_landmark_steps += len(occupied)
            success = any(ev.kind == SUCCESS for ev in events)
            stats.success_steps += int(success)
            stats.success_final = success
    return stats


def episode_seeds(seed, episodes):
    return [int(s) for s in np.random.SeedSequence((seed, 77)).generate_state(episodes)]


def run_episodes(config, actors, episodes, seed, horizon=None):
    return [run_episode(config, actors, s, horizon=horizon)
            for s in episode_seeds(seed, episodes)]


def nav_metrics(config, actors, episodes, seed):
    """(final-step success rate, occupation rate) over the episode batch."""
    if config.scenario not in NAV_SCENARIOS:
        raise UsageError("nav_metrics needs a navigation scenario")
    stats = run_episodes(config, actors, episodes, seed)
    success = float(np.mean([s.success_final for s in stats]))
    occupation = float(np.sum([s.occupied_landmark_steps for s in stats])
                       / max(1, np.sum([s.landmark_steps for s in stats])))
    return success, occupation


def grass_rate(config, actors, episodes, seed):
    """Mean grass-eaten events per sheep per 100 steps."""
    if config.scenario != GRASSLAND:
        raise UsageError("grass_rate needs the grassland scenario")
    stats = run_episodes(config, actors, episodes, seed)
    total_steps = sum(s.steps for s in stats)
    total_grass = sum(s.grass_eaten for s in stats)
    per_sheep_steps = total_steps * config.n_sheep
    return 100.0 * total_grass / max(1, per_sheep_steps)


def mean_role_rewards(stats):
    roles = stats[0].reward_sums.keys()
    return {r: float(np.mean([s.reward_sums[r] for s in stats])) for r in roles}
