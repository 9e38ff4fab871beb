"""Hand-written behavior policies: uniform random and greedy target seeking.

The greedy policy exists to harvest event-triggered examples (it reliably
produces catches, grass pickups, and navigation successes) and doubles as
the weak baseline opponent in evaluations.
"""

import numpy as np

from socialgf.world.scenario import (
    GRASS, GRASSLAND, GREEN, LANDMARK, NAV_COLOR, NAV_TEAM, RED, SHEEP, WOLF,
)

_KP = 2.5
_KD = 1.0
_FLEE_RADIUS = 5.0
_FLEE_GAIN = 1.5


class RandomPolicy:
    name = "random"

    def act(self, state, rng):
        return rng.uniform(-1.0, 1.0, size=(state.movable_indices().size, 2))


def _seek(state, i, target_pos):
    u = _KP * (target_pos - state.pos[i]) - _KD * state.vel[i]
    return np.clip(u, -1.0, 1.0)


def _nearest_of(state, i, kind):
    idx = state.indices_of(kind)
    idx = idx[idx != i]
    if idx.size == 0:
        return None
    d = np.linalg.norm(state.pos[idx] - state.pos[i], axis=1)
    return int(idx[int(np.argmin(d))])


def _nav_assignment(state):
    """Greedy distance-sorted agent->landmark assignment honoring the
    scenario's occupancy rule. Returns {agent: landmark}."""
    s = state.config
    agents = state.movable_indices()
    landmarks = state.indices_of(LANDMARK)
    pairs = []
    for a in agents:
        for lm in landmarks:
            if s.scenario == NAV_COLOR and state.color[a] != state.color[lm]:
                continue
            pairs.append((float(np.linalg.norm(state.pos[a] - state.pos[lm])),
                          int(a), int(lm)))
    pairs.sort()
    capacity = {}
    for lm in landmarks:
        if s.scenario == NAV_TEAM:
            capacity[int(lm)] = {RED: 1, GREEN: 1}  # one slot per team
        else:
            capacity[int(lm)] = {None: 1}
    assigned = {}
    for _, a, lm in pairs:
        if a in assigned:
            continue
        key = int(state.color[a]) if s.scenario == NAV_TEAM else None
        if capacity[lm].get(key, 0) > 0:
            capacity[lm][key] -= 1
            assigned[a] = lm
    return assigned


class ScriptedGreedyPolicy:
    """Wolves chase the nearest sheep; sheep head for the nearest grass and
    flee nearby wolves; nav agents claim landmarks greedily by distance."""

    name = "scripted_greedy"

    def act(self, state, rng):
        s = state.config
        movers = state.movable_indices()
        actions = np.zeros((movers.size, 2))
        if s.scenario == GRASSLAND:
            for row, i in enumerate(movers):
                if state.kind[i] == WOLF:
                    tgt = _nearest_of(state, i, SHEEP)
                    if tgt is not None:
                        actions[row] = _seek(state, i, state.pos[tgt])
                else:
                    tgt = _nearest_of(state, i, GRASS)
                    if tgt is not None:
                        actions[row] = _seek(state, i, state.pos[tgt])
                    wolf = _nearest_of(state, i, WOLF)
                    if wolf is not None:
                        away = state.pos[i] - state.pos[wolf]
                        dist = np.linalg.norm(away)
                        if dist < _FLEE_RADIUS and dist > 1e-9:
                            actions[row] += _FLEE_GAIN * away / dist
                    actions[row] = np.clip(actions[row], -1.0, 1.0)
        else:
            assignment = _nav_assignment(state)
            for row, i in enumerate(movers):
                lm = assignment.get(int(i))
                if lm is not None:
                    actions[row] = _seek(state, i, state.pos[lm])
        return actions


def make_behavior_policy(name):
    if name == "random":
        return RandomPolicy()
    if name == "scripted_greedy":
        return ScriptedGreedyPolicy()
    raise ValueError(f"unknown behavior policy {name!r}")
