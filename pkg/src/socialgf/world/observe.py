"""Baseline observation vectors with a fixed, documented layout.

grassland:   [self pos, self vel] + per other agent [rel pos, abs vel]
             + per grass [rel pos] + per obstacle [rel pos]
navigation:  [self pos, self vel] + per other agent [rel pos, abs vel]
             + per landmark [rel pos, color one-hot (red, green)]

Entity blocks follow the canonical entity order of the state with the
observing agent skipped. Relative positions make every non-self block
translation invariant.
"""

import numpy as np

from socialgf.world.scenario import GRASS, GRASSLAND, GREEN, LANDMARK, OBSTACLE, RED


def observe_baseline(state, agent_index):
    s = state.config
    i = int(agent_index)
    parts = [state.pos[i], state.vel[i]]
    movers = state.movable_indices()
    for j in movers:
        if j == i:
            continue
        parts.append(state.pos[j] - state.pos[i])
        parts.append(state.vel[j])
    if s.scenario == GRASSLAND:
        for j in state.indices_of(GRASS):
            parts.append(state.pos[j] - state.pos[i])
        for j in state.indices_of(OBSTACLE):
            parts.append(state.pos[j] - state.pos[i])
    else:
        for j in state.indices_of(LANDMARK):
            parts.append(state.pos[j] - state.pos[i])
            parts.append(np.array([1.0 if state.color[j] == RED else 0.0,
                                   1.0 if state.color[j] == GREEN else 0.0]))
    return np.concatenate(parts)


def baseline_width(config):
    """Observation length for any agent of the scenario (role independent)."""
    a = config.n_movable
    if config.scenario == GRASSLAND:
        return 4 + 4 * (a - 1) + 2 * config.n_grass + 2 * len(config.obstacles)
    return 4 + 4 * (a - 1) + 4 * config.n_landmarks
