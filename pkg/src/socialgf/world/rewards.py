"""The two paper reward functions: event-based sparse and engineered dense."""

import numpy as np

from socialgf.world.engine import GRASS_EATEN, LANDMARK_OCCUPIED, SHEEP_EATEN, SUCCESS
from socialgf.world.scenario import GRASS, LANDMARK, NAV_AGENT, SHEEP, WOLF


def reward_original(state, events, agent_index):
    """Sparse rewards: sheep +2 per grass eaten / -5 when eaten, wolf +5 per
    catch, nav agents +10 on each success step."""
    i = int(agent_index)
    k = state.kind[i]
    r = 0.0
    for ev in events:
        if k == SHEEP:
            if ev.kind == GRASS_EATEN and ev.participants[0] == i:
                r += 2.0
            elif ev.kind == SHEEP_EATEN and ev.participants[1] == i:
                r -= 5.0
        elif k == WOLF:
            if ev.kind == SHEEP_EATEN and ev.participants[0] == i:
                r += 5.0
        elif k == NAV_AGENT:
            if ev.kind == SUCCESS:
                r += 10.0
    return r


def _min_distance(state, i, kind):
    targets = state.indices_of(kind)
    if targets.size == 0:
        return 0.0
    return float(np.min(np.linalg.norm(state.pos[targets] - state.pos[i], axis=1)))


def reward_engineering(state, events, agent_index):
    """Sparse rewards plus hand-shaped dense terms: predators chase the nearest
    sheep, sheep chase the nearest grass, nav agents approach the nearest
    landmark and get +1 whenever they occupy one correctly."""
    i = int(agent_index)
    k = state.kind[i]
    r = reward_original(state, events, agent_index)
    if k == WOLF:
        r -= _min_distance(state, i, SHEEP)
    elif k == SHEEP:
        r -= _min_distance(state, i, GRASS)
    elif k == NAV_AGENT:
        r -= _min_distance(state, i, LANDMARK)
        for ev in events:
            if ev.kind == LANDMARK_OCCUPIED and i in ev.participants[1:]:
                r += 1.0
    return r
