"""Slow reference implementations used to cross-check the fast paths.

Everything here re-derives its answer from first principles (plain double
loops, explicit permutation search, direct discounted sums) without touching
the production kernels, so agreement is meaningful evidence.
"""

from itertools import permutations

import numpy as np

from socialgf.world.engine import (
    GRASS_EATEN, LANDMARK_OCCUPIED, SHEEP_EATEN, SUCCESS, Event,
)
from socialgf.world.scenario import (
    GRASS, GRASSLAND, GREEN, LANDMARK, NAV_AGENT, NAV_COLOR, NAV_TEAM,
    NAV_VANILLA, RED, SHEEP, WOLF,
)


def _overlap(state, i, j):
    dx = state.pos[i, 0] - state.pos[j, 0]
    dy = state.pos[i, 1] - state.pos[j, 1]
    return (dx * dx + dy * dy) ** 0.5 < state.radius[i] + state.radius[j]


def brute_force_events(state):
    """Naive O(n^2) pairwise re-derivation of detect_events semantics."""
    s = state.config
    n = state.n_entities
    t = state.t
    events = []
    if s.scenario == GRASSLAND:
        wolves = [i for i in range(n) if state.kind[i] == WOLF]
        sheep = [i for i in range(n) if state.kind[i] == SHEEP]
        grass = [i for i in range(n) if state.kind[i] == GRASS]
        for sh in sheep:
            touching = [w for w in wolves if _overlap(state, w, sh)]
            if touching:
                dists = [np.hypot(*(state.pos[w] - state.pos[sh])) for w in touching]
                best = touching[int(np.argmin(dists))]
                events.append(Event(SHEEP_EATEN, (best, sh), t))
        for g in grass:
            touching = [sh for sh in sheep if _overlap(state, sh, g)]
            if touching:
                dists = [np.hypot(*(state.pos[sh] - state.pos[g])) for sh in touching]
                best = touching[int(np.argmin(dists))]
                events.append(Event(GRASS_EATEN, (best, g), t))
        return events

    agents = [i for i in range(n) if state.kind[i] == NAV_AGENT]
    landmarks = [i for i in range(n) if state.kind[i] == LANDMARK]
    correct = {}
    for lm in landmarks:
        touching = [a for a in agents if _overlap(state, a, lm)]
        if s.scenario == NAV_COLOR:
            correct[lm] = sorted(a for a in touching
                                 if state.color[a] == state.color[lm])
        elif s.scenario == NAV_TEAM:
            has_red = any(state.color[a] == RED for a in touching)
            has_green = any(state.color[a] == GREEN for a in touching)
            correct[lm] = sorted(touching) if (has_red and has_green) else []
        else:
            correct[lm] = sorted(touching)
    for lm in landmarks:
        if correct[lm]:
            events.append(Event(LANDMARK_OCCUPIED, (lm, *correct[lm]), t))
    success = all(correct[lm] for lm in landmarks)
    if success and s.scenario == NAV_VANILLA:
        # conflict-free: some assignment of distinct agents covers all landmarks
        success = any(
            all(perm[k] in correct[lm] for k, lm in enumerate(landmarks))
            for perm in permutations(agents, len(landmarks)))
    if success:
        events.append(Event(SUCCESS, tuple(agents), t))
    return events


def gae_reference(rewards, values, dones, last_values, gamma, lam):
    """Direct O(T^2) discounted-sum form of the generalized advantage:
    A_t = sum_l (gamma lam)^l delta_{t+l}, truncated at episode ends."""
    T, B = rewards.shape
    adv = np.zeros((T, B))
    for b in range(B):
        deltas = np.zeros(T)
        for t in range(T):
            nonterminal = 1.0 - dones[t, b]
            next_v = last_values[b] if t == T - 1 else values[t + 1, b]
            deltas[t] = rewards[t, b] + gamma * next_v * nonterminal - values[t, b]
        for t in range(T):
            total = 0.0
            factor = 1.0
            for l in range(t, T):
                total += factor * deltas[l]
                if dones[l, b]:
                    break
                factor *= gamma * lam
            adv[t, b] = total
    return adv
