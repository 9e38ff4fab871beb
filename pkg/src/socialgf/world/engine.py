"""Deterministic 2D particle world: spawning, physics, event detection.

A step is three stages, exposed separately so callers can look at the
world between movement and consequences (the example harvester needs the
frame in which an eaten grass still sits under the sheep):

    moved  = integrate(state, actions)       physics only
    events = detect_events(moved)            geometric predicates
    state' = apply_events(moved, events)     respawns, counter increment

step() composes the three. Identical (config, seed, action sequence)
reproduces trajectories and events bit-identically.
"""

from dataclasses import dataclass

import numpy as np

from socialgf import backend
from socialgf.errors import ConfigurationError, UsageError
from socialgf.world.scenario import (
    GRASS, GRASSLAND, GREEN, LANDMARK, NAV_AGENT, NAV_COLOR, NAV_TEAM,
    NAV_VANILLA, NO_COLOR, OBSTACLE, RED, SHEEP, WOLF,
)

SHEEP_EATEN = "sheep_eaten"
GRASS_EATEN = "grass_eaten"
SUCCESS = "success"
LANDMARK_OCCUPIED = "landmark_occupied"

_SPAWN_RETRIES = 200


@dataclass(frozen=True)
class Event:
    """kind plus the participating entity indices at emission time.

    participants: sheep_eaten -> (wolf, sheep); grass_eaten -> (sheep, grass);
    landmark_occupied -> (landmark, *occupiers); success -> all nav agents.
    """

    kind: str
    participants: tuple
    t: int


@dataclass
class WorldState:
    config: object
    pos: np.ndarray      # (n, 2)
    vel: np.ndarray      # (n, 2)
    radius: np.ndarray   # (n,)
    kind: np.ndarray     # (n,) int64
    color: np.ndarray    # (n,) int64, NO_COLOR outside nav variants
    t: int
    rng: np.random.Generator

    def copy(self):
        gen = np.random.Generator(np.random.PCG64())
        gen.bit_generator.state = self.rng.bit_generator.state
        return WorldState(self.config, self.pos.copy(), self.vel.copy(),
                          self.radius.copy(), self.kind.copy(), self.color.copy(),
                          self.t, gen)

    @property
    def n_entities(self):
        return self.pos.shape[0]

    def indices_of(self, kind):
        return np.flatnonzero(self.kind == kind)

    def movable_indices(self):
        return np.flatnonzero((self.kind == SHEEP) | (self.kind == WOLF)
                              | (self.kind == NAV_AGENT))


def _entity_table(config):
    """(kind, color, radius) per entity in canonical order."""
    rows = []
    s = config
    if s.scenario == GRASSLAND:
        rows += [(WOLF, NO_COLOR, s.agent_radius)] * s.n_wolves
        rows += [(SHEEP, NO_COLOR, s.agent_radius)] * s.n_sheep
        rows += [(GRASS, NO_COLOR, s.grass_radius)] * s.n_grass
    elif s.scenario == NAV_VANILLA:
        rows += [(NAV_AGENT, NO_COLOR, s.agent_radius)] * s.n_agents
        rows += [(LANDMARK, NO_COLOR, s.landmark_radius)] * s.n_landmarks
    elif s.scenario == NAV_COLOR:
        rows += [(NAV_AGENT, RED, s.agent_radius)] * s.team_size
        rows += [(NAV_AGENT, GREEN, s.agent_radius)] * s.team_size
        rows += [(LANDMARK, RED, s.landmark_radius)] * s.team_size
        rows += [(LANDMARK, GREEN, s.landmark_radius)] * s.team_size
    elif s.scenario == NAV_TEAM:
        rows += [(NAV_AGENT, RED, s.agent_radius)] * s.team_size
        rows += [(NAV_AGENT, GREEN, s.agent_radius)] * s.team_size
        rows += [(LANDMARK, NO_COLOR, s.landmark_radius)] * s.n_landmarks
    rows += [(OBSTACLE, NO_COLOR, r) for _, _, r in s.obstacles]
    return rows


def _free_position(config, radius, rng, obstacles_xyr):
    """Uniform position inside the walls, not overlapping any obstacle."""
    hw = config.half_width
    lo, hi = -(hw - radius), hw - radius
    if lo >= hi:
        raise ConfigurationError(
            f"an entity of radius {radius} cannot fit inside a world of "
            f"half-width {hw}")
    for _ in range(_SPAWN_RETRIES):
        p = rng.uniform(lo, hi, size=2)
        ok = True
        for ox, oy, orad in obstacles_xyr:
            if np.hypot(p[0] - ox, p[1] - oy) < radius + orad:
                ok = False
                break
        if ok:
            return p
    raise ConfigurationError(
        f"could not place an entity of radius {radius} in free space after "
        f"{_SPAWN_RETRIES} tries; the scenario is packed too tight")


def reset(config, seed):
    """Spawn a fresh world. Obstacles go at their configured spots; everything
    else lands uniformly at random in free space."""
    rng = np.random.default_rng(seed)
    rows = _entity_table(config)
    n = len(rows)
    pos = np.zeros((n, 2))
    kind = np.array([r[0] for r in rows], dtype=np.int64)
    color = np.array([r[1] for r in rows], dtype=np.int64)
    radius = np.array([r[2] for r in rows], dtype=np.float64)
    obstacle_rows = np.flatnonzero(kind == OBSTACLE)
    for slot, (ox, oy, orad) in zip(obstacle_rows, config.obstacles):
        pos[slot] = (ox, oy)
    for i in range(n):
        if kind[i] == OBSTACLE:
            continue
        pos[i] = _free_position(config, radius[i], rng, config.obstacles)
    return WorldState(config=config, pos=pos, vel=np.zeros((n, 2)),
                      radius=radius, kind=kind, color=color, t=0, rng=rng)


def max_speeds(state):
    s = state.config
    out = np.zeros(state.n_entities)
    out[state.kind == WOLF] = s.max_speed_wolf
    out[state.kind == SHEEP] = s.max_speed_sheep
    out[state.kind == NAV_AGENT] = s.max_speed_nav
    return out


def integrate(state, actions):
    """Semi-implicit Euler: forces -> damped velocity -> position, then
    boundary/obstacle resolution and the per-kind speed clamp."""
    s = state.config
    movers = state.movable_indices()
    actions = np.asarray(actions, dtype=np.float64)
    if actions.shape != (movers.size, 2):
        raise UsageError(
            f"expected actions of shape ({movers.size}, 2), got {actions.shape}")
    bad = np.flatnonzero(~np.isfinite(actions).all(axis=1))
    if bad.size:
        raise UsageError(f"non-finite action for agent {int(bad[0])}")
    actions = np.clip(actions, -1.0, 1.0)

    new = state.copy()
    force = np.zeros((state.n_entities, 2))
    force[movers] = s.accel * actions

    hw = s.half_width
    # soft contacts: walls push inward, obstacles push outward
    for i in movers:
        p = new.pos[i]
        r = new.radius[i]
        for ax in range(2):
            over = abs(p[ax]) + r - hw
            if over > 0:
                force[i, ax] -= np.sign(p[ax]) * s.contact_stiffness * over
        for ox, oy, orad in s.obstacles:
            d = p - (ox, oy)
            dist = np.hypot(d[0], d[1])
            pen = (r + orad) - dist
            if pen > 0:
                direction = d / dist if dist > 1e-12 else np.array([1.0, 0.0])
                force[i] += direction * s.contact_stiffness * pen

    new.vel[movers] = new.vel[movers] * (1.0 - s.damping) + force[movers] * s.dt
    caps = max_speeds(state)[movers]
    speed = np.linalg.norm(new.vel[movers], axis=1)
    too_fast = speed > caps
    if np.any(too_fast):
        idx = movers[too_fast]
        new.vel[idx] *= (caps[too_fast] / speed[too_fast])[:, None]
    new.pos[movers] += new.vel[movers] * s.dt

    # hard resolution keeps the bound invariants even under extreme forces
    for i in movers:
        p = new.pos[i]
        r = new.radius[i]
        for ox, oy, orad in s.obstacles:
            d = p - (ox, oy)
            dist = np.hypot(d[0], d[1])
            if dist < r + orad:
                direction = d / dist if dist > 1e-12 else np.array([1.0, 0.0])
                new.pos[i] = (ox, oy) + direction * (r + orad)
        for ax in range(2):
            lim = hw - r
            if new.pos[i, ax] > lim:
                new.pos[i, ax] = lim
                new.vel[i, ax] = 0.0
            elif new.pos[i, ax] < -lim:
                new.pos[i, ax] = -lim
                new.vel[i, ax] = 0.0
    return new


def _overlap_pairs(state):
    active = np.ones(state.n_entities, dtype=np.uint8)
    return backend.overlap_pairs(np.ascontiguousarray(state.pos),
                                 np.ascontiguousarray(state.radius), active)


def _nearest(state, candidates, target):
    d = np.linalg.norm(state.pos[candidates] - state.pos[target], axis=1)
    return int(candidates[int(np.argmin(d))])


def _vanilla_matching(landmark_occupiers):
    """True iff a perfect matching assigns each landmark a distinct occupier."""
    match = {}

    def try_assign(lm, seen):
        for agent in landmark_occupiers[lm]:
            if agent in seen:
                continue
            seen.add(agent)
            if agent not in match or try_assign(match[agent], seen):
                match[agent] = lm
                return True
        return False

    for lm in landmark_occupiers:
        if not try_assign(lm, set()):
            return False
    return True


def detect_events(state):
    """All events implied by the current geometry; overlap means center
    distance strictly below the radius sum."""
    s = state.config
    pairs = _overlap_pairs(state)
    events = []
    t = state.t
    if s.scenario == GRASSLAND:
        wolf_sheep = {}
        sheep_grass = {}
        for i, j in pairs:
            ki, kj = state.kind[i], state.kind[j]
            if {ki, kj} == {WOLF, SHEEP}:
                wolf, sheep = (i, j) if ki == WOLF else (j, i)
                wolf_sheep.setdefault(int(sheep), []).append(int(wolf))
            elif {ki, kj} == {SHEEP, GRASS}:
                sheep, grass = (i, j) if ki == SHEEP else (j, i)
                sheep_grass.setdefault(int(grass), []).append(int(sheep))
        for sheep in sorted(wolf_sheep):
            wolf = _nearest(state, np.array(wolf_sheep[sheep]), sheep)
            events.append(Event(SHEEP_EATEN, (wolf, sheep), t))
        for grass in sorted(sheep_grass):
            sheep = _nearest(state, np.array(sheep_grass[grass]), grass)
            events.append(Event(GRASS_EATEN, (sheep, grass), t))
        return events

    # navigation variants
    landmarks = state.indices_of(LANDMARK)
    touchers = {int(lm): [] for lm in landmarks}
    for i, j in pairs:
        ki, kj = state.kind[i], state.kind[j]
        if {ki, kj} == {NAV_AGENT, LANDMARK}:
            agent, lm = (i, j) if ki == NAV_AGENT else (j, i)
            touchers[int(lm)].append(int(agent))
    occupied = {}
    for lm, agents in touchers.items():
        if s.scenario == NAV_COLOR:
            correct = [a for a in agents if state.color[a] == state.color[lm]]
            occupied[lm] = sorted(correct)
        elif s.scenario == NAV_TEAM:
            colors = {int(state.color[a]) for a in agents}
            occupied[lm] = sorted(agents) if colors >= {RED, GREEN} else []
        else:
            occupied[lm] = sorted(agents)
    for lm in sorted(occupied):
        if occupied[lm]:
            events.append(Event(LANDMARK_OCCUPIED, (lm, *occupied[lm]), t))
    all_occupied = all(occupied[int(lm)] for lm in landmarks)
    if all_occupied and s.scenario == NAV_VANILLA:
        all_occupied = _vanilla_matching({lm: occ for lm, occ in occupied.items()})
    if all_occupied:
        agents = tuple(int(a) for a in state.indices_of(NAV_AGENT))
        events.append(Event(SUCCESS, agents, t))
    return events


def apply_events(state, events):
    """Consume event consequences: eaten grass respawns elsewhere, eaten sheep
    teleport-respawn (population stays constant), counter advances by one."""
    new = state.copy()
    s = state.config
    for ev in events:
        if ev.kind == GRASS_EATEN:
            grass = ev.participants[1]
            new.pos[grass] = _free_position(s, new.radius[grass], new.rng, s.obstacles)
        elif ev.kind == SHEEP_EATEN:
            sheep = ev.participants[1]
            new.pos[sheep] = _free_position(s, new.radius[sheep], new.rng, s.obstacles)
            new.vel[sheep] = 0.0
    new.t += 1
    return new


def step(state, actions):
    """Advance one tick. Returns (new state, events emitted this tick)."""
    moved = integrate(state, actions)
    events = detect_events(moved)
    return apply_events(moved, events), events


def colliding_with_static(state, idx):
    """True if entity idx touches a wall or an obstacle (used when harvesting
    legal-position examples)."""
    s = state.config
    p = state.pos[idx]
    r = state.radius[idx]
    if np.any(np.abs(p) + r >= s.half_width - 1e-9):
        return True
    for ox, oy, orad in s.obstacles:
        if np.hypot(p[0] - ox, p[1] - oy) < r + orad + 1e-9:
            return True
    return False
