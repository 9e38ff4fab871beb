"""Harvest event-triggered, agent-centric configuration snapshots.

A record is the flat vector of 2D positions of the entities named by its
category's slot kinds, expressed relative to the beneficiary agent (agent at
origin). Categories:

  grass_eaten     sheep attractive   grass positions at a grass_eaten event
  sheep_chasing   wolf attractive    sheep positions at a sheep_eaten event
  wolf_avoid      sheep repulsive    wolf positions at a sheep_eaten event
  boundary_avoid  shared attractive  world center + obstacles at legal frames
  navigation      agent attractive   agents + landmarks at a success event

Slot kinds for navigation are expressed relative to the beneficiary:
agent_same / agent_other (team split) and landmark_same / landmark_other
(color split). The "center" pseudo-entity encodes the fixed square boundary
through the agent's offset from the world origin.
"""

from dataclasses import dataclass

import numpy as np

from socialgf.container import read_container, write_container
from socialgf.errors import ArtifactError, CollectionError, ConfigurationError
from socialgf.world import (
    GRASS, GRASS_EATEN, GRASSLAND, LANDMARK, NAV_AGENT, SHEEP, SHEEP_EATEN,
    SUCCESS, WOLF, colliding_with_static,
)
from socialgf.world.engine import apply_events, detect_events, integrate, reset

ATTRACTIVE = "attractive"
REPULSIVE = "repulsive"

# every frame is eligible for boundary_avoid; keep one in fifty to decorrelate
BOUNDARY_SAMPLE_PERIOD = 50


@dataclass(frozen=True)
class ExampleCategory:
    name: str
    polarity: str
    role: str          # beneficiary agent role; "any" when shared across roles
    kinds: tuple       # slot-kind vocabulary, fixed order


CATEGORIES = {
    "grass_eaten": ExampleCategory("grass_eaten", ATTRACTIVE, "sheep", ("grass",)),
    "sheep_chasing": ExampleCategory("sheep_chasing", ATTRACTIVE, "wolf", ("sheep",)),
    "wolf_avoid": ExampleCategory("wolf_avoid", REPULSIVE, "sheep", ("wolf",)),
    "boundary_avoid": ExampleCategory("boundary_avoid", ATTRACTIVE, "any",
                                      ("center", "obstacle")),
    "navigation": ExampleCategory("navigation", ATTRACTIVE, "agent",
                                  ("agent_same", "agent_other",
                                   "landmark_same", "landmark_other")),
}

SCENARIO_CATEGORIES = {
    "grassland": ("grass_eaten", "sheep_chasing", "wolf_avoid", "boundary_avoid"),
    "vanilla_nav": ("navigation",),
    "color_nav": ("navigation",),
    "team_nav": ("navigation",),
}


@dataclass
class ExampleSet:
    category: ExampleCategory
    slot_kinds: tuple      # slot-kind tag per record slot, shared by all records
    records: np.ndarray    # (n, 2 * len(slot_kinds))
    provenance: dict

    def __post_init__(self):
        self.records = np.asarray(self.records, dtype=np.float64)
        if self.records.ndim != 2 or self.records.shape[1] != 2 * len(self.slot_kinds):
            raise ConfigurationError(
                f"records for {self.category.name} must have shape (n, "
                f"{2 * len(self.slot_kinds)}), got {self.records.shape}")

    @property
    def n_records(self):
        return self.records.shape[0]


def extract_entities(state, agent_index, kinds):
    """Relative positions and slot tags of the entities a category looks at,
    from the beneficiary agent's frame. Slot order: kinds order, then entity
    index order."""
    i = int(agent_index)
    rel = []
    tags = []

    def add(indices, tag):
        for j in indices:
            if j == i:
                continue
            rel.append(state.pos[j] - state.pos[i])
            tags.append(tag)

    for kind in kinds:
        if kind == "grass":
            add(state.indices_of(GRASS), "grass")
        elif kind == "wolf":
            add(state.indices_of(WOLF), "wolf")
        elif kind == "sheep":
            add(state.indices_of(SHEEP), "sheep")
        elif kind == "obstacle":
            from socialgf.world.scenario import OBSTACLE
            add(state.indices_of(OBSTACLE), "obstacle")
        elif kind == "center":
            rel.append(-state.pos[i])
            tags.append("center")
        elif kind in ("agent_same", "agent_other"):
            agents = state.indices_of(NAV_AGENT)
            same = state.color[agents] == state.color[i]
            pick = agents[same] if kind == "agent_same" else agents[~same]
            add(pick, kind)
        elif kind in ("landmark_same", "landmark_other"):
            landmarks = state.indices_of(LANDMARK)
            # colorless landmarks count as "same" for every agent
            same = (state.color[landmarks] == state.color[i]) | (state.color[landmarks] < 0)
            pick = landmarks[same] if kind == "landmark_same" else landmarks[~same]
            add(pick, kind)
        else:
            raise ConfigurationError(f"unknown slot kind {kind!r}")
    if not rel:
        return np.zeros((0, 2)), ()
    return np.asarray(rel), tuple(tags)


def make_record(state, agent_index, category):
    rel, tags = extract_entities(state, agent_index, category.kinds)
    return rel.reshape(-1), tags


class _Accumulator:
    def __init__(self, category, n_target):
        self.category = category
        self.n_target = n_target
        self.slot_kinds = None
        self.rows = []

    @property
    def full(self):
        return len(self.rows) >= self.n_target

    def add(self, state, agent_index):
        if self.full:
            return
        row, tags = make_record(state, agent_index, self.category)
        if self.slot_kinds is None:
            self.slot_kinds = tags
        elif tags != self.slot_kinds:
            raise CollectionError(
                f"inconsistent layout within category {self.category.name}")
        self.rows.append(row)


def collect_examples(config, policy, n_target=1000, seed=0, categories=None,
                     max_episodes=5000):
    """Roll the behavior policy until every requested category holds n_target
    records. Deterministic given (config, policy, seed)."""
    if n_target < 1:
        raise ConfigurationError("n_target must be >= 1")
    names = tuple(categories) if categories else SCENARIO_CATEGORIES[config.scenario]
    for name in names:
        if name not in CATEGORIES:
            raise ConfigurationError(f"unknown example category {name!r}")
    acc = {name: _Accumulator(CATEGORIES[name], n_target) for name in names}
    episode_seeds = np.random.SeedSequence(seed).generate_state(max_episodes)

    episodes_run = 0
    for ep in range(max_episodes):
        if all(a.full for a in acc.values()):
            break
        episodes_run += 1
        state = reset(config, int(episode_seeds[ep]))
        policy_rng = np.random.default_rng(int(episode_seeds[ep]) ^ 0x5EED)
        success_taken = False
        for _ in range(config.episode_length):
            actions = policy.act(state, policy_rng)
            moved = integrate(state, actions)
            events = detect_events(moved)
            for ev in events:
                if ev.kind == SHEEP_EATEN:
                    wolf, sheep = ev.participants
                    if "sheep_chasing" in acc:
                        acc["sheep_chasing"].add(moved, wolf)
                    if "wolf_avoid" in acc:
                        acc["wolf_avoid"].add(moved, sheep)
                elif ev.kind == GRASS_EATEN and "grass_eaten" in acc:
                    acc["grass_eaten"].add(moved, ev.participants[0])
                elif ev.kind == SUCCESS and "navigation" in acc and not success_taken:
                    # one success frame per episode; later frames repeat it
                    for agent in ev.participants:
                        acc["navigation"].add(moved, agent)
                    success_taken = True
            if "boundary_avoid" in acc and moved.t % BOUNDARY_SAMPLE_PERIOD == 0:
                for i in moved.movable_indices():
                    if not colliding_with_static(moved, i):
                        acc["boundary_avoid"].add(moved, i)
            state = apply_events(moved, events)
            if all(a.full for a in acc.values()):
                break

    starved = [n for n, a in acc.items() if not a.full]
    if starved:
        counts = {n: len(acc[n].rows) for n in starved}
        raise CollectionError(
            f"example collection starved after {episodes_run} episodes: "
            f"{counts} records found, {n_target} required per category "
            f"(categories: {', '.join(starved)})")

    provenance = {
        "scenario": config.to_dict(),
        "seed": int(seed),
        "policy": policy.name,
        "n_target": int(n_target),
        "episodes": int(episodes_run),
    }
    out = {}
    for name, a in acc.items():
        out[name] = ExampleSet(a.category, a.slot_kinds,
                               np.asarray(a.rows[:n_target]), dict(provenance))
    return out


def save_dataset(sets, path, config_hash=None):
    """Persist category sets to a single container; bit-exact round trip."""
    meta = {"kind": "dataset", "categories": {}, "config_hash": config_hash}
    arrays = {}
    for name, es in sets.items():
        if es.n_records == 0:
            raise ArtifactError(f"refusing to save empty category {name!r}")
        meta["categories"][name] = {
            "polarity": es.category.polarity,
            "role": es.category.role,
            "kinds": list(es.category.kinds),
            "slot_kinds": list(es.slot_kinds),
            "provenance": es.provenance,
        }
        arrays[f"{name}/records"] = es.records
    write_container(path, meta, arrays)


def load_dataset(path):
    meta, arrays, _ = read_container(path)
    if meta.get("kind") != "dataset":
        raise ArtifactError(f"{path} is not a dataset artifact")
    out = {}
    for name, desc in meta["categories"].items():
        records = arrays.get(f"{name}/records")
        if records is None or records.shape[0] == 0:
            raise ArtifactError(f"dataset {path} has empty category {name!r}")
        category = ExampleCategory(name, desc["polarity"], desc["role"],
                                   tuple(desc["kinds"]))
        out[name] = ExampleSet(category, tuple(desc["slot_kinds"]), records,
                               desc["provenance"])
    return out
