"""Compose gradient fields into policy observations and shaped rewards.

A representation is an ordered list of field slots for one agent role. Each
slot evaluates its field on the entities it selects from the world (the
field's slot-kind vocabulary doubles as the selector) and contributes a 2D
gradient to the observation; the optional self-velocity prefix restores the
dynamics that position-only fields cannot carry. Observation length depends
only on (slot count, velocity flag), never on the scenario population,
which is what makes the representation reusable across scales.

Reward shaping subtracts lambda times the summed Euclidean magnitudes of
the attractive slots: the magnitude measures distance to the attractive
example distribution, so maximizing shaped reward walks the agent toward it.

Adaptation = slot surgery: swap_slots() reroutes new fields (or zero fills)
into the old slot order while any policy trained on the old layout keeps
its weights, because the observation width never changes.
"""

import json
from dataclasses import dataclass

import numpy as np

from socialgf.errors import AdaptationError, ConfigurationError, UsageError
from socialgf.examples import extract_entities
from socialgf.scorefield import eval_field, load_field, save_field

ZERO_FILL = "zero"


class ZeroField:
    """Placeholder for an unmapped slot after adaptation: contributes a zero
    gradient and nothing to shaping."""

    category = ZERO_FILL

    def __init__(self, polarity):
        self.polarity = polarity


@dataclass(frozen=True)
class GFSlot:
    index: int
    field: object          # GradientField or ZeroField
    polarity: str

    @property
    def is_zero(self):
        return isinstance(self.field, ZeroField)


@dataclass(frozen=True)
class GFRepresentation:
    role: str
    slots: tuple
    include_self_velocity: bool = True

    def __post_init__(self):
        for want, slot in enumerate(self.slots):
            if slot.index != want:
                raise ConfigurationError(
                    f"slot order broken: slot {want} carries index {slot.index}")

    @property
    def width(self):
        return 2 * len(self.slots) + (2 if self.include_self_velocity else 0)

    def attractive_indices(self):
        return tuple(s.index for s in self.slots
                     if s.polarity == "attractive" and not s.is_zero)


@dataclass(frozen=True)
class ShapingConfig:
    lam: float = 0.01
    enabled: bool = False

    def __post_init__(self):
        if self.lam < 0:
            raise ConfigurationError("shaping coefficient must be >= 0")


def representation_from_fields(role, fields, include_self_velocity=True):
    slots = tuple(GFSlot(i, f, f.polarity) for i, f in enumerate(fields))
    return GFRepresentation(role, slots, include_self_velocity)


def _slot_inputs(state, agent_index, slot):
    rel, tags = extract_entities(state, agent_index, slot.field.net.kinds)
    if rel.shape[0] == 0:
        raise AdaptationError(
            f"slot {slot.index} ({slot.field.category}) selects entities "
            f"{slot.field.net.kinds} but this scenario has none")
    return rel, tags


def compose_observation(state, agent_index, rep):
    """Observation vector: [self velocity?] + 2 numbers per slot."""
    parts = []
    if rep.include_self_velocity:
        parts.append(state.vel[int(agent_index)])
    for slot in rep.slots:
        if slot.is_zero:
            parts.append(np.zeros(2))
            continue
        rel, tags = _slot_inputs(state, agent_index, slot)
        parts.append(eval_field(slot.field, rel, tags))
    return np.concatenate(parts) if parts else np.zeros(0)


def compose_observations_batch(states, agent_indices, rep):
    """Observations for (state, agent) pairs sharing one scenario config.

    One field evaluation per slot over the whole batch; identical numbers to
    compose_observation row by row.
    """
    n = len(states)
    if n == 0:
        return np.zeros((0, rep.width))
    obs = np.zeros((n, rep.width))
    col = 0
    if rep.include_self_velocity:
        for row, (st, i) in enumerate(zip(states, agent_indices)):
            obs[row, 0:2] = st.vel[int(i)]
        col = 2
    for slot in rep.slots:
        if slot.is_zero:
            col += 2
            continue
        rels = []
        tags = None
        for st, i in zip(states, agent_indices):
            rel, t = _slot_inputs(st, i, slot)
            if tags is None:
                tags = t
            elif t != tags:
                raise UsageError("batched composition needs one shared layout")
            rels.append(rel)
        grad = eval_field(slot.field, np.stack(rels), tags)
        obs[:, col:col + 2] = grad
        col += 2
    return obs


def shaping_penalty(state, agent_index, rep):
    """lambda-free penalty term: sum of attractive-slot gradient magnitudes."""
    total = 0.0
    for slot in rep.slots:
        if slot.polarity != "attractive" or slot.is_zero:
            continue
        rel, tags = _slot_inputs(state, agent_index, slot)
        total += float(np.linalg.norm(eval_field(slot.field, rel, tags)))
    return total


def shaping_penalty_from_obs(obs, rep):
    """Same number as shaping_penalty, read off an already-composed observation."""
    base = 2 if rep.include_self_velocity else 0
    total = 0.0
    for slot in rep.slots:
        if slot.polarity != "attractive" or slot.is_zero:
            continue
        g = obs[..., base + 2 * slot.index: base + 2 * slot.index + 2]
        total = total + np.linalg.norm(g, axis=-1)
    return total


def shaped_reward(raw, state, agent_index, rep, shaping):
    """raw - lambda * sum over attractive slots of ||gf||; repulsive slots
    never enter."""
    if not shaping.enabled:
        return float(raw)
    if not rep.attractive_indices() and any(not s.is_zero for s in rep.slots):
        raise ConfigurationError(
            "shaping is enabled but the representation has no attractive slot")
    return float(raw) - shaping.lam * shaping_penalty(state, agent_index, rep)


def swap_slots(rep, mapping):
    """Reroute fields into an existing slot order.

    mapping: {slot_index: GradientField | "zero" | "keep"} and must cover
    every slot; an unmapped slot is a configuration error, never a silent
    passthrough.
    """
    new_slots = []
    for slot in rep.slots:
        if slot.index not in mapping:
            raise ConfigurationError(
                f"slot {slot.index} ({slot.field.category}) is unmapped and has "
                f"no zero-fill directive")
        target = mapping[slot.index]
        if target == ZERO_FILL:
            new_slots.append(GFSlot(slot.index, ZeroField(slot.polarity),
                                    slot.polarity))
        elif target is slot.field or target == "keep":
            new_slots.append(slot)
        else:
            new_slots.append(GFSlot(slot.index, target, target.polarity))
    return GFRepresentation(rep.role, tuple(new_slots), rep.include_self_velocity)


def save_manifest(path, rep, shaping, field_paths):
    """Manifest: ordered slot list with checkpoint paths, polarity, flags."""
    slots = []
    for slot in rep.slots:
        if slot.is_zero:
            slots.append({"category": ZERO_FILL, "polarity": slot.polarity,
                          "path": None})
        else:
            slots.append({"category": slot.field.category,
                          "polarity": slot.polarity,
                          "path": str(field_paths[slot.index])})
    doc = {
        "kind": "representation",
        "role": rep.role,
        "include_self_velocity": rep.include_self_velocity,
        "shaping": {"lambda": shaping.lam, "enabled": shaping.enabled},
        "slots": slots,
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def load_manifest(path):
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    if doc.get("kind") != "representation":
        raise ConfigurationError(f"{path} is not a representation manifest")
    slots = []
    for i, entry in enumerate(doc["slots"]):
        if entry["category"] == ZERO_FILL:
            slots.append(GFSlot(i, ZeroField(entry["polarity"]), entry["polarity"]))
        else:
            field, _ = load_field(entry["path"])
            slots.append(GFSlot(i, field, field.polarity))
    rep = GFRepresentation(doc["role"], tuple(slots), doc["include_self_velocity"])
    shaping = ShapingConfig(doc["shaping"]["lambda"], doc["shaping"]["enabled"])
    return rep, shaping
