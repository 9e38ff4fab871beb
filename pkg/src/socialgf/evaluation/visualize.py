"""Field quiver grids and episode frame dumps.

Frames go out as line-delimited JSON records (timestep, entity states,
events), enough to reconstruct a rollout; PNG rasterization via matplotlib
is optional. Colors follow the games' legend: wolves red, sheep blue,
grass green, obstacles gray, landmarks black (team-colored in the color
variants).
"""

import json

import numpy as np

from socialgf.errors import UsageError
from socialgf.evaluation.metrics import ScriptedRoleActor, role_rows
from socialgf.marl.policy import sample_action
from socialgf.marl.rollout import role_members
from socialgf.scorefield import eval_field
from socialgf.world import reset, step
from socialgf.world.scenario import (
    GRASS, GREEN, KIND_NAMES, LANDMARK, NAV_AGENT, OBSTACLE, RED, SHEEP, WOLF,
)

ENTITY_COLORS = {WOLF: "red", SHEEP: "blue", GRASS: "green",
                 OBSTACLE: "gray", LANDMARK: "black", NAV_AGENT: "purple"}
TEAM_COLORS = {RED: "red", GREEN: "green"}


def entity_color(kind, color):
    if color in TEAM_COLORS:
        return TEAM_COLORS[color]
    return ENTITY_COLORS[int(kind)]


def field_quiver(field, scene_rel_entities, slot_kinds, half_width,
                 grid_size=40):
    """Probe the field on a grid of agent positions.

    scene_rel_entities: absolute 2D positions of the non-agent entities in
    slot order. Returns rows (x, y, gx, gy) as an (grid^2, 4) array.
    """
    entities = np.asarray(scene_rel_entities, dtype=np.float64)
    if entities.shape[0] != len(slot_kinds):
        raise UsageError("scene entity count must match the slot kinds")
    axis = np.linspace(-half_width, half_width, grid_size)
    xs, ys = np.meshgrid(axis, axis)
    probes = np.stack([xs.ravel(), ys.ravel()], axis=1)
    rel = entities[None, :, :] - probes[:, None, :]
    grads = eval_field(field, rel, slot_kinds)
    return np.concatenate([probes, grads], axis=1)


def quiver_to_tsv(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        f.write("x\ty\tgx\tgy\n")
        for x, y, gx, gy in rows:
            f.write(f"{x:.6f}\t{y:.6f}\t{gx:.6f}\t{gy:.6f}\n")


def _frame_record(state, events):
    return {
        "t": state.t,
        "entities": [
            {"kind": KIND_NAMES[int(k)], "color": entity_color(k, c),
             "pos": [float(p[0]), float(p[1])],
             "vel": [float(v[0]), float(v[1])], "radius": float(r)}
            for k, c, p, v, r in zip(state.kind, state.color, state.pos,
                                     state.vel, state.radius)
        ],
        "events": [{"kind": ev.kind, "participants": list(ev.participants)}
                   for ev in events],
    }


def render_frames(config, actors, seed, out_path, horizon=None, png_dir=None):
    """Play one deterministic episode and dump one JSON line per step.
    Returns the frame count. png_dir, when given, also rasterizes frames."""
    members = role_members(config)
    rows = role_rows(config)
    horizon = horizon or config.episode_length
    state = reset(config, seed)
    scripted_rng = np.random.default_rng(seed)
    frames = []
    frames.append(_frame_record(state, []))
    for _ in range(horizon):
        actions = np.zeros((config.n_movable, 2))
        for role, actor in actors.items():
            if isinstance(actor, ScriptedRoleActor):
                actions[rows[role]] = actor.behavior.act(state, scripted_rng)[rows[role]]
                continue
            idxs = members[role]
            obs = actor.provider.observe_batch([state] * len(idxs),
                                               [int(i) for i in idxs])
            act, _, _ = sample_action(actor.policy, obs, None, deterministic=True)
            actions[rows[role]] = act
        state, events = step(state, actions)
        frames.append(_frame_record(state, events))
    with open(out_path, "w", encoding="utf-8") as f:
        for frame in frames[1:]:
            f.write(json.dumps(frame, sort_keys=True) + "\n")
    if png_dir is not None:
        _rasterize(config, frames[1:], png_dir)
    return len(frames) - 1


def _rasterize(config, frames, png_dir):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    from pathlib import Path
    png_dir = Path(png_dir)
    png_dir.mkdir(parents=True, exist_ok=True)
    hw = config.half_width
    for frame in frames:
        fig, ax = plt.subplots(figsize=(4, 4))
        ax.set_xlim(-hw, hw)
        ax.set_ylim(-hw, hw)
        ax.set_aspect("equal")
        for ent in frame["entities"]:
            ax.add_patch(plt.Circle(ent["pos"], ent["radius"],
                                    color=ent["color"], alpha=0.8))
        ax.set_title(f"t = {frame['t']}")
        fig.savefig(png_dir / f"frame_{frame['t']:04d}.png", dpi=72)
        plt.close(fig)
