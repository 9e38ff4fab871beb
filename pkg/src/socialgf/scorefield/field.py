"""Trained gradient fields: evaluation, the analytic Gaussian oracle, and a
Langevin sampler kept purely as a diagnostic."""

from dataclasses import dataclass

import numpy as np

from socialgf.container import read_container, write_container
from socialgf.errors import ArtifactError, UsageError
from socialgf.numerics.checkpoint import store_arrays, store_from, store_meta
from socialgf.scorefield.network import (
    ScoreNetwork, kind_onehots, score_forward, time_features,
)
from socialgf.scorefield.schedule import NoiseSchedule


@dataclass
class GradientField:
    net: ScoreNetwork
    schedule: NoiseSchedule
    t_eval: float
    category: str
    polarity: str
    role: str
    train_slot_kinds: tuple = ()

    def __post_init__(self):
        if not (self.schedule.t_min <= self.t_eval <= self.schedule.t_max):
            raise ArtifactError(
                f"t_eval {self.t_eval} falls outside "
                f"[{self.schedule.t_min}, {self.schedule.t_max}]")


def _as_batch3(rel, what):
    rel = np.asarray(rel, dtype=np.float64)
    single = rel.ndim == 2
    if single:
        rel = rel[None, :, :]
    if rel.ndim != 3 or rel.shape[2] != 2:
        raise UsageError(f"{what} must have shape (m, 2) or (B, m, 2), got {rel.shape}")
    return rel, single


def field_score(field, rel, slot_kinds, t=None):
    """Raw per-slot scores s(record, t); shape follows the input batching."""
    rel, single = _as_batch3(rel, "configuration")
    if rel.shape[1] != len(slot_kinds):
        raise UsageError(
            f"configuration has {rel.shape[1]} slots but {len(slot_kinds)} "
            f"slot kinds were given")
    t = field.t_eval if t is None else float(t)
    onehots = kind_onehots(field.net, slot_kinds)
    tfeat = np.repeat(time_features(field.schedule, t), rel.shape[0], axis=0)
    scores, _ = score_forward(field.net, rel, onehots, tfeat)
    if not np.all(np.isfinite(scores)):
        raise ArtifactError(f"field {field.category} produced non-finite scores")
    return scores[0] if single else scores


def eval_field(field, rel, slot_kinds, t=None):
    """The beneficiary agent's 2D gradient: -sum over slot scores at t_eval.

    Accepts one configuration (m, 2) -> (2,) or a batch (B, m, 2) -> (B, 2).
    Slot counts may differ from training (the set network pools over slots);
    slot kinds must come from the field's vocabulary.
    """
    scores = field_score(field, rel, slot_kinds, t=t)
    return -scores.sum(axis=-2)


def analytic_gaussian_score(mean, data_var, schedule, t, x):
    """Score of N(mean, data_var I) after sigma(t) Gaussian smoothing:
    -(x - mean) / (data_var + sigma(t)^2), per coordinate."""
    if data_var <= 0:
        raise UsageError("data_var must be positive")
    sigma2 = float(schedule.sigma(t)) ** 2
    return -(np.asarray(x, dtype=np.float64) - np.asarray(mean)) / (data_var + sigma2)


def langevin_descend(field, start, slot_kinds, steps, step_size, rng):
    """Diagnostic Langevin iterates over full record space:
    x <- x + eta * s(x, t_eval) + sqrt(2 eta) z. Returns (steps+1, d)."""
    if steps < 1:
        raise UsageError("steps must be >= 1")
    x = np.asarray(start, dtype=np.float64).reshape(-1).copy()
    m = len(slot_kinds)
    if x.size != 2 * m:
        raise UsageError(f"start has {x.size} coordinates, layout needs {2 * m}")
    traj = np.zeros((steps + 1, x.size))
    traj[0] = x
    noise_scale = np.sqrt(2.0 * step_size)
    for k in range(steps):
        s = field_score(field, x.reshape(m, 2), slot_kinds).reshape(-1)
        x = x + step_size * s + noise_scale * rng.standard_normal(x.size)
        traj[k + 1] = x
    return traj


def save_field(path, field, extra_meta=None):
    meta = {
        "kind": "field",
        "category": field.category,
        "polarity": field.polarity,
        "role": field.role,
        "slot_vocabulary": list(field.net.kinds),
        "train_slot_kinds": list(field.train_slot_kinds),
        "schedule": field.schedule.to_dict(),
        "t_eval": field.t_eval,
        "embedder": store_meta(field.net.embedder),
        "head": store_meta(field.net.head),
    }
    if extra_meta:
        meta.update(extra_meta)
    arrays = store_arrays(field.net.embedder, "emb/")
    arrays.update(store_arrays(field.net.head, "head/"))
    write_container(path, meta, arrays)


def load_field(path):
    meta, arrays, _ = read_container(path)
    if meta.get("kind") != "field":
        raise ArtifactError(f"{path} is not a gradient-field checkpoint")
    net = ScoreNetwork(
        tuple(meta["slot_vocabulary"]),
        store_from(meta["embedder"], arrays, "emb/"),
        store_from(meta["head"], arrays, "head/"),
    )
    field = GradientField(
        net=net,
        schedule=NoiseSchedule(**meta["schedule"]),
        t_eval=float(meta["t_eval"]),
        category=meta["category"],
        polarity=meta["polarity"],
        role=meta["role"],
        train_slot_kinds=tuple(meta["train_slot_kinds"]),
    )
    return field, meta
