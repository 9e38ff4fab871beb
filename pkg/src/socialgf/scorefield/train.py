"""Denoising score matching over example sets.

The training target comes from the Gaussian perturbation kernel: perturb a
record x to x~ = x + sigma(t) z and regress the score network onto
(x - x~) / sigma(t)^2, weighting each sample by sigma(t)^2 with t drawn
uniformly from [t_min, t_max]. A fixed-noise mode (single sigma) exists for
tests where the optimum is known in closed form.
"""

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from socialgf.errors import ConfigurationError, TrainingError
from socialgf.numerics import adam_init, adam_step
from socialgf.scorefield.field import GradientField
from socialgf.scorefield.network import (
    bump_network, init_score_network, kind_onehots, network_params,
    score_backward, score_forward, time_features,
)
from socialgf.scorefield.schedule import NoiseSchedule

_DIVERGENCE_FACTOR = 1e3
_DIVERGENCE_PATIENCE = 1000


@dataclass(frozen=True)
class GFTrainConfig:
    lr: float = 2e-4
    betas: tuple = (0.5, 0.999)
    batch_size: int = 256
    steps: int = 20000
    hidden: int = 64
    schedule: NoiseSchedule = dataclass_field(default_factory=NoiseSchedule)
    t_eval: float = 0.01
    ema_decay: float = 0.999   # evaluation weights; 0 disables averaging
    log_every: int = 100

    def to_dict(self):
        return {"lr": self.lr, "betas": list(self.betas),
                "batch_size": self.batch_size, "steps": self.steps,
                "hidden": self.hidden, "schedule": self.schedule.to_dict(),
                "t_eval": self.t_eval, "ema_decay": self.ema_decay}


def perturb(record, t, rng, schedule):
    """Gaussian-perturb record(s): returns (x~, target (x - x~) / sigma^2).

    record may be (d,) or (B, d); t a scalar or (B,). Noise is standard
    normal per coordinate, scaled by sigma(t).
    """
    x = np.asarray(record, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    t = np.broadcast_to(np.asarray(t, dtype=np.float64), (x.shape[0],))
    sigma = schedule.sigma(t)[:, None]
    z = rng.standard_normal(x.shape)
    noisy = x + sigma * z
    target = (x - noisy) / sigma ** 2
    if single:
        return noisy[0], target[0]
    return noisy, target


def dsm_loss(net, batch, slot_kinds, schedule, rng, fixed_t=None):
    """Weighted DSM loss over a batch (B, d) plus parameter gradients.

    fixed_t pins every sample to one noise level (the fixed-noise objective);
    otherwise t ~ U(t_min, t_max) per sample.
    """
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[0] == 0:
        raise ConfigurationError("dsm_loss needs a non-empty (B, d) batch")
    B = batch.shape[0]
    m = len(slot_kinds)
    if batch.shape[1] != 2 * m:
        raise ConfigurationError(
            f"batch width {batch.shape[1]} does not match layout of {m} slots")
    if fixed_t is None:
        t = schedule.sample_t(rng, B)
    else:
        t = np.full(B, float(fixed_t))
    noisy, target = perturb(batch, t, rng, schedule)
    weights = schedule.weight(t)

    onehots = kind_onehots(net, slot_kinds)
    tfeat = time_features(schedule, t)
    scores, tape = score_forward(net, noisy.reshape(B, m, 2), onehots, tfeat)
    resid = scores - target.reshape(B, m, 2)
    per_sample = (resid ** 2).sum(axis=(1, 2))
    loss = float(np.mean(weights * per_sample))
    if not np.isfinite(loss):
        raise TrainingError(
            f"non-finite DSM loss (batch min {batch.min():.3g}, "
            f"max {batch.max():.3g}, t range [{t.min():.3g}, {t.max():.3g}])")
    upstream = (2.0 / B) * weights[:, None, None] * resid
    grads = score_backward(net, tape, upstream)
    return loss, grads


def train_gf(example_set, config, seed):
    """Fit a gradient field to one example set. Returns (field, curve) with
    curve rows (step, smoothed loss)."""
    if example_set.n_records < 1:
        raise ConfigurationError(
            f"example set {example_set.category.name} is empty")
    records = example_set.records
    slot_kinds = example_set.slot_kinds
    root = np.random.SeedSequence(seed)
    init_rng = np.random.default_rng(root.spawn(1)[0])
    net = init_score_network(example_set.category.kinds, init_rng,
                             hidden=config.hidden)
    params = network_params(net)
    opt = adam_init(params, lr=config.lr, betas=config.betas)

    curve = []
    smoothed = None
    initial = None
    over_budget_streak = 0
    ema = {k: v.copy() for k, v in params.items()} if config.ema_decay else None
    for step_idx in range(config.steps):
        # per-step keyed stream: batch draws stay reproducible and independent
        rng = np.random.default_rng(np.random.SeedSequence((seed, step_idx)))
        idx = rng.integers(0, records.shape[0], size=min(config.batch_size,
                                                         records.shape[0]))
        loss, grads = dsm_loss(net, records[idx], slot_kinds, config.schedule, rng)
        adam_step(params, grads, opt)
        bump_network(net)
        if ema is not None:
            d = config.ema_decay
            for k, v in params.items():
                ema[k] *= d
                ema[k] += (1.0 - d) * v
        smoothed = loss if smoothed is None else 0.99 * smoothed + 0.01 * loss
        if initial is None:
            initial = max(smoothed, 1e-12)
        if smoothed > _DIVERGENCE_FACTOR * initial:
            over_budget_streak += 1
            if over_budget_streak >= _DIVERGENCE_PATIENCE:
                raise TrainingError(
                    f"DSM training diverged on {example_set.category.name}: "
                    f"loss {smoothed:.3g} vs initial {initial:.3g}")
        else:
            over_budget_streak = 0
        if step_idx % config.log_every == 0 or step_idx == config.steps - 1:
            curve.append((step_idx, smoothed))

    if ema is not None:
        for k in params:
            params[k][...] = ema[k]
        bump_network(net)
    field = GradientField(
        net=net,
        schedule=config.schedule,
        t_eval=config.t_eval,
        category=example_set.category.name,
        polarity=example_set.category.polarity,
        role=example_set.category.role,
        train_slot_kinds=slot_kinds,
    )
    return field, curve
