"""Clipped-surrogate PPO update over one role's rollout buffer.

Gradients flow through the numerics tapes: the actor gets the clipped
policy-gradient signal plus the entropy bonus on its global log-std, the
critic regresses normalized returns. Both get global-norm clipping and
their own Adam state, so roles stay fully isolated.
"""

from dataclasses import dataclass

import numpy as np

from socialgf.errors import ConfigurationError, TrainingError
from socialgf.numerics import adam_init, adam_step, backprop, mlp_forward
from socialgf.marl.buffer import normalize_advantages
from socialgf.marl.policy import gaussian_logp, policy_entropy


@dataclass(frozen=True)
class PPOConfig:
    lr: float = 7e-4
    opt_eps: float = 1e-5
    clip_ratio: float = 0.2
    gamma: float = 0.99
    gae_lambda: float = 0.95
    entropy_coef: float = 0.01
    value_coef: float = 0.5
    epochs: int = 10
    minibatches: int = 1
    n_envs: int = 32
    horizon: int = 100
    max_grad_norm: float = 0.5
    total_steps: int = 500_000

    def __post_init__(self):
        if not (0.0 < self.gamma <= 1.0):
            raise ConfigurationError("need 0 < gamma <= 1")
        if not (0.0 <= self.gae_lambda <= 1.0):
            raise ConfigurationError("need 0 <= gae_lambda <= 1")
        if self.clip_ratio <= 0:
            raise ConfigurationError("clip_ratio must be positive")
        if min(self.epochs, self.minibatches, self.n_envs, self.horizon) < 1:
            raise ConfigurationError("epochs/minibatches/n_envs/horizon must be >= 1")

    def to_dict(self):
        return {k: getattr(self, k) for k in (
            "lr", "opt_eps", "clip_ratio", "gamma", "gae_lambda", "entropy_coef",
            "value_coef", "epochs", "minibatches", "n_envs", "horizon",
            "max_grad_norm", "total_steps")}


def make_optimizers(policy, cfg):
    actor_params = dict(policy.actor.params)
    actor_params["log_std"] = policy.log_std
    return {
        "actor": adam_init(actor_params, lr=cfg.lr, eps=cfg.opt_eps),
        "critic": adam_init(policy.critic.params, lr=cfg.lr, eps=cfg.opt_eps),
    }


def clip_grad_norm(grads, max_norm):
    total = float(np.sqrt(sum(float((g ** 2).sum()) for g in grads.values())))
    if max_norm > 0 and total > max_norm:
        scale = max_norm / (total + 1e-12)
        for g in grads.values():
            g *= scale
    return total


def ppo_update(policy, buf, cfg, opts, rng):
    """Run cfg.epochs passes over the buffer. Returns update statistics."""
    if buf.advantages is None:
        raise ConfigurationError("compute_gae must run before ppo_update")
    N = buf.horizon * buf.n_streams
    obs = np.ascontiguousarray(buf.obs.reshape(N, -1))
    actions = buf.actions.reshape(N, -1)
    old_logp = buf.logp.reshape(N)
    advantages = normalize_advantages(buf.advantages.reshape(N))
    returns = buf.returns.reshape(N)

    policy.value_norm.update(returns)
    targets = policy.value_norm.normalize(returns)

    eps = cfg.clip_ratio
    stats = {"pi_loss": 0.0, "v_loss": 0.0, "entropy": 0.0,
             "clip_frac": 0.0, "approx_kl": 0.0}
    n_batches = 0
    for _ in range(cfg.epochs):
        order = rng.permutation(N) if cfg.minibatches > 1 else np.arange(N)
        for chunk in np.array_split(order, cfg.minibatches):
            if chunk.size == 0:
                continue
            o = np.ascontiguousarray(obs[chunk])
            a = actions[chunk]
            adv = advantages[chunk]
            n = chunk.size

            mean, actor_tape = mlp_forward(policy.actor, o)
            std = np.exp(policy.log_std)
            zscore = (a - mean) / std
            logp = gaussian_logp(a, mean, policy.log_std)
            ratio = np.exp(logp - old_logp[chunk])
            surr1 = ratio * adv
            surr2 = np.clip(ratio, 1.0 - eps, 1.0 + eps) * adv
            pi_loss = -float(np.mean(np.minimum(surr1, surr2)))
            entropy = policy_entropy(policy)
            if not np.isfinite(pi_loss):
                raise TrainingError(
                    f"non-finite policy loss (ratio range [{ratio.min():.3g}, "
                    f"{ratio.max():.3g}], adv range [{adv.min():.3g}, "
                    f"{adv.max():.3g}])")

            # gradient flows where min() picks the unclipped branch, or the
            # clip is inactive (then both branches agree)
            active = (surr1 <= surr2) | ((ratio > 1.0 - eps) & (ratio < 1.0 + eps))
            dlogp = -(adv * ratio * active) / n
            g_mean = dlogp[:, None] * (zscore / std)
            g_logstd = (dlogp[:, None] * (zscore ** 2 - 1.0)).sum(axis=0)
            g_logstd -= cfg.entropy_coef  # d(-coef * H)/d(log_std) = -coef
            actor_grads, _ = backprop(policy.actor, actor_tape,
                                      np.ascontiguousarray(g_mean))
            actor_grads["log_std"] = g_logstd
            clip_grad_norm(actor_grads, cfg.max_grad_norm)
            actor_params = dict(policy.actor.params)
            actor_params["log_std"] = policy.log_std
            adam_step(actor_params, actor_grads, opts["actor"])
            policy.actor.bump()

            vpred, critic_tape = mlp_forward(policy.critic, o)
            vpred = vpred[:, 0]
            v_err = vpred - targets[chunk]
            v_loss = 0.5 * float(np.mean(v_err ** 2))
            g_v = (cfg.value_coef * v_err / n)[:, None]
            critic_grads, _ = backprop(policy.critic, critic_tape,
                                       np.ascontiguousarray(g_v))
            clip_grad_norm(critic_grads, cfg.max_grad_norm)
            adam_step(policy.critic.params, critic_grads, opts["critic"])
            policy.critic.bump()

            stats["pi_loss"] += pi_loss
            stats["v_loss"] += v_loss
            stats["entropy"] += entropy
            stats["clip_frac"] += float(np.mean(np.abs(ratio - 1.0) > eps))
            stats["approx_kl"] += float(np.mean(old_logp[chunk] - logp))
            n_batches += 1

    for k in stats:
        stats[k] /= max(n_batches, 1)
    return stats
