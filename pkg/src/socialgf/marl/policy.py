"""Per-role actor/critic networks with a diagonal Gaussian action head.

Actors and critics are 2x64 tanh MLPs; the action mean layer starts at gain
0.01 and a global learnable log-std (initialized to 0) sets exploration.
Roles never share parameters. Values are learned against normalized returns
(running mean/std), and denormalized wherever a raw value is needed.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from socialgf.errors import UsageError
from socialgf.numerics import MLPSpec, init_mlp, mlp_forward

ACTION_DIM = 2
HIDDEN = 64
_LOG_2PI = math.log(2.0 * math.pi)


@dataclass
class ValueNorm:
    """Running mean/variance of returns (batch Welford merge)."""

    mean: float = 0.0
    var: float = 1.0
    count: float = 1e-4

    def update(self, batch):
        batch = np.asarray(batch, dtype=np.float64).reshape(-1)
        if batch.size == 0:
            return
        b_mean = float(batch.mean())
        b_var = float(batch.var())
        b_count = float(batch.size)
        delta = b_mean - self.mean
        total = self.count + b_count
        self.mean += delta * b_count / total
        m_a = self.var * self.count
        m_b = b_var * b_count
        self.var = (m_a + m_b + delta ** 2 * self.count * b_count / total) / total
        self.count = total

    @property
    def std(self):
        return math.sqrt(self.var + 1e-8)

    def normalize(self, x):
        return (x - self.mean) / self.std

    def denormalize(self, x):
        return x * self.std + self.mean


@dataclass
class RolePolicy:
    actor: object            # ParamStore: obs -> action mean
    log_std: np.ndarray      # (ACTION_DIM,)
    critic: object           # ParamStore: obs -> normalized value
    value_norm: ValueNorm = field(default_factory=ValueNorm)

    @property
    def obs_width(self):
        return self.actor.spec.in_width

    def copy(self):
        return RolePolicy(self.actor.copy(), self.log_std.copy(),
                          self.critic.copy(),
                          ValueNorm(self.value_norm.mean, self.value_norm.var,
                                    self.value_norm.count))


def init_role_policy(obs_width, rng):
    actor = init_mlp(MLPSpec((obs_width, HIDDEN, HIDDEN, ACTION_DIM), "tanh"),
                     rng, out_gain=0.01)
    critic = init_mlp(MLPSpec((obs_width, HIDDEN, HIDDEN, 1), "tanh"), rng)
    return RolePolicy(actor, np.zeros(ACTION_DIM), critic)


def _check_obs(policy, obs):
    obs = np.asarray(obs, dtype=np.float64)
    single = obs.ndim == 1
    if single:
        obs = obs[None, :]
    if obs.shape[1] != policy.obs_width:
        raise UsageError(
            f"observation width {obs.shape[1]} does not match the actor input "
            f"({policy.obs_width})")
    return np.ascontiguousarray(obs), single


def gaussian_logp(actions, mean, log_std):
    """Log density of the pre-clip sample under the diagonal Gaussian."""
    std = np.exp(log_std)
    z = (actions - mean) / std
    return -0.5 * (z ** 2).sum(axis=-1) - log_std.sum() - 0.5 * ACTION_DIM * _LOG_2PI


def sample_action(policy, obs, rng, deterministic=False, return_raw=False):
    """Draw (action, log-prob, value). Actions clip to [-1, 1]^2; the log-prob
    belongs to the pre-clip sample. deterministic=True returns the mean.

    return_raw=True appends the pre-clip sample; PPO must evaluate ratios on
    it, not on the clipped action, or saturated samples corrupt the update.
    """
    obs, single = _check_obs(policy, obs)
    mean, _ = mlp_forward(policy.actor, obs)
    if deterministic:
        pre = mean
    else:
        pre = mean + np.exp(policy.log_std) * rng.standard_normal(mean.shape)
    logp = gaussian_logp(pre, mean, policy.log_std)
    action = np.clip(pre, -1.0, 1.0)
    vnorm, _ = mlp_forward(policy.critic, obs)
    value = policy.value_norm.denormalize(vnorm[:, 0])
    if single:
        out = (action[0], float(logp[0]), float(value[0]))
        return out + ((pre[0],) if return_raw else ())
    return (action, logp, value) + ((pre,) if return_raw else ())


def policy_entropy(policy):
    """Entropy of the diagonal Gaussian (state independent)."""
    return float(np.sum(policy.log_std + 0.5 * (_LOG_2PI + 1.0)))
