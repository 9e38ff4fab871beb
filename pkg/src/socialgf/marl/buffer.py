"""Rollout storage and generalized advantage estimation."""

from dataclasses import dataclass

import numpy as np

from socialgf import backend
from socialgf.errors import UsageError


@dataclass
class RolloutBuffer:
    """Horizon-major arrays for one role: T steps of B = n_envs * n_agents
    parallel streams."""

    obs: np.ndarray        # (T, B, w)
    actions: np.ndarray    # (T, B, 2)
    logp: np.ndarray       # (T, B)
    rewards: np.ndarray    # (T, B)
    values: np.ndarray     # (T, B)
    dones: np.ndarray      # (T, B) floats in {0, 1}
    last_values: np.ndarray   # (B,)
    advantages: np.ndarray = None
    returns: np.ndarray = None

    @property
    def horizon(self):
        return self.obs.shape[0]

    @property
    def n_streams(self):
        return self.obs.shape[1]


def allocate_buffer(horizon, n_streams, obs_width):
    z = lambda *shape: np.zeros(shape)
    return RolloutBuffer(
        obs=z(horizon, n_streams, obs_width),
        actions=z(horizon, n_streams, 2),
        logp=z(horizon, n_streams),
        rewards=z(horizon, n_streams),
        values=z(horizon, n_streams),
        dones=z(horizon, n_streams),
        last_values=z(n_streams),
    )


def compute_gae(buf, gamma, gae_lambda):
    """Fill advantages/returns. dones mask bootstrapping across episode ends;
    the stream after the horizon bootstraps from last_values."""
    if buf.values is None or buf.rewards.shape != buf.values.shape:
        raise UsageError("buffer must hold rewards and values of equal shape")
    adv = backend.gae_scan(
        np.ascontiguousarray(buf.rewards),
        np.ascontiguousarray(buf.values),
        np.ascontiguousarray(buf.dones),
        np.ascontiguousarray(buf.last_values),
        float(gamma), float(gae_lambda))
    buf.advantages = adv
    buf.returns = adv + buf.values
    return buf


def normalize_advantages(adv):
    """Batch-standardized advantages (zero mean, unit std when size > 1)."""
    adv = np.asarray(adv, dtype=np.float64)
    if adv.size <= 1:
        return adv - adv.mean()
    return (adv - adv.mean()) / (adv.std() + 1e-8)
