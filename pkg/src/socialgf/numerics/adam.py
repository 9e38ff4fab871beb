"""Bias-corrected Adam over a dict of named parameter arrays."""

from dataclasses import dataclass, field

import numpy as np

from socialgf import backend
from socialgf.errors import TrainingError, UsageError


@dataclass
class AdamState:
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adam_init(params, lr, betas=(0.9, 0.999), eps=1e-8):
    state = AdamState(lr=float(lr), beta1=float(betas[0]), beta2=float(betas[1]),
                      eps=float(eps))
    state.m = {k: np.zeros_like(p) for k, p in params.items()}
    state.v = {k: np.zeros_like(p) for k, p in params.items()}
    return state


def adam_step(params, grads, state):
    """Apply one Adam update in place. Gradients must be finite and match shapes."""
    if set(grads) != set(params):
        raise UsageError(
            f"gradient names {sorted(grads)} do not match parameters {sorted(params)}")
    for name, g in grads.items():
        if g.shape != params[name].shape:
            raise UsageError(
                f"gradient for {name} has shape {g.shape}, parameter is "
                f"{params[name].shape}")
        if not np.all(np.isfinite(g)):
            raise TrainingError(f"non-finite gradient for parameter {name!r}")
    state.step += 1
    for name in params:
        backend.adam_update(params[name], np.ascontiguousarray(grads[name]),
                            state.m[name], state.v[name], state.step,
                            state.lr, state.beta1, state.beta2, state.eps)


def adam_step_store(store, grads, state):
    """adam_step over a ParamStore, bumping its version so old tapes go stale."""
    adam_step(store.params, grads, state)
    store.bump()
