"""Pure-numpy kernels. Reference implementation for the compiled backend.

Every function here has a bit-for-bit deterministic result for fixed inputs.
Shapes follow the conventions used by the numerics module: batches are the
leading axis, feature vectors are rows, weights are (in, out).
"""

import numpy as np

ACT_IDENTITY = 0
ACT_RELU = 1
ACT_TANH = 2


def affine_forward(x, w, b):
    """y = x @ w + b for x (B, n), w (n, m), b (m,)."""
    return x @ w + b


def affine_backward(x, w, gy):
    """Gradients of y = x @ w + b. Returns (gx, gw, gb)."""
    gx = gy @ w.T
    gw = x.T @ gy
    gb = gy.sum(axis=0)
    return gx, gw, gb


def act_forward(code, z):
    if code == ACT_IDENTITY:
        return z.copy()
    if code == ACT_RELU:
        return np.maximum(z, 0.0)
    if code == ACT_TANH:
        return np.tanh(z)
    raise ValueError(f"unknown activation code {code}")


def act_backward(code, z, ga):
    """dL/dz given dL/da and the pre-activation z."""
    if code == ACT_IDENTITY:
        return ga.copy()
    if code == ACT_RELU:
        return ga * (z > 0.0)
    if code == ACT_TANH:
        t = np.tanh(z)
        return ga * (1.0 - t * t)
    raise ValueError(f"unknown activation code {code}")


def adam_update(p, g, m, v, t, lr, beta1, beta2, eps):
    """One bias-corrected Adam step, in place on p, m, v. t is the 1-based step."""
    m *= beta1
    m += (1.0 - beta1) * g
    v *= beta2
    v += (1.0 - beta2) * (g * g)
    mhat = m / (1.0 - beta1 ** t)
    vhat = v / (1.0 - beta2 ** t)
    p -= lr * mhat / (np.sqrt(vhat) + eps)


def gae_scan(rewards, values, dones, last_values, gamma, lam):
    """Generalized advantage estimates over (T, B) arrays.

    dones[t] marks the step that ends an episode; no bootstrap happens
    across it. last_values bootstraps the step after the horizon when the
    final step was not terminal.
    """
    T, B = rewards.shape
    advantages = np.zeros((T, B), dtype=np.float64)
    gae = np.zeros(B, dtype=np.float64)
    for t in range(T - 1, -1, -1):
        nonterminal = 1.0 - dones[t]
        next_values = last_values if t == T - 1 else values[t + 1]
        delta = rewards[t] + gamma * next_values * nonterminal - values[t]
        gae = delta + gamma * lam * nonterminal * gae
        advantages[t] = gae
    return advantages


def overlap_pairs(pos, radii, active):
    """Indices (i, j) with i < j, both active, and center distance < r_i + r_j."""
    n = pos.shape[0]
    out = []
    for i in range(n):
        if not active[i]:
            continue
        for j in range(i + 1, n):
            if not active[j]:
                continue
            dx = pos[i, 0] - pos[j, 0]
            dy = pos[i, 1] - pos[j, 1]
            r = radii[i] + radii[j]
            if dx * dx + dy * dy < r * r:
                out.append((i, j))
    if not out:
        return np.empty((0, 2), dtype=np.int64)
    return np.asarray(out, dtype=np.int64)
