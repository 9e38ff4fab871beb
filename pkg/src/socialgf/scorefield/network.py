"""Permutation-equivariant set network over entity configurations.

Each entity slot carries (relative position, slot-kind one-hot, time
features). A shared embedder lifts slots to width 64, a mean-pool over
slots gives the context, and a shared head maps (slot embedding, context)
to a 2D output per slot. Permuting same-kind slots permutes the outputs
accordingly, so any pooled readout over slots is permutation invariant.

The head output is the denoised slot estimate D(x, t); the score is read
out as s = (D - x) / sigma(t)^2. This parameterization leaves the DSM
optimum untouched but keeps far-from-data evaluations sane: D stays near
the clean-configuration manifold, so the score degrades into a strong pull
toward the data instead of unconstrained extrapolation noise.

The agent's own gradient is the negative sum of slot scores: records hold
entity-minus-agent coordinates, so moving the agent by delta shifts every
slot by -delta, and the chain rule turns the full record score into
-sum(slots).
"""

from dataclasses import dataclass

import numpy as np

from socialgf.errors import ConfigurationError, UsageError
from socialgf.numerics import (
    MLPSpec, ParamStore, backprop, init_mlp, mlp_forward,
)

EMBED_WIDTH = 64
HEAD_HIDDEN = 64


@dataclass
class ScoreNetwork:
    kinds: tuple            # slot-kind vocabulary, fixes the one-hot layout
    embedder: ParamStore    # (2 + K + 3) -> 64, relu output
    head: ParamStore        # 128 -> 64 -> 64 -> 2

    @property
    def feature_width(self):
        return 2 + len(self.kinds) + 3


def init_score_network(kinds, rng, hidden=HEAD_HIDDEN):
    kinds = tuple(kinds)
    if not kinds:
        raise ConfigurationError("a score network needs at least one slot kind")
    feat = 2 + len(kinds) + 3
    embedder = init_mlp(MLPSpec((feat, EMBED_WIDTH), "relu", out_activation="relu"),
                        rng)
    head = init_mlp(MLPSpec((2 * EMBED_WIDTH, hidden, hidden, 2), "relu"), rng)
    return ScoreNetwork(kinds, embedder, head)


def kind_onehots(net, slot_kinds):
    """(m, K) one-hot rows for a record's slot kinds; unknown kinds are a
    layout mismatch."""
    index = {k: i for i, k in enumerate(net.kinds)}
    m = len(slot_kinds)
    out = np.zeros((m, len(net.kinds)))
    for row, kind in enumerate(slot_kinds):
        if kind not in index:
            raise UsageError(
                f"slot kind {kind!r} is outside this field's vocabulary "
                f"{net.kinds}")
        out[row, index[kind]] = 1.0
    return out


def time_features(schedule, t):
    """Per-sample (t, sigma, 1/sigma) conditioning, shape (B, 3)."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    sigma = schedule.sigma(t)
    return np.stack([t, sigma, 1.0 / sigma], axis=1)


def score_forward(net, rel, onehots, tfeat):
    """Per-slot scores for rel (B, m, 2). Returns (scores (B, m, 2), tape).

    tfeat rows are (t, sigma, 1/sigma); the sigma column drives the denoiser
    readout s = (D - rel) / sigma^2.
    """
    B, m, _ = rel.shape
    feats = np.concatenate([
        rel,
        np.broadcast_to(onehots[None, :, :], (B, m, onehots.shape[1])),
        np.broadcast_to(tfeat[:, None, :], (B, m, 3)),
    ], axis=2)
    flat = np.ascontiguousarray(feats.reshape(B * m, net.feature_width))
    emb_flat, emb_tape = mlp_forward(net.embedder, flat)
    emb = emb_flat.reshape(B, m, EMBED_WIDTH)
    ctx = emb.mean(axis=1)
    head_in = np.concatenate(
        [emb, np.broadcast_to(ctx[:, None, :], (B, m, EMBED_WIDTH))], axis=2)
    head_flat = np.ascontiguousarray(head_in.reshape(B * m, 2 * EMBED_WIDTH))
    out_flat, head_tape = mlp_forward(net.head, head_flat)
    denoised = out_flat.reshape(B, m, 2)
    inv_sigma2 = (tfeat[:, 2] ** 2)[:, None, None]
    scores = (denoised - rel) * inv_sigma2
    tape = {"emb_tape": emb_tape, "head_tape": head_tape, "B": B, "m": m,
            "inv_sigma2": inv_sigma2}
    return scores, tape


def score_backward(net, tape, upstream):
    """Parameter gradients for a loss with d(loss)/d(scores) = upstream."""
    B, m = tape["B"], tape["m"]
    up_denoised = upstream * tape["inv_sigma2"]
    up_flat = np.ascontiguousarray(up_denoised.reshape(B * m, 2))
    head_grads, g_head_in = backprop(net.head, tape["head_tape"], up_flat)
    g_head_in = g_head_in.reshape(B, m, 2 * EMBED_WIDTH)
    g_emb = g_head_in[:, :, :EMBED_WIDTH]
    g_ctx = g_head_in[:, :, EMBED_WIDTH:].sum(axis=1)   # ctx feeds every slot
    g_emb = g_emb + g_ctx[:, None, :] / m               # mean-pool backward
    emb_grads, _ = backprop(net.embedder, tape["emb_tape"],
                            np.ascontiguousarray(g_emb.reshape(B * m, EMBED_WIDTH)))
    grads = {f"emb/{k}": v for k, v in emb_grads.items()}
    grads.update({f"head/{k}": v for k, v in head_grads.items()})
    return grads


def network_params(net):
    """Merged name->array view of all trainable parameters."""
    out = {f"emb/{k}": v for k, v in net.embedder.params.items()}
    out.update({f"head/{k}": v for k, v in net.head.params.items()})
    return out


def bump_network(net):
    net.embedder.bump()
    net.head.bump()
