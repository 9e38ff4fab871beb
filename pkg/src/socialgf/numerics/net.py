"""Minimal dense-network kernel: affine stacks with relu/tanh, exact reverse pass.

Every network in this project is a stack of affine layers with one hidden
activation, optionally combined with mean-pooling over a set axis (see
mean_pool_forward). mlp_forward records a tape; backprop replays it exactly,
so gradients match finite differences to float64 precision.
"""

from dataclasses import dataclass, field

import numpy as np

from socialgf import backend
from socialgf.errors import ConfigurationError, UsageError

ACTIVATION_CODES = {
    "identity": backend.ACT_IDENTITY,
    "relu": backend.ACT_RELU,
    "tanh": backend.ACT_TANH,
}

# conventional init gains per hidden activation
HIDDEN_GAINS = {"relu": float(np.sqrt(2.0)), "tanh": 5.0 / 3.0, "identity": 1.0}


@dataclass(frozen=True)
class MLPSpec:
    """Layer widths (input, hidden..., output) plus activation tags."""

    widths: tuple
    activation: str = "relu"
    out_activation: str = "identity"

    def __post_init__(self):
        if len(self.widths) < 2:
            raise ConfigurationError("an MLP needs at least input and output widths")
        if any(int(w) <= 0 for w in self.widths):
            raise ConfigurationError(f"layer widths must be positive: {self.widths}")
        for tag in (self.activation, self.out_activation):
            if tag not in ACTIVATION_CODES:
                raise ConfigurationError(
                    f"activation {tag!r} not in {sorted(ACTIVATION_CODES)}")
        object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))

    @property
    def n_layers(self):
        return len(self.widths) - 1

    @property
    def in_width(self):
        return self.widths[0]

    @property
    def out_width(self):
        return self.widths[-1]


@dataclass
class ParamStore:
    """Named parameters of one network. version bumps on every optimizer step,
    invalidating tapes recorded against older parameter values."""

    spec: MLPSpec
    params: dict
    version: int = 0

    def __post_init__(self):
        expected = {}
        for i in range(self.spec.n_layers):
            expected[f"w{i}"] = (self.spec.widths[i], self.spec.widths[i + 1])
            expected[f"b{i}"] = (self.spec.widths[i + 1],)
        if set(self.params) != set(expected):
            raise ConfigurationError(
                f"parameter names {sorted(self.params)} do not match the "
                f"declared layers {sorted(expected)}")
        for name, shape in expected.items():
            arr = np.ascontiguousarray(self.params[name], dtype=np.float64)
            if arr.shape != shape:
                raise ConfigurationError(
                    f"parameter {name} has shape {arr.shape}, expected {shape}")
            self.params[name] = arr

    def bump(self):
        self.version += 1

    def copy(self):
        return ParamStore(self.spec, {k: v.copy() for k, v in self.params.items()},
                          self.version)


@dataclass
class Tape:
    """Activation record of one forward pass, consumed by backprop."""

    store: ParamStore
    version: int
    inputs: list = field(default_factory=list)   # input to each affine layer
    preacts: list = field(default_factory=list)  # pre-activation of each layer
    squeezed: bool = False


def orthogonal_init(shape, gain, rng):
    """Orthogonal(-ish) matrix scaled by gain; rows or columns orthonormal."""
    rows, cols = shape
    a = rng.standard_normal((max(rows, cols), min(rows, cols)))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    if rows < cols:
        q = q.T
    return gain * q[:rows, :cols]


def init_mlp(spec, rng, out_gain=1.0):
    """Fresh ParamStore: orthogonal weights (hidden gain per activation,
    configurable output gain), zero biases."""
    hidden_gain = HIDDEN_GAINS[spec.activation]
    params = {}
    for i in range(spec.n_layers):
        gain = out_gain if i == spec.n_layers - 1 else hidden_gain
        params[f"w{i}"] = orthogonal_init((spec.widths[i], spec.widths[i + 1]), gain, rng)
        params[f"b{i}"] = np.zeros(spec.widths[i + 1])
    return ParamStore(spec, params)


def _as_batch(x, width, what):
    x = np.ascontiguousarray(x, dtype=np.float64)
    squeezed = x.ndim == 1
    if squeezed:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != width:
        raise ConfigurationError(
            f"{what} must have width {width}, got shape {x.shape}")
    return x, squeezed


def mlp_forward(store, x):
    """Run the network on x of shape (n,) or (B, n). Returns (output, tape)."""
    spec = store.spec
    h, squeezed = _as_batch(x, spec.in_width, "input")
    tape = Tape(store=store, version=store.version, squeezed=squeezed)
    for i in range(spec.n_layers):
        tape.inputs.append(h)
        z = backend.affine_forward(h, store.params[f"w{i}"], store.params[f"b{i}"])
        tape.preacts.append(z)
        tag = spec.out_activation if i == spec.n_layers - 1 else spec.activation
        h = backend.act_forward(ACTIVATION_CODES[tag], z)
    out = h[0] if squeezed else h
    return out, tape


def backprop(store, tape, upstream):
    """Exact reverse pass. Returns (parameter gradients, input gradient)."""
    if tape.store is not store:
        raise UsageError("tape was recorded against a different ParamStore")
    if tape.version != store.version:
        raise UsageError(
            "stale tape: parameters changed since the forward pass "
            f"(tape v{tape.version}, store v{store.version})")
    spec = store.spec
    g = np.ascontiguousarray(upstream, dtype=np.float64)
    if tape.squeezed:
        if g.shape != (spec.out_width,):
            raise UsageError(
                f"upstream shape {g.shape} does not match output ({spec.out_width},)")
        g = g[None, :]
    elif g.shape != tape.preacts[-1].shape:
        raise UsageError(
            f"upstream shape {g.shape} does not match output "
            f"{tape.preacts[-1].shape}")
    grads = {}
    for i in range(spec.n_layers - 1, -1, -1):
        tag = spec.out_activation if i == spec.n_layers - 1 else spec.activation
        gz = backend.act_backward(ACTIVATION_CODES[tag], tape.preacts[i], g)
        gz = np.ascontiguousarray(gz)
        g, gw, gb = backend.affine_backward(tape.inputs[i], store.params[f"w{i}"], gz)
        grads[f"w{i}"] = gw
        grads[f"b{i}"] = gb
    gx = g[0] if tape.squeezed else g
    return grads, gx


def mean_pool_forward(x):
    """Mean over the set axis of x (B, m, F) -> (B, F)."""
    return x.mean(axis=1)


def mean_pool_backward(g, m):
    """Spread pooled gradient g (B, F) back over m set slots -> (B, m, F)."""
    return np.repeat(g[:, None, :], m, axis=1) / float(m)
