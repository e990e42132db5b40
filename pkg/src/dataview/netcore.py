"""Minimal dense feed-forward networks with input gradients.

The same machinery serves three roles: the blackbox target classifier,
the learner core of the original-data shadow baseline, and the body of
the per-class generators.  Everything is float64 numpy; the one unusual
requirement is the gradient of the loss with respect to the *input*,
which lets a generator be trained through a frozen classifier.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

ACTIVATIONS = ("relu", "tanh", "softmax", "linear")

PROB_CLAMP = 1e-12  # floor applied inside cross-entropy
MODEL_FORMAT_VERSION = 1


class DimensionError(ValueError):
    """Input shape incompatible with the network."""


class TrainingError(RuntimeError):
    """Training aborted (NaN loss, empty data, bad config)."""


class ModelFormatError(ValueError):
    """Malformed or unsupported model blob."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


@dataclass
class DenseLayer:
    weights: np.ndarray  # (out_dim, in_dim)
    bias: np.ndarray  # (out_dim,)
    activation: str

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.weights.ndim != 2 or self.bias.shape != (self.weights.shape[0],):
            raise ValueError("layer weight/bias shapes inconsistent")

    @property
    def in_dim(self):
        return self.weights.shape[1]

    @property
    def out_dim(self):
        return self.weights.shape[0]


@dataclass
class TrainConfig:
    learning_rate: float = 0.01
    epochs: int = 100
    batch_size: int = 32
    optimizer: str = "adam"  # "sgd" or "adam"
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    rng_seed: int = 0

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.optimizer not in ("sgd", "adam"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


class Mlp:
    """Dense feed-forward net; optionally softmax-headed."""

    def __init__(self, layers):
        layers = list(layers)
        if not layers:
            raise ValueError("need at least one layer")
        for a, b in zip(layers, layers[1:]):
            if a.out_dim != b.in_dim:
                raise ValueError(
                    f"layer dims do not chain: {a.out_dim} -> {b.in_dim}"
                )
        for i, layer in enumerate(layers):
            if layer.activation == "softmax" and i != len(layers) - 1:
                raise ValueError("softmax allowed only on the final layer")
        self.layers = layers

    @property
    def in_dim(self):
        return self.layers[0].in_dim

    @property
    def out_dim(self):
        return self.layers[-1].out_dim

    @property
    def has_softmax_head(self):
        return self.layers[-1].activation == "softmax"

    def copy(self):
        return Mlp(
            [
                DenseLayer(l.weights.copy(), l.bias.copy(), l.activation)
                for l in self.layers
            ]
        )

    def forward(self, x):
        """Single-record forward pass; returns a 1-D output vector."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.in_dim,):
            raise DimensionError(
                f"expected input of length {self.in_dim}, got shape {x.shape}"
            )
        return self.forward_batch(x[None, :])[0]

    def forward_batch(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.in_dim:
            raise DimensionError(
                f"expected (n, {self.in_dim}) batch, got shape {X.shape}"
            )
        for layer in self.layers:
            X = _activate(X @ layer.weights.T + layer.bias, layer.activation)
        return X


def _activate(Z, name):
    if name == "relu":
        return np.maximum(Z, 0.0)
    if name == "tanh":
        return np.tanh(Z)
    if name == "linear":
        return Z
    # softmax, row-wise, shift-stable
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


def make_mlp(dims, activations, rng):
    """Glorot-uniform initialised net; dims = [in, h1, ..., out]."""
    if len(activations) != len(dims) - 1:
        raise ValueError("need one activation per layer")
    layers = []
    for fan_in, fan_out, act in zip(dims, dims[1:], activations):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        W = rng.uniform(-bound, bound, size=(fan_out, fan_in))
        layers.append(DenseLayer(W, np.zeros(fan_out), act))
    return Mlp(layers)


def make_classifier(feature_count, class_count, hidden=None, rng=None, seed=0):
    """Default classifier topology: one relu hidden layer of 2x features."""
    if rng is None:
        rng = np.random.default_rng(seed)
    if hidden is None:
        hidden = [2 * feature_count]
    dims = [feature_count, *hidden, class_count]
    acts = ["relu"] * len(hidden) + ["softmax"]
    return make_mlp(dims, acts, rng)


def loss(pred, target):
    """Cross-entropy -sum(t * ln p) with probabilities clamped at 1e-12."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise DimensionError(
            f"pred/target length mismatch: {pred.shape} vs {target.shape}"
        )
    return float(-np.sum(target * np.log(np.clip(pred, PROB_CLAMP, None))))


def _forward_trace(net, X):
    """Forward pass keeping per-layer inputs and outputs for backprop."""
    inputs, outputs = [], []
    A = X
    for layer in net.layers:
        inputs.append(A)
        A = _activate(A @ layer.weights.T + layer.bias, layer.activation)
        outputs.append(A)
    return inputs, outputs


def _backward(net, inputs, outputs, grad_out):
    """Backpropagate grad-wrt-layer-output; returns (input grad, weight grads).

    grad_out is dL/d(activation output) of the last layer except for a
    softmax head, where it must already be dL/d(logits) (the caller folds
    the softmax Jacobian into the cross-entropy delta).
    """
    weight_grads = []
    delta = grad_out
    for idx in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[idx]
        A_in, A_out = inputs[idx], outputs[idx]
        if layer.activation == "relu":
            delta = delta * (A_out > 0)
        elif layer.activation == "tanh":
            delta = delta * (1.0 - A_out**2)
        # linear: delta unchanged; softmax: pre-folded by caller
        dW = delta.T @ A_in
        db = delta.sum(axis=0)
        weight_grads.append((dW, db))
        delta = delta @ layer.weights
    weight_grads.reverse()
    return delta, weight_grads


def _loss_grad_at_output(net, outputs, T):
    """dL/d(last pre-activation or output) for batch cross-entropy."""
    P = outputs[-1]
    if net.has_softmax_head:
        # d(-sum t ln p)/d(logit_j) = p_j * sum(t) - t_j; exact for
        # unnormalised targets such as the 0.99 soft target.
        return P * T.sum(axis=1, keepdims=True) - T
    # below the clamp the loss is constant in P, so its gradient is zero
    return np.where(P > PROB_CLAMP, -T / np.clip(P, PROB_CLAMP, None), 0.0)


def loss_and_gradients(net, X, T):
    """Batch mean is NOT taken: returns total loss and summed gradients."""
    inputs, outputs = _forward_trace(net, X)
    P = outputs[-1]
    total = float(
        -np.sum(T * np.log(np.clip(P, PROB_CLAMP, None)))
    )
    grad_out = _loss_grad_at_output(net, outputs, T)
    input_grad, weight_grads = _backward(net, inputs, outputs, grad_out)
    return total, input_grad, weight_grads


def input_gradient(net, x, target):
    """Gradient of loss(forward(net, x), target) w.r.t. the input vector."""
    x = np.asarray(x, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if x.shape != (net.in_dim,):
        raise DimensionError(f"expected input of length {net.in_dim}")
    if target.shape != (net.out_dim,):
        raise DimensionError(f"expected target of length {net.out_dim}")
    _, input_grad, _ = loss_and_gradients(net, x[None, :], target[None, :])
    return input_grad[0]


class _AdamState:
    def __init__(self, net):
        self.m = [
            (np.zeros_like(l.weights), np.zeros_like(l.bias)) for l in net.layers
        ]
        self.v = [
            (np.zeros_like(l.weights), np.zeros_like(l.bias)) for l in net.layers
        ]
        self.t = 0


def apply_gradients(net, weight_grads, cfg, state=None):
    """One optimiser step in place; state required for adam."""
    if cfg.optimizer == "sgd":
        for layer, (dW, db) in zip(net.layers, weight_grads):
            layer.weights -= cfg.learning_rate * dW
            layer.bias -= cfg.learning_rate * db
        return
    state.t += 1
    b1, b2 = cfg.beta1, cfg.beta2
    corr1 = 1.0 - b1**state.t
    corr2 = 1.0 - b2**state.t
    for i, (layer, (dW, db)) in enumerate(zip(net.layers, weight_grads)):
        mW, mb = state.m[i]
        vW, vb = state.v[i]
        mW[:] = b1 * mW + (1 - b1) * dW
        mb[:] = b1 * mb + (1 - b1) * db
        vW[:] = b2 * vW + (1 - b2) * dW**2
        vb[:] = b2 * vb + (1 - b2) * db**2
        layer.weights -= cfg.learning_rate * (mW / corr1) / (
            np.sqrt(vW / corr2) + cfg.eps
        )
        layer.bias -= cfg.learning_rate * (mb / corr1) / (
            np.sqrt(vb / corr2) + cfg.eps
        )


def one_hot(labels, class_count):
    labels = np.asarray(labels, dtype=int)
    T = np.zeros((len(labels), class_count))
    T[np.arange(len(labels)), labels] = 1.0
    return T


def train(net, data, labels, cfg):
    """Minibatch training on class-index labels.

    Returns (net, per-epoch mean loss history).  The net is modified in
    place and also returned for convenience.
    """
    X = np.asarray(data, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise TrainingError("empty or malformed training data")
    y = np.asarray(labels, dtype=int)
    if len(y) != len(X):
        raise TrainingError("label count does not match row count")
    if y.min() < 0 or y.max() >= net.out_dim:
        raise TrainingError("label outside the network's class range")
    if cfg.batch_size > len(X):
        cfg = TrainConfig(**{**cfg.__dict__, "batch_size": len(X)})
    T = one_hot(y, net.out_dim)
    rng = np.random.default_rng(cfg.rng_seed)
    state = _AdamState(net) if cfg.optimizer == "adam" else None
    history = []
    for _ in range(cfg.epochs):
        order = rng.permutation(len(X))
        epoch_loss = 0.0
        for start in range(0, len(X), cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            total, _, grads = loss_and_gradients(net, X[idx], T[idx])
            if not np.isfinite(total):
                raise TrainingError(
                    f"non-finite loss after {len(history)} epochs; "
                    "lower the learning rate"
                )
            n = len(idx)
            grads = [(dW / n, db / n) for dW, db in grads]
            apply_gradients(net, grads, cfg, state)
            epoch_loss += total
        history.append(epoch_loss / len(X))
        for layer in net.layers:
            if not (
                np.all(np.isfinite(layer.weights))
                and np.all(np.isfinite(layer.bias))
            ):
                raise TrainingError("non-finite weights after update")
    return net, history


# ---------------------------------------------------------------------------
# Serialization: versioned text blob, 17 significant digits (exact float64
# round trip).  Schema:
#
#   dataview-mlp <version>
#   layers <count>
#   layer <out_dim> <in_dim> <activation>
#   w <out_dim lines of in_dim numbers>
#   b <one line of out_dim numbers>
#   ... repeated per layer
# ---------------------------------------------------------------------------


def serialize(net):
    buf = io.StringIO()
    buf.write(f"dataview-mlp {MODEL_FORMAT_VERSION}\n")
    buf.write(f"layers {len(net.layers)}\n")
    for layer in net.layers:
        buf.write(f"layer {layer.out_dim} {layer.in_dim} {layer.activation}\n")
        for row in layer.weights:
            buf.write(" ".join(f"{v:.17g}" for v in row) + "\n")
        buf.write(" ".join(f"{v:.17g}" for v in layer.bias) + "\n")
    return buf.getvalue()


class _LineReader:
    def __init__(self, blob):
        self.lines = blob.split("\n")
        self.index = 0
        self.offset = 0

    def next(self, what):
        while True:
            if self.index >= len(self.lines):
                raise ModelFormatError(f"truncated blob: expected {what}", self.offset)
            line = self.lines[self.index]
            self.index += 1
            start = self.offset
            self.offset += len(line.encode("utf-8")) + 1
            if line.strip():
                return line.strip(), start


def deserialize(blob):
    if isinstance(blob, bytes):
        blob = blob.decode("utf-8")
    reader = _LineReader(blob)
    header, off = reader.next("header")
    parts = header.split()
    if len(parts) != 2 or parts[0] != "dataview-mlp":
        raise ModelFormatError("not a dataview-mlp blob", off)
    if parts[1] != str(MODEL_FORMAT_VERSION):
        raise ModelFormatError(f"unsupported model format version {parts[1]}", off)
    count_line, off = reader.next("layer count")
    parts = count_line.split()
    if len(parts) != 2 or parts[0] != "layers" or not parts[1].isdigit():
        raise ModelFormatError("malformed layer count", off)
    n_layers = int(parts[1])
    layers = []
    for _ in range(n_layers):
        head, off = reader.next("layer header")
        parts = head.split()
        if len(parts) != 4 or parts[0] != "layer":
            raise ModelFormatError("malformed layer header", off)
        try:
            out_dim, in_dim = int(parts[1]), int(parts[2])
        except ValueError:
            raise ModelFormatError("malformed layer dimensions", off) from None
        act = parts[3]
        if act not in ACTIVATIONS:
            raise ModelFormatError(f"unknown activation {act!r}", off)
        W = np.empty((out_dim, in_dim))
        for r in range(out_dim):
            row, off = reader.next("weight row")
            vals = row.split()
            if len(vals) != in_dim:
                raise ModelFormatError(
                    f"weight row has {len(vals)} values, expected {in_dim}", off
                )
            try:
                W[r] = [float(v) for v in vals]
            except ValueError:
                raise ModelFormatError("non-numeric weight", off) from None
        brow, off = reader.next("bias row")
        vals = brow.split()
        if len(vals) != out_dim:
            raise ModelFormatError(
                f"bias row has {len(vals)} values, expected {out_dim}", off
            )
        try:
            bias = np.array([float(v) for v in vals])
        except ValueError:
            raise ModelFormatError("non-numeric bias", off) from None
        layers.append(DenseLayer(W, bias, act))
    return Mlp(layers)
