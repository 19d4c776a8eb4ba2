"""Dense feed-forward network with masked-MSE training and Adam.

Small enough to be hand-rolled on numpy: rectified-linear hidden layers, a
linear output layer, explicit backpropagation, and a binary weight format.
Masked training rows update only selected outputs, which expresses both
single-action value updates and all-action updates with one mechanism.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

DEFAULT_SIZES = (21, 32, 32, 32, 6)

_MAGIC = b"FFW1"


@dataclass
class Network:
    """Weights of a fully connected net; ``weights[l]`` has shape (out, in)."""

    sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @property
    def n_layers(self) -> int:
        return len(self.weights)


@dataclass
class AdamState:
    """Adam moment accumulators, one pair per parameter tensor."""

    lr: float = 0.00025
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)


def build_network(sizes=DEFAULT_SIZES, seed: int = 0) -> Network:
    """Glorot-uniform weights (seeded), zero biases."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Network(tuple(sizes), weights, biases)


def build_adam(net: Network, lr: float = 0.00025) -> AdamState:
    adam = AdamState(lr=lr)
    for w, b in zip(net.weights, net.biases):
        adam.m.extend([np.zeros_like(w), np.zeros_like(b)])
        adam.v.extend([np.zeros_like(w), np.zeros_like(b)])
    return adam


def _forward_cached(net: Network, x: np.ndarray):
    """Batched forward pass keeping post-activation values for backprop."""
    acts = [x]
    h = x
    last = net.n_layers - 1
    for l, (w, b) in enumerate(zip(net.weights, net.biases)):
        h = h @ w.T + b
        if l != last:
            h = np.maximum(h, 0.0)
        acts.append(h)
    return acts


def forward(net: Network, x) -> np.ndarray:
    """Network output for one input vector."""
    x = np.asarray(x, dtype=float)
    if x.shape != (net.sizes[0],):
        raise ValueError(f"expected input of shape ({net.sizes[0]},), "
                         f"got {x.shape}")
    return _forward_cached(net, x[None, :])[-1][0]


def forward_batch(net: Network, inputs) -> np.ndarray:
    """Network outputs for a batch of input rows."""
    X = np.asarray(inputs, dtype=float)
    if X.ndim != 2 or X.shape[1] != net.sizes[0]:
        raise ValueError(f"expected inputs of shape (n, {net.sizes[0]}), "
                         f"got {X.shape}")
    return _forward_cached(net, X)[-1]


def gradients(net: Network, inputs, masks, targets):
    """Loss and parameter gradients for a masked batch.

    Loss = sum over the batch of mask * (pred - target)^2, divided by
    batch_size * n_outputs, i.e. the plain MSE one gets by setting each
    masked-out target equal to its prediction.
    """
    X = np.asarray(inputs, dtype=float)
    M = np.asarray(masks, dtype=float)
    T = np.asarray(targets, dtype=float)
    if X.ndim != 2 or X.shape[1] != net.sizes[0]:
        raise ValueError("bad input batch shape")
    if M.shape != T.shape or M.shape != (X.shape[0], net.sizes[-1]):
        raise ValueError("bad target batch shape")

    acts = _forward_cached(net, X)
    denom = X.shape[0] * net.sizes[-1]
    err = (acts[-1] - T) * M
    loss = float(np.sum(err * err) / denom)
    if not np.isfinite(loss):
        raise FloatingPointError("training loss diverged (non-finite)")

    grad_w = [None] * net.n_layers
    grad_b = [None] * net.n_layers
    delta = 2.0 * err / denom
    for l in range(net.n_layers - 1, -1, -1):
        grad_w[l] = delta.T @ acts[l]
        grad_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ net.weights[l]) * (acts[l] > 0.0)
    return loss, grad_w, grad_b


def train_batch(net: Network, adam: AdamState, inputs, masks, targets) -> float:
    """One Adam step on a masked batch; returns the pre-update loss."""
    loss, grad_w, grad_b = gradients(net, inputs, masks, targets)
    params = []
    grads = []
    for l in range(net.n_layers):
        params.extend([net.weights[l], net.biases[l]])
        grads.extend([grad_w[l], grad_b[l]])
    adam.step += 1
    t = adam.step
    for p, g, m, v in zip(params, grads, adam.m, adam.v):
        m *= adam.beta1
        m += (1 - adam.beta1) * g
        v *= adam.beta2
        v += (1 - adam.beta2) * (g * g)
        m_hat = m / (1 - adam.beta1 ** t)
        v_hat = v / (1 - adam.beta2 ** t)
        p -= adam.lr * m_hat / (np.sqrt(v_hat) + adam.eps)
    return loss


def copy_weights(src: Network, dst: Network) -> None:
    if src.sizes != dst.sizes:
        raise ValueError(f"architecture mismatch: {src.sizes} vs {dst.sizes}")
    for l in range(src.n_layers):
        np.copyto(dst.weights[l], src.weights[l])
        np.copyto(dst.biases[l], src.biases[l])


def clone_network(net: Network) -> Network:
    return Network(net.sizes, [w.copy() for w in net.weights],
                   [b.copy() for b in net.biases])


def save_weights(net: Network, path) -> None:
    """Write ``FFW1`` little-endian binary: magic, layer count, sizes, then
    per layer the row-major float64 weight block followed by the biases."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(net.sizes)))
        fh.write(struct.pack(f"<{len(net.sizes)}I", *net.sizes))
        for w, b in zip(net.weights, net.biases):
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_weights(path) -> Network:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError(f"{path}: not a weight file")
        (n_sizes,) = struct.unpack("<I", fh.read(4))
        sizes = struct.unpack(f"<{n_sizes}I", fh.read(4 * n_sizes))
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes, sizes[1:]):
            w = np.frombuffer(fh.read(8 * fan_out * fan_in), dtype="<f8")
            weights.append(w.reshape(fan_out, fan_in).copy())
            b = np.frombuffer(fh.read(8 * fan_out), dtype="<f8")
            biases.append(b.copy())
        trailing = fh.read(1)
    if trailing:
        raise ValueError(f"{path}: trailing bytes after weight blocks")
    return Network(tuple(int(s) for s in sizes), weights, biases)
