"""Minimal dense network with explicit backprop.

Used for the nonlinear move evaluator and the pairwise ranking trainer.
Kept dependency-free (numpy only) so the analytic gradients can be checked
against finite differences.
"""

from __future__ import annotations

import numpy as np

ACTIVATIONS = ("tanh", "relu", "linear")


def _act(name, z):
    if name == "tanh":
        return np.tanh(z)
    if name == "relu":
        return np.maximum(z, 0.0)
    return z


def _act_grad(name, z, a):
    if name == "tanh":
        return 1.0 - a * a
    if name == "relu":
        return (z > 0.0).astype(z.dtype)
    return np.ones_like(z)


class Mlp:
    """Fully connected scorer: input -> hidden layer(s) -> scalar.

    `sizes` includes input and output, e.g. (6, 16, 1). Hidden layers use
    `activation`; the output is linear.
    """

    def __init__(self, sizes, activation="tanh", seed=0, weights=None, biases=None):
        if len(sizes) < 2 or sizes[-1] != 1:
            raise ValueError("sizes must end in a scalar output layer")
        if activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {activation!r}")
        self.sizes = tuple(int(s) for s in sizes)
        self.activation = activation
        if weights is not None:
            self.weights = [np.asarray(w, dtype=np.float64) for w in weights]
            self.biases = [np.asarray(b, dtype=np.float64) for b in biases]
        else:
            rng = np.random.default_rng(seed)
            self.weights = [
                rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=(fan_in, fan_out))
                for fan_in, fan_out in zip(self.sizes[:-1], self.sizes[1:])
            ]
            self.biases = [np.zeros(fan_out) for fan_out in self.sizes[1:]]
        for w, (fan_in, fan_out) in zip(self.weights, zip(self.sizes[:-1], self.sizes[1:])):
            if w.shape != (fan_in, fan_out):
                raise ValueError(f"weight shape {w.shape} != ({fan_in}, {fan_out})")

    def _layer_activation(self, index):
        return "linear" if index == len(self.weights) - 1 else self.activation

    def forward(self, x):
        """Scores for a batch (n, d) -> (n,), or a single (d,) -> float."""
        single = np.ndim(x) == 1
        a = np.atleast_2d(np.asarray(x, dtype=np.float64))
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            a = _act(self._layer_activation(i), a @ w + b)
        out = a[:, 0]
        return float(out[0]) if single else out

    def forward_cached(self, x):
        """Forward pass keeping pre/post activations for backprop."""
        a = np.atleast_2d(np.asarray(x, dtype=np.float64))
        zs, acts = [], [a]
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = acts[-1] @ w + b
            zs.append(z)
            acts.append(_act(self._layer_activation(i), z))
        return acts[-1][:, 0], (zs, acts)

    def backward(self, cache, dscore):
        """Parameter gradients given d(loss)/d(score) per sample.

        Returns (dweights, dbiases) matching self.weights/self.biases.
        """
        zs, acts = cache
        delta = np.asarray(dscore, dtype=np.float64)[:, None]
        dws = [None] * len(self.weights)
        dbs = [None] * len(self.biases)
        for i in range(len(self.weights) - 1, -1, -1):
            delta = delta * _act_grad(self._layer_activation(i), zs[i], acts[i + 1])
            dws[i] = acts[i].T @ delta
            dbs[i] = delta.sum(axis=0)
            if i > 0:
                delta = delta @ self.weights[i].T
        return dws, dbs

    def zero_like_grads(self):
        return (
            [np.zeros_like(w) for w in self.weights],
            [np.zeros_like(b) for b in self.biases],
        )

    # -- flat parameter vector helpers (serialization, gradient checks) --

    def get_flat(self):
        return np.concatenate(
            [w.ravel() for w in self.weights] + [b.ravel() for b in self.biases]
        )

    def set_flat(self, flat):
        flat = np.asarray(flat, dtype=np.float64)
        offset = 0
        for w in self.weights:
            w[...] = flat[offset : offset + w.size].reshape(w.shape)
            offset += w.size
        for b in self.biases:
            b[...] = flat[offset : offset + b.size]
            offset += b.size
        if offset != flat.size:
            raise ValueError("flat parameter vector has wrong length")

    @staticmethod
    def flat_grads(dws, dbs):
        return np.concatenate([g.ravel() for g in dws] + [g.ravel() for g in dbs])

    def to_dict(self):
        return {
            "sizes": list(self.sizes),
            "activation": self.activation,
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @staticmethod
    def from_dict(data):
        return Mlp(
            sizes=data["sizes"],
            activation=data["activation"],
            weights=data["weights"],
            biases=data["biases"],
        )
