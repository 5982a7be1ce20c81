"""Multi-layer perceptrons on top of the tensor graph.

Hidden layers use relu, the output layer is linear. Weights initialize
uniform in +/- sqrt(6 / (fan_in + fan_out)), biases at zero.
"""

import numpy as np

from .tensor import Tensor, ShapeError, affine, relu


class MlpParams:
    """Weights and biases of one MLP; layer shapes chain input -> hidden* -> output.

    Parameters live in persistent leaf Tensors so the optimizer can update
    them in place between graph builds.
    """

    def __init__(self, weights, biases):
        self.weights = [w if isinstance(w, Tensor) else Tensor(w) for w in weights]
        self.biases = [b if isinstance(b, Tensor) else Tensor(b) for b in biases]
        for i in range(len(self.weights) - 1):
            if self.weights[i].data.shape[1] != self.weights[i + 1].data.shape[0]:
                raise ShapeError(
                    f"layer {i} output {self.weights[i].data.shape} does not chain "
                    f"into layer {i + 1} input {self.weights[i + 1].data.shape}"
                )

    @property
    def in_dim(self):
        return self.weights[0].data.shape[0]

    @property
    def out_dim(self):
        return self.weights[-1].data.shape[1]

    def tensors(self):
        """All parameter leaves, weights then biases per layer."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def arrays(self):
        return [t.data for t in self.tensors()]

    def copy(self):
        return MlpParams(
            [w.data.copy() for w in self.weights],
            [b.data.copy() for b in self.biases],
        )

    def set_from(self, other):
        for mine, theirs in zip(self.tensors(), other.tensors()):
            mine.data[...] = theirs.data


def init_mlp(sizes, rng):
    """Fresh MlpParams for layer widths `sizes`, e.g. [12, 100, 100, 2]."""
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpParams(weights, biases)


def mlp_forward(params, x):
    """Forward pass recorded on the graph; accepts a Tensor or ndarray input.

    Input is a single row (in_dim,) or a batch (B, in_dim).
    """
    t = x if isinstance(x, Tensor) else Tensor(x)
    if t.data.shape[-1] != params.in_dim:
        raise ShapeError(
            f"mlp_forward: input width {t.data.shape[-1]} does not match "
            f"first layer fan-in {params.in_dim}"
        )
    n = len(params.weights)
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        t = affine(t, w, b)
        if i < n - 1:
            t = relu(t)
    return t


def mlp_forward_np(params, x):
    """Plain-numpy forward pass for acting and other no-gradient paths."""
    a = np.asarray(x, dtype=np.float64)
    if a.shape[-1] != params.in_dim:
        raise ShapeError(
            f"mlp_forward_np: input width {a.shape[-1]} does not match "
            f"first layer fan-in {params.in_dim}"
        )
    n = len(params.weights)
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        a = a @ w.data + b.data
        if i < n - 1:
            np.maximum(a, 0.0, out=a)
    return a


def polyak_update(target, source, rate):
    """target <- (1 - rate) * target + rate * source, in place."""
    for t, s in zip(target.tensors(), source.tensors()):
        t.data *= 1.0 - rate
        t.data += rate * s.data
