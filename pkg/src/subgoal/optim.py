"""Adam optimizer with bias correction."""

import numpy as np


class NonFiniteGradient(RuntimeError):
    """Raised when a gradient contains nan or inf; the update is refused."""


class AdamState:
    """First/second moment accumulators plus the step counter.

    Moments start at zero and mirror the parameter shapes; the counter
    increases by exactly one per applied update.
    """

    def __init__(self, params, lr=1e-4, beta1=0.9, beta2=0.999, eps=1e-8):
        self.m = [np.zeros_like(p.data) for p in params]
        self.v = [np.zeros_like(p.data) for p in params]
        self.t = 0
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps


def adam_step(state, params, grads):
    """One Adam update, in place on the parameter tensors.

    `grads` aligns with `params`; non-finite gradients refuse the whole
    update so the caller can skip and flag the step.
    """
    if len(params) != len(grads):
        raise ValueError(f"adam_step: {len(params)} params vs {len(grads)} grads")
    for p, g in zip(params, grads):
        if g.shape != p.data.shape:
            raise ValueError(f"adam_step: grad shape {g.shape} vs param {p.data.shape}")
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradient("adam_step: non-finite gradient, update refused")

    state.t += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1 ** state.t
    bc2 = 1.0 - b2 ** state.t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p.data -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
    return params, state
