"""Reverse-mode automatic differentiation over dense float64 numpy arrays.

The graph is implicit: every Tensor records its parent nodes and a backward
closure, and backward() replays the tape in reverse topological order.
Broadcasting is deliberately restricted to scalar ops and matrix-plus-row
(bias) adds so every gradient rule stays auditable.
"""

import numpy as np


class ShapeError(ValueError):
    """Raised when operand shapes are incompatible; message carries both shapes."""


def _as_array(x):
    a = np.asarray(x, dtype=np.float64)
    return a


class Tensor:
    """A value in the computation graph.

    `data` is always a float64 ndarray (0-d for scalars). `grad` is filled in
    by backward() and has the same shape as `data`. Nodes created through
    stop_gradient keep their parents for bookkeeping but propagate nothing.
    """

    __slots__ = ("data", "grad", "_parents", "_bwd")

    def __init__(self, data, parents=(), bwd=None):
        self.data = _as_array(data)
        self.grad = None
        self._parents = parents
        self._bwd = bwd

    @property
    def shape(self):
        return self.data.shape

    def __repr__(self):
        return f"Tensor(shape={self.data.shape})"

    # Operator sugar; mixed operands are lifted to constant leaves.
    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __sub__(self, other):
        return sub(self, _lift(other))

    def __rsub__(self, other):
        return sub(_lift(other), self)

    def __mul__(self, other):
        return mul(self, _lift(other))

    def __rmul__(self, other):
        return mul(_lift(other), self)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, _lift(other))


def _lift(x):
    return x if isinstance(x, Tensor) else Tensor(x)


def _accum(node, g):
    if node.grad is None:
        node.grad = g.copy() if isinstance(g, np.ndarray) else np.asarray(g, dtype=np.float64)
    else:
        node.grad += g


def _check_same_shape(a, b, op):
    if a.data.shape != b.data.shape:
        raise ShapeError(f"{op}: shapes {a.data.shape} and {b.data.shape} do not match")


def _is_scalar(t):
    return t.data.ndim == 0


def _is_bias_broadcast(a, b):
    # (B, n) op (n,)
    return a.data.ndim == 2 and b.data.ndim == 1 and a.data.shape[1] == b.data.shape[0]


def add(a, b):
    if _is_scalar(b) or _is_scalar(a):
        out = Tensor(a.data + b.data, (a, b))

        def bwd():
            g = out.grad
            _accum(a, g if not _is_scalar(a) else g.sum())
            _accum(b, g if not _is_scalar(b) else g.sum())

    elif _is_bias_broadcast(a, b):
        out = Tensor(a.data + b.data, (a, b))

        def bwd():
            _accum(a, out.grad)
            _accum(b, out.grad.sum(axis=0))

    else:
        _check_same_shape(a, b, "add")
        out = Tensor(a.data + b.data, (a, b))

        def bwd():
            _accum(a, out.grad)
            _accum(b, out.grad)

    out._bwd = bwd
    return out


def sub(a, b):
    if _is_scalar(b) or _is_scalar(a):
        out = Tensor(a.data - b.data, (a, b))

        def bwd():
            g = out.grad
            _accum(a, g if not _is_scalar(a) else g.sum())
            _accum(b, -g if not _is_scalar(b) else -g.sum())

    else:
        _check_same_shape(a, b, "sub")
        out = Tensor(a.data - b.data, (a, b))

        def bwd():
            _accum(a, out.grad)
            _accum(b, -out.grad)

    out._bwd = bwd
    return out


def mul(a, b):
    if not (_is_scalar(a) or _is_scalar(b)):
        _check_same_shape(a, b, "mul")
    out = Tensor(a.data * b.data, (a, b))

    def bwd():
        g = out.grad
        ga = g * b.data
        gb = g * a.data
        _accum(a, ga if not _is_scalar(a) else ga.sum())
        _accum(b, gb if not _is_scalar(b) else gb.sum())

    out._bwd = bwd
    return out


def neg(a):
    out = Tensor(-a.data, (a,))

    def bwd():
        _accum(a, -out.grad)

    out._bwd = bwd
    return out


def matmul(a, b):
    ad, bd = a.data, b.data
    if ad.ndim == 2 and bd.ndim == 2:
        if ad.shape[1] != bd.shape[0]:
            raise ShapeError(f"matmul: inner dims {ad.shape} @ {bd.shape}")
        out = Tensor(ad @ bd, (a, b))

        def bwd():
            g = out.grad
            _accum(a, g @ bd.T)
            _accum(b, ad.T @ g)

    elif ad.ndim == 1 and bd.ndim == 2:
        if ad.shape[0] != bd.shape[0]:
            raise ShapeError(f"matmul: inner dims {ad.shape} @ {bd.shape}")
        out = Tensor(ad @ bd, (a, b))

        def bwd():
            g = out.grad
            _accum(a, bd @ g)
            _accum(b, np.outer(ad, g))

    elif ad.ndim == 2 and bd.ndim == 1:
        if ad.shape[1] != bd.shape[0]:
            raise ShapeError(f"matmul: inner dims {ad.shape} @ {bd.shape}")
        out = Tensor(ad @ bd, (a, b))

        def bwd():
            g = out.grad
            _accum(a, np.outer(g, bd))
            _accum(b, ad.T @ g)

    else:
        raise ShapeError(f"matmul: unsupported ranks {ad.shape} @ {bd.shape}")

    out._bwd = bwd
    return out


def affine(x, w, b):
    """x @ w + b in one node; the hot path for MLP layers."""
    xd, wd = x.data, w.data
    if xd.ndim not in (1, 2) or wd.ndim != 2 or xd.shape[-1] != wd.shape[0]:
        raise ShapeError(f"affine: input {xd.shape} vs weight {wd.shape}")
    if b.data.shape != (wd.shape[1],):
        raise ShapeError(f"affine: bias {b.data.shape} vs weight {wd.shape}")
    out = Tensor(xd @ wd + b.data, (x, w, b))

    def bwd():
        g = out.grad
        if xd.ndim == 2:
            _accum(x, g @ wd.T)
            _accum(w, xd.T @ g)
            _accum(b, g.sum(axis=0))
        else:
            _accum(x, wd @ g)
            _accum(w, np.outer(xd, g))
            _accum(b, g)

    out._bwd = bwd
    return out


def relu(a):
    out = Tensor(np.maximum(a.data, 0.0), (a,))

    def bwd():
        _accum(a, out.grad * (a.data > 0.0))

    out._bwd = bwd
    return out


def tanh(a):
    out = Tensor(np.tanh(a.data), (a,))

    def bwd():
        _accum(a, out.grad * (1.0 - out.data * out.data))

    out._bwd = bwd
    return out


def exp(a):
    out = Tensor(np.exp(a.data), (a,))

    def bwd():
        _accum(a, out.grad * out.data)

    out._bwd = bwd
    return out


def log(a):
    out = Tensor(np.log(a.data), (a,))

    def bwd():
        _accum(a, out.grad / a.data)

    out._bwd = bwd
    return out


def tsum(a):
    out = Tensor(a.data.sum(), (a,))

    def bwd():
        _accum(a, np.broadcast_to(out.grad, a.data.shape).copy())

    out._bwd = bwd
    return out


def tmean(a):
    n = a.data.size
    out = Tensor(a.data.mean(), (a,))

    def bwd():
        _accum(a, np.broadcast_to(out.grad / n, a.data.shape).copy())

    out._bwd = bwd
    return out


def huber_rowsum(a, b, delta=1.0):
    """Elementwise Huber of (a - b), summed over the last axis.

    For (B, d) inputs the result is (B,); for (d,) inputs a scalar. This is
    the distance D used throughout: sum_i H_delta(a_i - b_i).
    """
    _check_same_shape(a, b, "huber_rowsum")
    r = a.data - b.data
    absr = np.abs(r)
    quad = absr <= delta
    h = np.where(quad, 0.5 * r * r, delta * (absr - 0.5 * delta))
    out = Tensor(h.sum(axis=-1), (a, b))

    def bwd():
        g = np.expand_dims(out.grad, -1) if h.ndim > 0 else out.grad
        dr = np.clip(r, -delta, delta)
        _accum(a, g * dr)
        _accum(b, -g * dr)

    out._bwd = bwd
    return out


def pairwise_huber(f, phi, delta=1.0):
    """Huber distances between every row of f (N, d) and every row of phi (B, d).

    Returns (B, N): out[i, j] = sum_k H_delta(f[j, k] - phi[i, k]).
    """
    fd, pd = f.data, phi.data
    if fd.ndim != 2 or pd.ndim != 2 or fd.shape[1] != pd.shape[1]:
        raise ShapeError(f"pairwise_huber: {fd.shape} vs {pd.shape}")
    r = fd[None, :, :] - pd[:, None, :]  # (B, N, d)
    absr = np.abs(r)
    h = np.where(absr <= delta, 0.5 * r * r, delta * (absr - 0.5 * delta))
    out = Tensor(h.sum(axis=-1), (f, phi))

    def bwd():
        g = out.grad[:, :, None]
        dr = np.clip(r, -delta, delta)
        _accum(f, (g * dr).sum(axis=0))
        _accum(phi, -(g * dr).sum(axis=1))

    out._bwd = bwd
    return out


def log_mean_exp(a, axis=-1):
    """Numerically stable log(mean(exp(a))) along `axis` (max-shifted)."""
    m = a.data.max(axis=axis, keepdims=True)
    e = np.exp(a.data - m)
    s = e.sum(axis=axis)
    n = a.data.shape[axis]
    out = Tensor(np.squeeze(m, axis=axis) + np.log(s / n), (a,))

    def bwd():
        soft = e / np.expand_dims(s, axis)
        _accum(a, np.expand_dims(out.grad, axis) * soft)

    out._bwd = bwd
    return out


def concat_cols(parts):
    """Concatenate 2-D tensors along columns (or 1-D tensors end to end)."""
    datas = [p.data for p in parts]
    nd = datas[0].ndim
    if any(d.ndim != nd for d in datas) or nd not in (1, 2):
        raise ShapeError(f"concat_cols: ranks {[d.shape for d in datas]}")
    axis = nd - 1
    out = Tensor(np.concatenate(datas, axis=axis), tuple(parts))
    widths = [d.shape[axis] for d in datas]

    def bwd():
        g = out.grad
        off = 0
        for p, w in zip(parts, widths):
            sl = (slice(None), slice(off, off + w)) if nd == 2 else slice(off, off + w)
            _accum(p, g[sl])
            off += w

    out._bwd = bwd
    return out


def stop_gradient(a):
    """Pass the value through; the backward pass sends nothing upstream."""
    return Tensor(a.data, (a,), None)


def backward(root):
    """Reverse-mode sweep from a scalar root; fills .grad on every reachable node.

    Each node is visited exactly once. Raises on non-scalar roots.
    """
    if root.data.size != 1:
        raise ShapeError(f"backward: root must be scalar, got shape {root.data.shape}")

    topo = []
    visited = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            topo.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        if node._bwd is not None:  # stop_gradient severs traversal
            for p in node._parents:
                if id(p) not in visited:
                    stack.append((p, False))

    for node in topo:
        node.grad = None
    root.grad = np.ones_like(root.data)
    for node in reversed(topo):
        if node._bwd is not None:
            node._bwd()
    for node in topo:
        if node.grad is None:
            node.grad = np.zeros_like(node.data)


def finite_difference(fn, arrays, h=1e-5, indices=None):
    """Central finite differences of a scalar fn(list_of_arrays).

    `indices`, when given, restricts each array to the listed flat coordinates
    (useful for spot checks on large parameter blocks). Returns one gradient
    array per input, zero outside sampled coordinates.
    """
    grads = []
    for ai, a in enumerate(arrays):
        g = np.zeros_like(a)
        flat = a.reshape(-1)
        gflat = g.reshape(-1)
        idxs = range(flat.size) if indices is None else indices[ai]
        for i in idxs:
            orig = flat[i]
            flat[i] = orig + h
            fp = fn(arrays)
            flat[i] = orig - h
            fm = fn(arrays)
            flat[i] = orig
            gflat[i] = (fp - fm) / (2.0 * h)
        grads.append(g)
    return grads


def max_relative_error(analytic, numeric, floor=1e-5):
    """max |a - n| / max(|a|, |n|, floor) over all listed gradient arrays."""
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst
