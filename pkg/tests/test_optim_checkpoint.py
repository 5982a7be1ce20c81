"""Adam update rules and the binary parameter container."""

import numpy as np
import pytest

from subgoal.checkpoint import load_arrays, mlp_from_named, mlp_to_named, save_arrays
from subgoal.nn import init_mlp, polyak_update
from subgoal.optim import AdamState, NonFiniteGradient, adam_step
from subgoal.tensor import Tensor


def test_adam_zero_grads_leave_params():
    p = [Tensor(np.array([1.0, -2.0, 3.0]))]
    before = p[0].data.copy()
    st = AdamState(p, lr=0.01)
    adam_step(st, p, [np.zeros(3)])
    assert np.array_equal(p[0].data, before)
    assert st.t == 1


def test_adam_first_step_is_signed_lr():
    # With constant grad g and eps << |g|, the bias-corrected first step is
    # -lr * g / (|g| + eps) which is -lr * sign(g) up to eps.
    g = np.array([0.5, -2.0, 10.0])
    p = [Tensor(np.zeros(3))]
    st = AdamState(p, lr=1e-3, eps=1e-8)
    adam_step(st, p, [g.copy()])
    assert np.allclose(p[0].data, -1e-3 * np.sign(g), atol=1e-9)


def test_adam_two_steps_closed_form_moments():
    g = np.array([1.5, -0.25])
    p = [Tensor(np.zeros(2))]
    st = AdamState(p, lr=1e-4)
    adam_step(st, p, [g.copy()])
    adam_step(st, p, [g.copy()])
    assert st.t == 2
    b1, b2 = st.beta1, st.beta2
    m2 = (1 - b1) * g + b1 * (1 - b1) * g
    v2 = (1 - b2) * g * g + b2 * (1 - b2) * g * g
    assert np.allclose(st.m[0], m2, rtol=1e-14)
    assert np.allclose(st.v[0], v2, rtol=1e-14)


def test_adam_refuses_non_finite():
    p = [Tensor(np.zeros(2))]
    st = AdamState(p)
    before = p[0].data.copy()
    with pytest.raises(NonFiniteGradient):
        adam_step(st, p, [np.array([1.0, np.nan])])
    assert np.array_equal(p[0].data, before)
    assert st.t == 0


def test_checkpoint_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    arrays = {
        "actor.w0": rng.normal(size=(4, 8)),
        "actor.b0": rng.normal(size=8),
        "scalar": np.array(3.5),
    }
    path = tmp_path / "params.bin"
    save_arrays(path, arrays, meta={"mode": "learned", "c": 10})
    loaded, meta = load_arrays(path)
    assert meta == {"mode": "learned", "c": 10}
    assert set(loaded) == set(arrays)
    for k in arrays:
        assert np.array_equal(loaded[k], np.asarray(arrays[k], dtype=np.float64))


def test_checkpoint_bytes_deterministic(tmp_path):
    rng = np.random.default_rng(9)
    arrays = {"a": rng.normal(size=(3, 3)), "b": rng.normal(size=2)}
    p1, p2 = tmp_path / "one.bin", tmp_path / "two.bin"
    save_arrays(p1, arrays)
    save_arrays(p2, arrays)
    assert p1.read_bytes() == p2.read_bytes()


def test_mlp_named_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    params = init_mlp([5, 7, 3], rng)
    named = mlp_to_named("net", params)
    path = tmp_path / "net.bin"
    save_arrays(path, named)
    loaded, _ = load_arrays(path)
    rebuilt = mlp_from_named("net", loaded)
    for a, b in zip(params.tensors(), rebuilt.tensors()):
        assert np.array_equal(a.data, b.data)


def test_polyak_mixes_toward_source():
    rng = np.random.default_rng(1)
    target = init_mlp([3, 4, 2], rng)
    source = init_mlp([3, 4, 2], rng)
    t0 = target.weights[0].data.copy()
    s0 = source.weights[0].data
    polyak_update(target, source, 0.25)
    assert np.allclose(target.weights[0].data, 0.75 * t0 + 0.25 * s0)
