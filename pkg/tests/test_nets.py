"""MLP forward/backward, Adam, and checkpoint round-trips."""

import numpy as np
import pytest

from annealed_il.envs import ActionSpec
from annealed_il.nets import (
    MLP,
    Adam,
    build_disc_net,
    build_policy_net,
    clip_params,
    get_flat,
    load_checkpoint,
    orthogonal_init,
    save_checkpoint,
    set_flat,
)


def test_zero_network_outputs_zero():
    net = MLP(4, [3, 3], {"pi": 2, "v": 1})  # no rng: all weights zero
    outs, _ = net.forward(np.ones((5, 4)))
    assert np.array_equal(outs["pi"], np.zeros((5, 2)))
    assert np.array_equal(outs["v"], np.zeros((5, 1)))


def test_constant_head_bias():
    net = MLP(4, [3], {"v": 1})
    net.heads["v"][1][:] = 2.5
    outs, _ = net.forward(np.random.default_rng(0).standard_normal((6, 4)))
    assert np.allclose(outs["v"], 2.5)


def test_batching_matches_single_rows():
    rng = np.random.default_rng(1)
    net = MLP(5, [4, 4], {"pi": 3, "v": 1}, rng=rng)
    x = rng.standard_normal((7, 5))
    batch_outs, _ = net.forward(x)
    for i in range(7):
        single, _ = net.forward(x[i : i + 1])
        assert np.allclose(batch_outs["pi"][i], single["pi"][0], atol=1e-12)
        assert np.allclose(batch_outs["v"][i], single["v"][0], atol=1e-12)


def test_forward_rejects_wrong_dim():
    net = MLP(5, [4], {"v": 1})
    with pytest.raises(ValueError):
        net.forward(np.zeros((3, 6)))


def test_hand_derived_single_unit_gradient():
    # one input, one hidden unit, value head; loss = sum of outputs
    net = MLP(1, [1], {"v": 1})
    w1, b1 = net.trunk[0]
    w2, b2 = net.heads["v"]
    w1[0, 0], b1[0] = 0.0, 0.3  # zero hidden weight, bias only
    w2[0, 0], b2[0] = 1.7, 0.1
    x = np.array([[2.0]])
    outs, cache = net.forward(x)
    h = np.tanh(0.3)
    assert np.allclose(outs["v"][0, 0], 1.7 * h + 0.1)
    grads = net.backward(cache, {"v": np.ones((1, 1))})
    d_w1, d_b1, d_w2, d_b2 = grads
    assert np.allclose(d_w2[0, 0], h)
    assert np.allclose(d_b2[0], 1.0)
    assert np.allclose(d_b1[0], 1.7 * (1 - h**2))
    assert np.allclose(d_w1[0, 0], 1.7 * (1 - h**2) * 2.0)


def test_loss_independent_block_gets_zero_gradient():
    rng = np.random.default_rng(2)
    net = MLP(4, [3], {"pi": 2, "v": 1}, rng=rng)
    _, cache = net.forward(rng.standard_normal((5, 4)))
    grads = net.backward(cache, {"v": np.ones((5, 1))})
    # the pi head never influenced the loss
    names = ["w0", "b0", "pi_w", "pi_b", "v_w", "v_b"]
    by_name = dict(zip(names, grads))
    assert np.array_equal(by_name["pi_w"], np.zeros_like(by_name["pi_w"]))
    assert np.array_equal(by_name["pi_b"], np.zeros_like(by_name["pi_b"]))
    assert not np.array_equal(by_name["v_w"], np.zeros_like(by_name["v_w"]))


def test_orthogonal_init_is_orthogonal_and_scaled():
    rng = np.random.default_rng(3)
    w = orthogonal_init(rng, 8, 4, gain=2.0)
    assert np.allclose(w.T @ w / 4.0, np.eye(4), atol=1e-10)
    w = orthogonal_init(rng, 3, 6, gain=1.0)
    assert np.allclose(w @ w.T, np.eye(3), atol=1e-10)


def test_adam_zero_gradient_is_fixed_point():
    net = MLP(3, [2], {"v": 1}, rng=np.random.default_rng(0))
    before = get_flat(net).copy()
    opt = Adam(net.params(), lr=0.1)
    opt.step(net.params(), net.zero_grads())
    assert np.array_equal(get_flat(net), before)


def test_adam_first_step_magnitude():
    # bias correction makes the first update ~lr * sign(g) for eps << |g|
    net = MLP(2, [2], {"v": 1}, rng=np.random.default_rng(1))
    before = get_flat(net).copy()
    opt = Adam(net.params(), lr=1e-3)
    grads = [np.full_like(p, 0.37) for p in net.params()]
    opt.step(net.params(), grads)
    delta = get_flat(net) - before
    assert np.allclose(delta, -1e-3, rtol=1e-6)


def test_adam_deterministic():
    def run():
        net = MLP(3, [3], {"v": 1}, rng=np.random.default_rng(5))
        opt = Adam(net.params(), lr=1e-2)
        g = [np.ones_like(p) * 0.1 for p in net.params()]
        for _ in range(10):
            opt.step(net.params(), g)
        return get_flat(net)

    assert np.array_equal(run(), run())


def test_adam_rejects_nonfinite():
    net = MLP(2, [2], {"v": 1})
    opt = Adam(net.params(), lr=1e-3)
    bad = net.zero_grads()
    bad[0][0, 0] = np.nan
    with pytest.raises(ValueError):
        opt.step(net.params(), bad)


def test_clip_params():
    net = MLP(3, [4], {"f": 1}, rng=np.random.default_rng(0))
    clip_params(net, 0.01)
    assert max(np.abs(p).max() for p in net.params()) <= 0.01


def test_flat_round_trip():
    rng = np.random.default_rng(4)
    net = build_policy_net(6, ActionSpec(kind="continuous", dim=2), rng, hidden=[4, 3])
    flat = get_flat(net)
    other = build_policy_net(6, ActionSpec(kind="continuous", dim=2), rng, hidden=[4, 3])
    set_flat(other, flat)
    assert np.array_equal(get_flat(other), flat)
    with pytest.raises(ValueError):
        set_flat(other, flat[:-1])


def test_checkpoint_round_trip_exact(tmp_path):
    rng = np.random.default_rng(7)
    for spec in (ActionSpec(kind="discrete", n=4), ActionSpec(kind="continuous", dim=2)):
        net = build_policy_net(9, spec, rng)
        net.extras.get("log_std", np.zeros(1))[...] = -0.731
        path = tmp_path / f"{spec.kind}.ckpt"
        save_checkpoint(net, path, meta={"env_id": "test"})
        loaded, meta = load_checkpoint(path)
        assert meta == {"env_id": "test"}
        assert np.array_equal(get_flat(loaded), get_flat(net))
        assert loaded.head_dims == net.head_dims


def test_checkpoint_rejects_other_files(tmp_path):
    path = tmp_path / "x.ckpt"
    path.write_bytes(b'{"format": "something"}\n')
    with pytest.raises(ValueError):
        load_checkpoint(path)


def test_disc_input_dim():
    rng = np.random.default_rng(0)
    d = build_disc_net(10, ActionSpec(kind="discrete", n=4), rng)
    assert d.in_dim == 14
    c = build_disc_net(6, ActionSpec(kind="continuous", dim=2), rng)
    assert c.in_dim == 8
