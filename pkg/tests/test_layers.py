import numpy as np
import pytest

from flexpose import accel
from flexpose.nn import (
    Adam, Dense, LSTM, MLP, RecurrentRegressor, clip_grad_norm,
    load_checkpoint, mse, param, restore_params, save_checkpoint, tensor,
)
from flexpose.nn.gradcheck import check_gradients


def test_dense_examples(rng):
    d = Dense(2, 2, rng)
    d.w.data[:] = np.eye(2)
    d.b.data[:] = [3.0, 4.0]
    out = d(tensor([[1.0, 2.0]]))
    assert np.allclose(out.data, [[4.0, 6.0]])
    d.b.data[:] = 0.0
    assert np.allclose(d(tensor([[1.0, 2.0]])).data, [[1.0, 2.0]])  # identity map
    d.b.data[:] = [3.0, 4.0]
    zero = d(tensor(np.zeros((5, 2))))
    assert np.allclose(zero.data, np.tile([3.0, 4.0], (5, 1)))  # broadcasts b


def test_lstm_zero_params_gate_equations(rng):
    cell = LSTM(3, 4, rng)
    for p in (cell.wx, cell.wh, cell.b):
        p.data[:] = 0.0
    x = rng.normal(size=(1, 2, 3))
    # zero state: candidate tanh(0)=0 so c=0, h=0
    hs = cell.forward_sequence(tensor(x)).data
    assert np.allclose(hs, 0.0)
    # nonzero c_prev: gates 0.5, c = 0.5*c_prev, h = 0.5*tanh(c)
    c_prev = rng.normal(size=(2, 4))
    h, (_, c) = cell.step(x[0], (np.zeros((2, 4)), c_prev))
    assert np.allclose(c, 0.5 * c_prev)
    assert np.allclose(h, 0.5 * np.tanh(0.5 * c_prev))


def test_lstm_zero_length_sequence(rng):
    cell = LSTM(3, 4, rng)
    out = cell.forward_sequence(tensor(np.zeros((0, 2, 3))))
    assert out.data.shape == (0, 2, 4)
    state = cell.init_state(2)
    assert np.allclose(state[0], 0) and np.allclose(state[1], 0)


def test_lstm_forget_bias_init(rng):
    cell = LSTM(3, 5, rng)
    assert np.allclose(cell.b.data[5:10], 1.0)
    assert np.allclose(cell.b.data[:5], 0.0)


@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_lstm_gradcheck_both_backends(backend, rng):
    prev = accel.active_backend()
    try:
        accel.set_backend(backend)
        cell = LSTM(5, 6, np.random.default_rng(7))
        x = param(rng.normal(size=(7, 3, 5)))
        target = rng.normal(size=(7, 3, 6))
        errs = check_gradients(lambda: mse(cell.forward_sequence(x), target),
                               cell.params("lstm") + [("x", x)])
        assert max(errs.values()) < 1e-4, errs
    finally:
        accel.set_backend(prev)


def test_lstm_sequence_matches_step_loop(rng):
    cell = LSTM(4, 6, np.random.default_rng(3))
    x = rng.normal(size=(11, 2, 4))
    hs = cell.forward_sequence(tensor(x)).data
    state = cell.init_state(2)
    for t in range(11):
        h, state = cell.step(x[t], state)
        assert np.allclose(h, hs[t], atol=1e-12)


def test_recurrent_regressor_gradcheck(rng):
    reg = RecurrentRegressor(4, 8, 2, 3, np.random.default_rng(5))
    x = tensor(rng.normal(size=(5, 2, 4)))
    target = rng.normal(size=(5, 2, 3))
    errs = check_gradients(lambda: mse(reg.forward_sequence(x), target), reg.params("r"))
    assert max(errs.values()) < 1e-4, errs


def test_mlp_gradcheck(rng):
    m = MLP([4, 12, 3], np.random.default_rng(6))
    x = tensor(rng.normal(size=(9, 4)))
    target = rng.normal(size=(9, 3))
    errs = check_gradients(lambda: mse(m(x), target), m.params("mlp"))
    assert max(errs.values()) < 1e-4, errs


def test_adam_zero_grad_no_update():
    p = param(np.array([1.0, -2.0]))
    opt = Adam({"p": p}, lr=0.1, weight_decay=0.0)
    p.grad = np.zeros(2)
    opt.step()
    assert np.allclose(p.data, [1.0, -2.0])


def test_adam_first_step_hand_case():
    p = param(np.array([0.5]))
    opt = Adam({"p": p}, lr=0.1, beta1=0.9, beta2=0.999)
    p.grad = np.array([1.0])
    opt.step()
    # bias-corrected moments cancel on step 1: update = -lr * g/(|g| + eps)
    assert p.data[0] == pytest.approx(0.4, abs=1e-7)


def test_adam_decoupled_weight_decay():
    p = param(np.array([2.0]))
    opt = Adam({"p": p}, lr=0.1, weight_decay=0.5)
    p.grad = np.array([0.0])
    opt.step()
    # zero gradient: only the decay term moves the parameter
    assert p.data[0] == pytest.approx(2.0 - 0.1 * 0.5 * 2.0)


def test_adam_determinism(rng):
    def run():
        r = np.random.default_rng(0)
        reg = RecurrentRegressor(3, 8, 1, 2, r)
        x = tensor(r.normal(size=(4, 8, 3)))
        t = r.normal(size=(4, 8, 2))
        params = dict(reg.params("m"))
        opt = Adam(params, lr=1e-3)
        for _ in range(5):
            opt.zero_grad()
            mse(reg.forward_sequence(x), t).backward()
            clip_grad_norm(params, 1.0)
            opt.step()
        return {k: p.data.copy() for k, p in params.items()}

    a, b = run(), run()
    for k in a:
        assert np.array_equal(a[k], b[k]), k


def test_clip_grad_norm():
    p = param(np.zeros(3))
    p.grad = np.array([3.0, 4.0, 0.0])
    norm = clip_grad_norm({"p": p}, 1.0)
    assert norm == pytest.approx(5.0)
    assert np.linalg.norm(p.grad) == pytest.approx(1.0)


def test_memorization_probe(rng):
    # a small network drives MSE below 1e-3 on 16 samples within budget
    reg = RecurrentRegressor(3, 32, 1, 2, np.random.default_rng(7))
    x = tensor(rng.normal(size=(10, 16, 3)))
    target = rng.normal(size=(10, 16, 2)) * 0.5
    params = dict(reg.params("m"))
    opt = Adam(params, lr=0.01)
    loss = None
    for _ in range(800):
        opt.zero_grad()
        loss = mse(reg.forward_sequence(x), target)
        loss.backward()
        clip_grad_norm(params, 1.0)
        opt.step()
        if loss.item() < 1e-3:
            break
    assert loss.item() < 1e-3


def test_checkpoint_round_trip(tmp_path, rng):
    reg = RecurrentRegressor(3, 4, 1, 2, np.random.default_rng(8))
    params = dict(reg.params("m"))
    path = tmp_path / "model.ckpt"
    save_checkpoint(path, "test-model", params, seed=42, step=7, extra={"note": "x"})
    meta, arrays = load_checkpoint(path)
    assert meta["kind"] == "test-model" and meta["seed"] == 42 and meta["step"] == 7
    for k, p in params.items():
        assert np.array_equal(arrays[k], p.data)
    # header is human-readable
    with open(path, "rb") as f:
        assert f.readline().startswith(b"FLEXPOSE-CKPT")
    fresh = RecurrentRegressor(3, 4, 1, 2, np.random.default_rng(9))
    restore_params(dict(fresh.params("m")), arrays)
    x = rng.normal(size=(3, 2, 3))
    a = reg.forward_sequence(tensor(x)).data
    b = fresh.forward_sequence(tensor(x)).data
    assert np.array_equal(a, b)


def test_checkpoint_bad_magic(tmp_path):
    path = tmp_path / "bad.ckpt"
    path.write_bytes(b"NOT-A-CKPT\n{}\n")
    with pytest.raises(ValueError):
        load_checkpoint(path)
