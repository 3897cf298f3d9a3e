"""Dense and LSTM layers on top of the autodiff core.

The LSTM sequence forward/backward runs through the accel kernels (numba
or numpy, see flexpose.accel); the per-frame `step` paths are plain numpy
and are what the streaming runtime uses.
"""

import numpy as np

from .. import accel
from .tensor import Tensor, param


def xavier_uniform(rng, fan_in, fan_out, shape=None):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape or (fan_in, fan_out))


def orthogonal(rng, rows, cols):
    q, r = np.linalg.qr(rng.normal(size=(max(rows, cols), min(rows, cols))))
    q = q * np.sign(np.diag(r))  # fix sign convention so the draw is uniform
    return q[:rows, :cols] if rows >= cols else q[:cols, :rows].T


class Dense:
    """y = x W + b, applied over the last axis."""

    def __init__(self, in_dim, out_dim, rng):
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.w = param(xavier_uniform(rng, in_dim, out_dim))
        self.b = param(np.zeros(out_dim))

    def __call__(self, x):
        if x.ndim == 2:
            return x @ self.w + self.b
        lead = x.shape[:-1]
        y = x.reshape((-1, self.in_dim)) @ self.w + self.b
        return y.reshape(lead + (self.out_dim,))

    def apply_np(self, x):
        return x @ self.w.data + self.b.data

    def params(self, prefix):
        return [(f"{prefix}.w", self.w), (f"{prefix}.b", self.b)]


def lstm_seq(xwb, wh, h0, c0):
    """Fused LSTM recurrence as a single graph node.

    xwb: Tensor (T, N, 4H) input projections plus bias; wh: Tensor (H, 4H).
    h0/c0 are constant ndarrays. Returns the Tensor of hidden states
    (T, N, H).
    """
    k = accel.kernels()
    hs, cs, acts = k.lstm_forward(np.ascontiguousarray(xwb.data), wh.data, h0, c0)
    out = Tensor(hs, xwb.requires_grad or wh.requires_grad, (xwb, wh), "lstm")

    def bw(g):
        T, N, H = hs.shape
        zero = np.zeros((N, H))
        whT = np.ascontiguousarray(wh.data.T)
        dz, _, _ = k.lstm_backward(np.ascontiguousarray(g), zero, zero,
                                   cs, acts, whT, c0)
        if xwb.requires_grad:
            xwb._accum(dz)
        if wh.requires_grad:
            hprev = np.concatenate([h0[None], hs[:-1]], axis=0).reshape(T * N, H)
            wh._accum(hprev.T @ dz.reshape(T * N, 4 * H))
    out._backward = bw
    return out


class LSTM:
    """Single LSTM layer. Gate packing order is i, f, o, g."""

    def __init__(self, input_size, hidden_size, rng, forget_bias=1.0):
        self.input_size = input_size
        self.hidden_size = hidden_size
        h = hidden_size
        self.wx = param(np.concatenate(
            [xavier_uniform(rng, input_size, h) for _ in range(4)], axis=1))
        self.wh = param(np.concatenate(
            [orthogonal(rng, h, h) for _ in range(4)], axis=1))
        b = np.zeros(4 * h)
        b[h:2 * h] = forget_bias
        self.b = param(b)

    def forward_sequence(self, x, h0=None, c0=None):
        """x: Tensor (T, N, input_size) -> Tensor (T, N, hidden_size)."""
        T, N, _ = x.shape
        if h0 is None:
            h0 = np.zeros((N, self.hidden_size))
        if c0 is None:
            c0 = np.zeros((N, self.hidden_size))
        if T == 0:
            return Tensor(np.zeros((0, N, self.hidden_size)))
        xwb = (x.reshape((T * N, self.input_size)) @ self.wx + self.b).reshape((T, N, 4 * self.hidden_size))
        return lstm_seq(xwb, self.wh, h0, c0)

    def init_state(self, n):
        return (np.zeros((n, self.hidden_size)), np.zeros((n, self.hidden_size)))

    def step(self, x, state):
        """One frame, numpy only. x: (N, input_size); state: (h, c)."""
        h_prev, c_prev = state
        hsz = self.hidden_size
        z = (x @ self.wx.data + self.b.data) + h_prev @ self.wh.data
        sig = 1.0 / (1.0 + np.exp(-z[:, :3 * hsz]))
        i, f, o = sig[:, :hsz], sig[:, hsz:2 * hsz], sig[:, 2 * hsz:]
        g = np.tanh(z[:, 3 * hsz:])
        c = f * c_prev + i * g
        h = o * np.tanh(c)
        return h, (h, c)

    def params(self, prefix):
        return [(f"{prefix}.wx", self.wx), (f"{prefix}.wh", self.wh), (f"{prefix}.b", self.b)]


class RecurrentRegressor:
    """Stacked LSTM layers with a linear readout head."""

    def __init__(self, in_dim, hidden, num_layers, out_dim, rng):
        self.cells = []
        d = in_dim
        for _ in range(num_layers):
            self.cells.append(LSTM(d, hidden, rng))
            d = hidden
        self.head = Dense(hidden, out_dim, rng)

    def forward_sequence(self, x):
        for cell in self.cells:
            x = cell.forward_sequence(x)
        return self.head(x)

    def init_state(self, n):
        return [cell.init_state(n) for cell in self.cells]

    def step(self, x, state):
        new_state = []
        for cell, st in zip(self.cells, state):
            x, st = cell.step(x, st)
            new_state.append(st)
        return self.head.apply_np(x), new_state

    def params(self, prefix):
        out = []
        for i, cell in enumerate(self.cells):
            out += cell.params(f"{prefix}.lstm{i}")
        out += self.head.params(f"{prefix}.head")
        return out


class MLP:
    """Dense stack with tanh on hidden layers, linear output."""

    def __init__(self, sizes, rng):
        self.layers = [Dense(a, b, rng) for a, b in zip(sizes[:-1], sizes[1:])]

    def __call__(self, x):
        for layer in self.layers[:-1]:
            x = layer(x).tanh()
        return self.layers[-1](x)

    def apply_np(self, x):
        for layer in self.layers[:-1]:
            x = np.tanh(layer.apply_np(x))
        return self.layers[-1].apply_np(x)

    def params(self, prefix):
        out = []
        for i, layer in enumerate(self.layers):
            out += layer.params(f"{prefix}.fc{i}")
        return out
