"""Reference numpy implementations of the hot kernels.

Shared contracts (the numba twins in kernels_numba match them):

- LSTM gate packing along the 4H axis is [i, f, o, g] so the three
  sigmoid gates form one contiguous block.
- lstm_forward returns (hs, cs, acts): hidden states, cell states, and the
  post-activation gates cached for backward.
- All arrays are float64, time-major.
"""

import numpy as np


def lstm_forward(xwb, wh, h0, c0):
    """Run the LSTM recurrence over a sequence.

    xwb: (T, N, 4H) precomputed input projections plus bias.
    wh:  (H, 4H) recurrent weights. h0, c0: (N, H) initial state.
    Returns (hs, cs, acts) with shapes (T, N, H), (T, N, H), (T, N, 4H).
    """
    T, N, H4 = xwb.shape
    H = H4 // 4
    hs = np.empty((T, N, H))
    cs = np.empty((T, N, H))
    acts = np.empty((T, N, H4))
    h = h0
    c = c0
    for t in range(T):
        z = xwb[t] + np.dot(h, wh)
        sig = 1.0 / (1.0 + np.exp(-z[:, :3 * H]))
        g = np.tanh(z[:, 3 * H:])
        acts[t, :, :3 * H] = sig
        acts[t, :, 3 * H:] = g
        i_t = acts[t, :, :H]
        f_t = acts[t, :, H:2 * H]
        o_t = acts[t, :, 2 * H:3 * H]
        c = f_t * c + i_t * g
        h = o_t * np.tanh(c)
        cs[t] = c
        hs[t] = h
    return hs, cs, acts


def lstm_backward(dhs, dh_last, dc_last, cs, acts, whT, c0):
    """Reverse-mode twin of lstm_forward.

    dhs: (T, N, H) gradients w.r.t. every emitted h_t; dh_last/dc_last:
    (N, H) extra gradients on the final state; whT: (4H, H) transposed
    recurrent weights (contiguous).

    Returns (dz, dh0, dc0); dz is (T, N, 4H), the gradient at the
    pre-activations, from which input/recurrent weight gradients follow by
    plain matmuls outside the kernel.
    """
    T, N, H = dhs.shape
    dz = np.empty((T, N, 4 * H))
    dh = dh_last.copy()
    dc = dc_last.copy()
    for t in range(T - 1, -1, -1):
        i_t = acts[t, :, :H]
        f_t = acts[t, :, H:2 * H]
        o_t = acts[t, :, 2 * H:3 * H]
        g_t = acts[t, :, 3 * H:]
        tc = np.tanh(cs[t])
        dh = dh + dhs[t]
        do = dh * tc
        dc = dc + dh * o_t * (1.0 - tc * tc)
        c_prev = cs[t - 1] if t > 0 else c0
        dz[t, :, :H] = (dc * g_t) * i_t * (1.0 - i_t)
        dz[t, :, H:2 * H] = (dc * c_prev) * f_t * (1.0 - f_t)
        dz[t, :, 2 * H:3 * H] = do * o_t * (1.0 - o_t)
        dz[t, :, 3 * H:] = (dc * i_t) * (1.0 - g_t * g_t)
        dh = np.dot(dz[t], whT)
        dc = dc * f_t
    return dz, dh, dc


def oscillator_path(drive, p11, p12, p21, p22, g1, g2, omega, zeta, max_swing):
    """Integrate a bank of damped rotational oscillators with norm clamping.

    drive: (T, M, 3) excitation held constant over each frame.
    p11..g2: (M,) zero-order-hold discretization coefficients of the state
    system [[0, 1], [-w^2, -2*zeta*w]] (exact per step, so the impulse
    response matches the closed-form solution at sample times).

    Returns (offset, accel), each (T, M, 3): offset[t] is the rotational
    offset at the start of frame t (zero state stays zero), accel[t] the
    angular acceleration there. Offset norms are clamped to max_swing
    after every step.
    """
    T, M, _ = drive.shape
    x = np.zeros((M, 3))
    v = np.zeros((M, 3))
    off = np.empty((T, M, 3))
    acc = np.empty((T, M, 3))
    for t in range(T):
        u = drive[t]
        off[t] = x
        acc[t] = u - 2.0 * zeta[:, None] * omega[:, None] * v - (omega * omega)[:, None] * x
        xn = p11[:, None] * x + p12[:, None] * v + g1[:, None] * u
        vn = p21[:, None] * x + p22[:, None] * v + g2[:, None] * u
        n = np.sqrt(xn[:, 0] ** 2 + xn[:, 1] ** 2 + xn[:, 2] ** 2)
        scale = max_swing / np.maximum(n, max_swing)
        x = xn * scale[:, None]
        v = vn
    return off, acc
