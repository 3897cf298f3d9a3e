"""Numba-compiled twins of the reference kernels.

The LSTM kernels fuse the gate nonlinearities and cell update into single
per-element passes (no temporaries); matmuls still go through BLAS. The
oscillator is the reference source compiled as-is. Contracts and gate
packing match kernels_numpy exactly.
"""

import math

import numpy as np
from numba import njit

from . import kernels_numpy as _ref


@njit(cache=True)
def lstm_forward(xwb, wh, h0, c0):
    T, N, H4 = xwb.shape
    H = H4 // 4
    hs = np.empty((T, N, H))
    cs = np.empty((T, N, H))
    acts = np.empty((T, N, H4))
    h = h0.copy()
    c = c0.copy()
    for t in range(T):
        z = xwb[t] + np.dot(h, wh)
        for r in range(N):
            for k in range(H):
                i_g = 1.0 / (1.0 + math.exp(-z[r, k]))
                f_g = 1.0 / (1.0 + math.exp(-z[r, H + k]))
                o_g = 1.0 / (1.0 + math.exp(-z[r, 2 * H + k]))
                g_g = math.tanh(z[r, 3 * H + k])
                cc = f_g * c[r, k] + i_g * g_g
                hh = o_g * math.tanh(cc)
                acts[t, r, k] = i_g
                acts[t, r, H + k] = f_g
                acts[t, r, 2 * H + k] = o_g
                acts[t, r, 3 * H + k] = g_g
                cs[t, r, k] = cc
                hs[t, r, k] = hh
                c[r, k] = cc
                h[r, k] = hh
    return hs, cs, acts


@njit(cache=True)
def lstm_backward(dhs, dh_last, dc_last, cs, acts, whT, c0):
    T, N, H = dhs.shape
    dz = np.empty((T, N, 4 * H))
    dh = dh_last.copy()
    dc = dc_last.copy()
    for t in range(T - 1, -1, -1):
        for r in range(N):
            for k in range(H):
                i_g = acts[t, r, k]
                f_g = acts[t, r, H + k]
                o_g = acts[t, r, 2 * H + k]
                g_g = acts[t, r, 3 * H + k]
                tc = math.tanh(cs[t, r, k])
                dhv = dh[r, k] + dhs[t, r, k]
                dov = dhv * tc
                dcv = dc[r, k] + dhv * o_g * (1.0 - tc * tc)
                c_prev = cs[t - 1, r, k] if t > 0 else c0[r, k]
                dz[t, r, k] = (dcv * g_g) * i_g * (1.0 - i_g)
                dz[t, r, H + k] = (dcv * c_prev) * f_g * (1.0 - f_g)
                dz[t, r, 2 * H + k] = dov * o_g * (1.0 - o_g)
                dz[t, r, 3 * H + k] = (dcv * i_g) * (1.0 - g_g * g_g)
                dc[r, k] = dcv * f_g
        dh = np.dot(dz[t], whT)
    return dz, dh, dc


oscillator_path = njit(cache=True)(_ref.oscillator_path)
