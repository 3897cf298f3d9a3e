import subprocess
import sys

import numpy as np
import pytest

from flexpose import accel


def test_backend_selection_and_restore():
    prev = accel.active_backend()
    try:
        assert accel.set_backend("numpy") == "numpy"
        assert accel.kernels().__name__.endswith("kernels_numpy")
        assert accel.set_backend("numba") == "numba"
        assert accel.kernels().__name__.endswith("kernels_numba")
        with pytest.raises(ValueError):
            accel.set_backend("cuda")
    finally:
        accel.set_backend(prev)


def test_env_flag_selects_backend():
    code = "from flexpose import accel; print(accel.active_backend())"
    for flag in ("numpy", "numba"):
        out = subprocess.run([sys.executable, "-c", code],
                             env={"FLEXPOSE_BACKEND": flag, "PATH": "/usr/bin:/bin"},
                             capture_output=True, text=True)
        assert out.stdout.strip() == flag, out.stderr


def test_backends_agree_on_lstm(rng):
    T, N, H = 9, 4, 6
    xwb = rng.normal(size=(T, N, 4 * H))
    wh = rng.normal(size=(H, 4 * H)) * 0.3
    h0 = rng.normal(size=(N, H))
    c0 = rng.normal(size=(N, H))
    dhs = rng.normal(size=(T, N, H))
    whT = np.ascontiguousarray(wh.T)
    prev = accel.active_backend()
    try:
        results = {}
        for b in ("numpy", "numba"):
            accel.set_backend(b)
            k = accel.kernels()
            hs, cs, acts = k.lstm_forward(xwb, wh, h0, c0)
            dz, dh0, dc0 = k.lstm_backward(dhs, np.zeros((N, H)), np.zeros((N, H)),
                                           cs, acts, whT, c0)
            results[b] = (hs, cs, acts, dz, dh0, dc0)
        for a, b in zip(results["numpy"], results["numba"]):
            assert np.allclose(a, b, rtol=1e-10, atol=1e-13)
    finally:
        accel.set_backend(prev)


def test_backends_agree_on_oscillator(rng):
    drive = rng.normal(size=(500, 4, 3))
    M = 4
    from flexpose.synth import discretize_oscillator
    coef = discretize_oscillator(np.full(M, 12.0), np.full(M, 0.25), 1 / 60)
    args = coef + (np.full(M, 12.0), np.full(M, 0.25), np.full(M, 0.35))
    prev = accel.active_backend()
    try:
        accel.set_backend("numpy")
        off_a, acc_a = accel.kernels().oscillator_path(drive, *args)
        accel.set_backend("numba")
        off_b, acc_b = accel.kernels().oscillator_path(drive, *args)
        assert np.allclose(off_a, off_b, rtol=1e-12, atol=1e-15)
        assert np.allclose(acc_a, acc_b, rtol=1e-12, atol=1e-15)
    finally:
        accel.set_backend(prev)
