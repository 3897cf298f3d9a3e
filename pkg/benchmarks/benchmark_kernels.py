"""Compare the numba and numpy kernel backends.

Run:  python benchmarks/benchmark_kernels.py

Covers the LSTM recurrence (forward/backward) at a training-sized batch
and at the streaming batch size, plus the cloth-surrogate oscillator.
The crossover is real: numpy's SIMD transcendentals win the large-batch
LSTM forward, while numba wins the backward, the small-batch regime, and
the oscillator by a wide margin.
"""

import time

import numpy as np

from flexpose import accel


def time_call(fn, repeats=10):
    fn()  # warm-up / compile
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats * 1e3


def lstm_case(T, N, H, repeats):
    rng = np.random.default_rng(0)
    xwb = rng.normal(size=(T, N, 4 * H))
    wh = rng.normal(size=(H, 4 * H)) * 0.3
    h0 = np.zeros((N, H))
    c0 = np.zeros((N, H))
    dhs = rng.normal(size=(T, N, H))
    whT = np.ascontiguousarray(wh.T)
    rows = {}
    for backend in ("numpy", "numba"):
        accel.set_backend(backend)
        k = accel.kernels()
        fwd = time_call(lambda: k.lstm_forward(xwb, wh, h0, c0), repeats)
        _, cs, acts = k.lstm_forward(xwb, wh, h0, c0)
        bwd = time_call(lambda: k.lstm_backward(dhs, h0, c0, cs, acts, whT, c0), repeats)
        rows[backend] = (fwd, bwd)
    return rows


def oscillator_case(T, repeats):
    rng = np.random.default_rng(0)
    drive = rng.normal(size=(T, 4, 3)) * 0.5
    M = 4
    from flexpose.synth import discretize_oscillator
    coef = discretize_oscillator(np.full(M, 12.0), np.full(M, 0.25), 1.0 / 60)
    args = coef + (np.full(M, 12.0), np.full(M, 0.25), np.full(M, 0.35))
    rows = {}
    for backend in ("numpy", "numba"):
        accel.set_backend(backend)
        k = accel.kernels()
        rows[backend] = time_call(lambda: k.oscillator_path(drive, *args), repeats)
    return rows


def main():
    print(f"{'kernel':34s} {'numpy':>10s} {'numba':>10s} {'numba speedup':>14s}")
    for T, N, H, label in [(60, 256, 64, "training batch"),
                           (60, 64, 96, "small batch"),
                           (1, 1, 256, "streaming step")]:
        rows = lstm_case(T, N, H, repeats=5 if N >= 256 else 20)
        for i, which in enumerate(("forward", "backward")):
            a, b = rows["numpy"][i], rows["numba"][i]
            name = f"lstm {which} T={T} N={N} H={H}"
            print(f"{name:34s} {a:8.2f}ms {b:8.2f}ms {a / b:13.2f}x")
    for T in (3600, 36000):
        rows = oscillator_case(T, repeats=5)
        name = f"oscillator T={T}"
        print(f"{name:34s} {rows['numpy']:8.2f}ms {rows['numba']:8.2f}ms "
              f"{rows['numpy'] / rows['numba']:13.2f}x")


if __name__ == "__main__":
    main()
