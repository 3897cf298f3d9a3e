"""Generation-quality metrics: projected Frechet distance between Gaussian
fits, PSNR, and 1-D SSIM over window channels."""

import numpy as np

PSNR_CAP_DB = 100.0


def _flatten_sets(a, b):
    a = np.asarray(a, dtype=np.float64).reshape(len(a), -1)
    b = np.asarray(b, dtype=np.float64).reshape(len(b), -1)
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"feature dims differ: {a.shape[1]} vs {b.shape[1]}")
    return a, b


def _sqrt_trace_of_product(ca, cb):
    # tr((ca cb)^(1/2)) = tr((ca^(1/2) cb ca^(1/2))^(1/2)), all symmetric PSD
    wa, va = np.linalg.eigh(ca)
    wa = np.clip(wa, 0.0, None)
    ra = (va * np.sqrt(wa)) @ va.T
    m = ra @ cb @ ra
    wm = np.linalg.eigh(0.5 * (m + m.T))[0]
    return float(np.sqrt(np.clip(wm, 0.0, None)).sum())


def gaussian_frechet(set_a, set_b, proj_dim=64, seed=0, reg=1e-10):
    """Frechet distance between Gaussian fits of two window sets.

    Windows are flattened, then projected to proj_dim dimensions by one
    shared seeded random projection (skipped when the flat dimension is
    already <= proj_dim). Covariances are regularized with reg*I when the
    matrix-sqrt trace degenerates. Symmetric in its arguments.
    """
    a, b = _flatten_sets(set_a, set_b)
    if len(a) == 0 or len(b) == 0:
        raise ValueError("both sets must be non-empty")
    d = a.shape[1]
    if d > proj_dim:
        rng = np.random.default_rng(seed)
        proj = rng.normal(size=(d, proj_dim)) / np.sqrt(proj_dim)
        a, b = a @ proj, b @ proj
    mu_a, mu_b = a.mean(axis=0), b.mean(axis=0)
    ca = np.cov(a, rowvar=False).reshape(a.shape[1], a.shape[1])
    cb = np.cov(b, rowvar=False).reshape(b.shape[1], b.shape[1])
    ca += reg * np.eye(len(ca))
    cb += reg * np.eye(len(cb))
    mean_term = float(((mu_a - mu_b) ** 2).sum())
    cov_term = float(np.trace(ca) + np.trace(cb)) - 2.0 * _sqrt_trace_of_product(ca, cb)
    return mean_term + max(cov_term, 0.0)


def psnr(a, b, peak):
    """10 log10(peak^2 / MSE), capped at 100 dB."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    mse = float(((a - b) ** 2).mean())
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(10.0 * np.log10(peak ** 2 / mse), PSNR_CAP_DB)


def ssim(a, b, window=11, dynamic_range=None, k1=0.01, k2=0.03):
    """Mean 1-D SSIM over sliding windows, per channel.

    a, b: (T, C) signals (a 1-D signal is treated as one channel). The
    dynamic range defaults to the joint peak-to-peak range of both inputs.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.ndim == 1:
        a, b = a[:, None], b[:, None]
    T = a.shape[0]
    window = min(window, T)
    if dynamic_range is None:
        dynamic_range = max(a.max() - a.min(), b.max() - b.min(), 1e-12)
    c1 = (k1 * dynamic_range) ** 2
    c2 = (k2 * dynamic_range) ** 2

    kernel = np.ones(window) / window
    def slide(x):
        return np.stack([np.convolve(x[:, c], kernel, mode="valid")
                         for c in range(x.shape[1])], axis=1)

    mu_a, mu_b = slide(a), slide(b)
    var_a = slide(a * a) - mu_a ** 2
    var_b = slide(b * b) - mu_b ** 2
    cov = slide(a * b) - mu_a * mu_b
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2)
    return float((num / den).mean())
