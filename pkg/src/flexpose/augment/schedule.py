"""Noise schedule for the latent diffusion stage."""

import numpy as np


class NoiseSchedule:
    """Beta schedule with cached alpha products.

    Index convention: step t runs 1..T; alpha_bar(0) == 1 so the forward
    marginal at t=0 returns the input unchanged.
    """

    def __init__(self, betas):
        betas = np.asarray(betas, dtype=np.float64)
        if betas.ndim != 1 or len(betas) == 0:
            raise ValueError("betas must be a non-empty 1-D array")
        if not (np.all(betas > 0) and np.all(betas < 1) and np.all(np.diff(betas) > 0)):
            raise ValueError("betas must be strictly increasing in (0, 1)")
        self.betas = betas
        self.alphas = 1.0 - betas
        # alpha_bar[t] = prod_{s<=t} alpha_s, with alpha_bar[0] = 1
        self.alpha_bars = np.concatenate([[1.0], np.cumprod(self.alphas)])

    @classmethod
    def linear(cls, steps=100, beta_start=1e-3, beta_end=0.095):
        """Default: 100 steps spanning enough total noise that the terminal
        marginal of standardized data is close to N(0, I) (alpha_bar_T ~ 7e-3)."""
        return cls(np.linspace(beta_start, beta_end, steps))

    def __len__(self):
        return len(self.betas)

    @property
    def terminal_alpha_bar(self):
        return float(self.alpha_bars[-1])

    def beta(self, t):
        return self.betas[np.asarray(t) - 1]

    def alpha(self, t):
        return self.alphas[np.asarray(t) - 1]

    def alpha_bar(self, t):
        return self.alpha_bars[np.asarray(t)]

    def posterior_variance(self, t):
        """Lower-bound reverse variance (1-abar_{t-1}) / (1-abar_t) * beta_t;
        zero at t=1."""
        t = np.asarray(t)
        return (1.0 - self.alpha_bar(t - 1)) / (1.0 - self.alpha_bar(t)) * self.beta(t)


def diffuse_forward(z0, t, schedule: NoiseSchedule, eps):
    """Closed-form forward marginal z_t = sqrt(abar_t) z0 + sqrt(1-abar_t) eps.

    t: scalar or (n,) ints in [0, T]; t=0 returns z0 exactly.
    """
    z0 = np.asarray(z0, dtype=np.float64)
    t = np.asarray(t)
    if np.any(t < 0) or np.any(t > len(schedule)):
        raise ValueError(f"t out of range [0, {len(schedule)}]")
    ab = schedule.alpha_bar(t)
    if ab.ndim > 0:
        ab = ab.reshape((-1,) + (1,) * (z0.ndim - 1))
    return np.sqrt(ab) * z0 + np.sqrt(1.0 - ab) * np.asarray(eps)
