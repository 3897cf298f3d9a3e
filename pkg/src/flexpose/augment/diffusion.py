"""Stage two: denoising diffusion over the frozen VAE's latent space, and
the hierarchical sampler that turns Gaussian noise into displacement
windows."""

import csv
from dataclasses import dataclass

import numpy as np

from ..nn import MLP, Adam, clip_grad_norm, mse, tensor
from .schedule import NoiseSchedule, diffuse_forward
from .vae import TrainingDiverged, reparam_sample


@dataclass
class DenoiserConfig:
    latent: int = 32
    hidden: int = 128
    time_features: int = 32   # even; sin/cos pairs
    lr: float = 1e-3
    batch_size: int = 512
    steps: int = 2000
    grad_clip: float = 1.0


class LatentDenoiser:
    """MLP epsilon-predictor conditioned on sinusoidal step features."""

    def __init__(self, cfg: DenoiserConfig, rng):
        self.cfg = cfg
        self.mlp = MLP([cfg.latent + cfg.time_features, cfg.hidden, cfg.hidden, cfg.latent], rng)
        half = cfg.time_features // 2
        self.freqs = np.exp(-np.log(10000.0) * np.arange(half) / max(half - 1, 1))

    def params(self):
        return dict(self.mlp.params("denoiser"))

    def time_features(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        ang = t[:, None] * self.freqs[None, :]
        return np.concatenate([np.sin(ang), np.cos(ang)], axis=1)

    def predict(self, z_t, t):
        """Graph-building forward: z_t Tensor/array (n, d), t int array."""
        from ..nn import concat
        from ..nn.tensor import Tensor
        feats = self.time_features(t)
        if not isinstance(z_t, Tensor):
            z_t = tensor(z_t)
        return self.mlp(concat([z_t, tensor(feats)], axis=1))

    def predict_np(self, z_t, t):
        return self.mlp.apply_np(np.concatenate([np.atleast_2d(z_t), self.time_features(t)], axis=1))


def train_latent_denoiser(mu, logvar, schedule: NoiseSchedule, cfg: DenoiserConfig, seed):
    """Train the epsilon-prediction objective on latents sampled from the
    frozen VAE posterior (mu, logvar arrays, one row per window).

    Returns (denoiser, history of per-step loss).
    """
    rng = np.random.default_rng(seed)
    model = LatentDenoiser(cfg, rng)
    params = model.params()
    opt = Adam(params, lr=cfg.lr)
    n = len(mu)
    T = len(schedule)
    history = []
    for step in range(cfg.steps):
        idx = rng.integers(0, n, size=min(cfg.batch_size, n))
        z0 = reparam_sample(mu[idx], logvar[idx], rng.normal(size=(len(idx), cfg.latent)))
        t = rng.integers(1, T + 1, size=len(idx))
        eps = rng.normal(size=z0.shape)
        z_t = diffuse_forward(z0, t, schedule, eps)
        opt.zero_grad()
        loss = mse(model.predict(z_t, t), eps)
        if not np.isfinite(loss.item()):
            raise TrainingDiverged(f"denoiser loss became {loss.item()} at step {step}")
        loss.backward()
        clip_grad_norm(params, cfg.grad_clip)
        opt.step()
        history.append(loss.item())
    return model, history


def reverse_step(z_t, t, eps_hat, schedule: NoiseSchedule, noise):
    """One reverse transition with the lower-bound variance; noise must be
    zeros at t=1 (posterior_variance(1) is 0 anyway)."""
    beta = schedule.beta(t)
    alpha = schedule.alpha(t)
    abar = schedule.alpha_bar(t)
    mean = (z_t - beta / np.sqrt(1.0 - abar) * eps_hat) / np.sqrt(alpha)
    return mean + np.sqrt(schedule.posterior_variance(t)) * noise


def sample_latents(n, schedule: NoiseSchedule, denoiser: LatentDenoiser, seed):
    """Iterative denoising from z_T ~ N(0, I) down to z_0. Deterministic
    given the seed. Returns (n, d)."""
    if n == 0:
        return np.zeros((0, denoiser.cfg.latent))
    rng = np.random.default_rng(seed) if not isinstance(seed, np.random.Generator) else seed
    z = rng.normal(size=(n, denoiser.cfg.latent))
    for t in range(len(schedule), 0, -1):
        eps_hat = denoiser.predict_np(z, np.full(n, t))
        noise = rng.normal(size=z.shape) if t > 1 else np.zeros_like(z)
        z = reverse_step(z, t, eps_hat, schedule, noise)
    return z


def sample_windows(n, schedule, denoiser, vae, standardizer, seed):
    """Hierarchical generation: diffusion sample -> VAE decode ->
    de-standardize. Returns (n, W, C); n=0 gives an empty batch."""
    z0 = sample_latents(n, schedule, denoiser, seed)
    if n == 0:
        return np.zeros((0, vae.cfg.window, vae.cfg.channels))
    return standardizer.inverse(vae.decode_np(z0))


def vae_sample_windows(n, vae, standardizer, seed):
    """Decode z ~ N(0, I) directly, skipping the diffusion stage (the
    no-diffusion ablation path)."""
    if n == 0:
        return np.zeros((0, vae.cfg.window, vae.cfg.channels))
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(n, vae.cfg.latent))
    return standardizer.inverse(vae.decode_np(z))


def export_latents(windows, vae, standardizer, path):
    """Write one CSV row of posterior means per window (for external
    embedding or plotting)."""
    windows = np.asarray(windows, dtype=np.float64)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow([f"z{i}" for i in range(vae.cfg.latent)])
        if len(windows):
            mu, _ = vae.encode_np(standardizer.transform(windows))
            writer.writerows(mu.tolist())
