"""Stage one of the displacement generator: a sequence VAE over fixed-length
displacement windows. Encoder is an LSTM whose final state feeds the
posterior heads; the decoder runs an LSTM over the tiled latent."""

from dataclasses import dataclass

import numpy as np

from ..nn import LSTM, Dense, Adam, clip_grad_norm, tensor, tile_leading
from ..nn.tensor import Tensor


@dataclass
class VAEConfig:
    window: int = 60
    channels: int = 36
    latent: int = 32
    hidden: int = 64
    kl_weight: float = 1e-8   # keeps reconstruction dominant
    lr: float = 1e-3
    batch_size: int = 512
    steps: int = 600
    grad_clip: float = 1.0


class WindowStandardizer:
    """Per-channel mean/std over a window set; std floored at 1e-8."""

    def __init__(self, mean=None, std=None):
        self.mean = mean
        self.std = std

    def fit(self, windows):
        w = np.asarray(windows, dtype=np.float64)
        self.mean = w.mean(axis=(0, 1))
        self.std = np.maximum(w.std(axis=(0, 1)), 1e-8)
        return self

    def transform(self, windows):
        return (np.asarray(windows, dtype=np.float64) - self.mean) / self.std

    def inverse(self, windows):
        return np.asarray(windows, dtype=np.float64) * self.std + self.mean

    def state(self):
        return {"standardizer.mean": self.mean, "standardizer.std": self.std}


def reparam_sample(mu, logvar, eps):
    """z = mu + exp(logvar/2) * eps, for Tensors or arrays."""
    if isinstance(mu, Tensor):
        return mu + (logvar * 0.5).exp() * eps
    return mu + np.exp(0.5 * logvar) * eps


def kl_standard_normal(mu, logvar):
    """Closed-form KL(q || N(0, I)) per sample: 0.5 sum(mu^2 + var - 1 - logvar)."""
    if isinstance(mu, Tensor):
        var = logvar.exp()
        return ((mu * mu + var - 1.0 - logvar) * 0.5).sum(axis=1)
    var = np.exp(logvar)
    return 0.5 * (mu ** 2 + var - 1.0 - logvar).sum(axis=1)


class DisplacementVAE:
    """Window (n, W, C) <-> latent (n, d). Operates on standardized data.

    The decoder LSTM reads the tiled latent plus a fixed sinusoidal clock
    (a constant-input LSTM struggles to produce temporal structure from
    internal dynamics alone), and the output head sees the latent again as
    a skip connection."""

    CLOCK_DIM = 8

    def __init__(self, cfg: VAEConfig, rng):
        self.cfg = cfg
        self.enc_lstm = LSTM(cfg.channels, cfg.hidden, rng)
        self.enc_mu = Dense(cfg.hidden, cfg.latent, rng)
        self.enc_logvar = Dense(cfg.hidden, cfg.latent, rng)
        self.dec_lstm = LSTM(cfg.latent + self.CLOCK_DIM, cfg.hidden, rng)
        self.dec_out = Dense(cfg.hidden + cfg.latent, cfg.channels, rng)
        t = np.arange(cfg.window)[:, None] / cfg.window
        k = np.arange(self.CLOCK_DIM // 2)[None, :]
        ang = 2.0 * np.pi * t * (2.0 ** k)
        self._clock = np.concatenate([np.sin(ang), np.cos(ang)], axis=1)  # (W, CLOCK_DIM)

    def params(self):
        out = {}
        for name, p in (self.enc_lstm.params("enc_lstm") + self.enc_mu.params("enc_mu")
                        + self.enc_logvar.params("enc_logvar")
                        + self.dec_lstm.params("dec_lstm") + self.dec_out.params("dec_out")):
            out[name] = p
        return out

    def encode(self, x):
        """x: Tensor or array (n, W, C) standardized -> (mu, logvar) Tensors."""
        if not isinstance(x, Tensor):
            x = tensor(x)
        tm = x.transpose((1, 0, 2))  # time-major
        hs = self.enc_lstm.forward_sequence(tm)
        last = hs[-1]
        return self.enc_mu(last), self.enc_logvar(last)

    def decode(self, z):
        """z: Tensor (n, d) -> Tensor (n, W, C) of standardized means."""
        from ..nn import concat
        W = self.cfg.window
        n = z.shape[0]
        tiled = tile_leading(z, W)
        clock = tensor(np.broadcast_to(self._clock[:, None, :], (W, n, self.CLOCK_DIM)).copy())
        hs = self.dec_lstm.forward_sequence(concat([tiled, clock], axis=2))
        return self.dec_out(concat([hs, tiled], axis=2)).transpose((1, 0, 2))

    def encode_np(self, x):
        mu, logvar = self.encode(np.asarray(x))
        return mu.data, logvar.data

    def decode_np(self, z):
        return self.decode(tensor(z)).data

    def elbo_loss(self, x, eps, kl_weight=None):
        """Negative ELBO with a unit-scale Laplace likelihood: per-sample L1
        reconstruction plus kl_weight * closed-form KL, averaged over the
        batch. Returns (loss, recon, kl) Tensors."""
        if kl_weight is None:
            kl_weight = self.cfg.kl_weight
        xt = tensor(x)
        mu, logvar = self.encode(xt)
        z = reparam_sample(mu, logvar, eps)
        xhat = self.decode(z)
        recon = (xhat - xt).abs().sum(axis=(1, 2)).mean()
        kl = kl_standard_normal(mu, logvar).mean()
        return recon + kl * kl_weight, recon, kl


class TrainingDiverged(RuntimeError):
    pass


def train_vae(windows, cfg: VAEConfig, seed):
    """Fit standardizer + VAE on (n, W, C) displacement windows.

    Returns (model, standardizer, history) where history is the per-step
    (loss, recon, kl) record.
    """
    rng = np.random.default_rng(seed)
    std = WindowStandardizer().fit(windows)
    data = std.transform(windows)
    model = DisplacementVAE(cfg, rng)
    params = model.params()
    opt = Adam(params, lr=cfg.lr)
    n = len(data)
    history = []
    for step in range(cfg.steps):
        idx = rng.integers(0, n, size=min(cfg.batch_size, n))
        batch = data[idx]
        eps = rng.normal(size=(len(batch), cfg.latent))
        opt.zero_grad()
        loss, recon, kl = model.elbo_loss(batch, eps)
        if not np.isfinite(loss.item()):
            raise TrainingDiverged(f"VAE loss became {loss.item()} at step {step}")
        loss.backward()
        clip_grad_norm(params, cfg.grad_clip)
        opt.step()
        history.append((loss.item(), recon.item(), kl.item()))
    return model, std, history
