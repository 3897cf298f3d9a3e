from .schedule import NoiseSchedule, diffuse_forward
from .vae import (
    VAEConfig, DisplacementVAE, WindowStandardizer,
    reparam_sample, kl_standard_normal, train_vae, TrainingDiverged,
)
from .diffusion import (
    DenoiserConfig, LatentDenoiser, train_latent_denoiser,
    reverse_step, sample_latents, sample_windows, vae_sample_windows,
    export_latents,
)


def slice_windows(channels, window, stride=None):
    """Cut a (T, C) channel sequence into (n, window, C) windows."""
    import numpy as np
    channels = np.asarray(channels)
    stride = stride or window
    starts = range(0, len(channels) - window + 1, stride)
    return np.stack([channels[s:s + window] for s in starts]) if len(channels) >= window \
        else np.zeros((0, window, channels.shape[1]))
