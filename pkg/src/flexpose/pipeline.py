"""End-to-end glue: model persistence, dataset evaluation, and the
augmented-training recipe shared by the CLI and the acceptance suite."""

import dataclasses
import logging

import numpy as np

from .augment import (
    DenoiserConfig, DisplacementVAE, LatentDenoiser, NoiseSchedule,
    VAEConfig, WindowStandardizer, sample_windows, train_latent_denoiser,
    train_vae,
)
from .datasets import augment_sequences, training_view
from .fusion import FusionConfig, PoseFusionPredictor, train_pfp
from .kinematics import fk_sequence, upper_body
from .metrics import evaluate_pose_sequences
from .nn import load_checkpoint, restore_params, save_checkpoint
from .synth import ClothSurrogateParams

logger = logging.getLogger(__name__)


# -- checkpoints -----------------------------------------------------------

def save_pfp(path, model, seed=None, step=0):
    params = dict(model.params())
    params.update({k: v for k, v in model.standardization_state().items()})
    cfg = dataclasses.asdict(model.cfg)
    cfg["loss_weights"] = list(cfg["loss_weights"])
    save_checkpoint(path, "pose-fusion-predictor", params, seed=seed, step=step,
                    extra={"config": cfg})


def load_pfp(path):
    meta, arrays = load_checkpoint(path)
    if meta["kind"] != "pose-fusion-predictor":
        raise ValueError(f"not a fusion checkpoint: {meta['kind']}")
    cfg_d = dict(meta["extra"]["config"])
    cfg_d["loss_weights"] = tuple(cfg_d["loss_weights"])
    cfg = FusionConfig(**cfg_d)
    model = PoseFusionPredictor(cfg, np.random.default_rng(0))
    restore_params(model.params(), arrays)
    model.load_standardization(arrays)
    return model


def save_dldm(path, vae, denoiser, standardizer, schedule, seed=None, step=0):
    params = dict(vae.params())
    params.update(denoiser.params())
    params.update(standardizer.state())
    params["schedule.betas"] = schedule.betas
    save_checkpoint(path, "displacement-generator", params, seed=seed, step=step,
                    extra={"vae_config": dataclasses.asdict(vae.cfg),
                           "denoiser_config": dataclasses.asdict(denoiser.cfg)})


def load_dldm(path):
    meta, arrays = load_checkpoint(path)
    if meta["kind"] != "displacement-generator":
        raise ValueError(f"not a displacement-generator checkpoint: {meta['kind']}")
    vcfg = VAEConfig(**meta["extra"]["vae_config"])
    dcfg = DenoiserConfig(**meta["extra"]["denoiser_config"])
    rng = np.random.default_rng(0)
    vae = DisplacementVAE(vcfg, rng)
    denoiser = LatentDenoiser(dcfg, rng)
    restore_params(vae.params(), arrays)
    restore_params(denoiser.params(), arrays)
    std = WindowStandardizer(arrays["standardizer.mean"], arrays["standardizer.std"])
    schedule = NoiseSchedule(arrays["schedule.betas"])
    return vae, denoiser, std, schedule


# -- training recipes ------------------------------------------------------

def train_displacement_generator(windows, vae_cfg: VAEConfig, den_cfg: DenoiserConfig,
                                 schedule: NoiseSchedule, seed):
    """Two-stage fit: VAE, then the latent denoiser on the frozen VAE's
    posterior. Returns (vae, denoiser, standardizer, histories)."""
    vae, std, vhist = train_vae(windows, vae_cfg, seed)
    mu, logvar = vae.encode_np(std.transform(windows))
    denoiser, dhist = train_latent_denoiser(mu, logvar, schedule, den_cfg, seed + 1)
    logger.info("generator trained: vae loss %.3f -> %.3f, denoiser %.3f -> %.3f",
                vhist[0][0], vhist[-1][0], dhist[0], float(np.mean(dhist[-25:])))
    return vae, denoiser, std, (vhist, dhist)


def train_fusion(data, cfg: FusionConfig, seed, augment_windows=None):
    """Train the fusion predictor on tight channels, optionally augmented
    with generated displacement windows."""
    view = training_view(data, "imu_tight")
    if augment_windows is not None:
        view = dict(view)
        view["imu"] = augment_sequences(data["imu_tight"], augment_windows, seed + 7)
    return train_pfp(view, cfg, seed)


# -- evaluation ------------------------------------------------------------

def fk_positions(skel, thetas):
    """(T, 10, 3) rotations -> (T, 12, 3) endpoint positions."""
    positions, _ = fk_sequence(skel, thetas)
    return positions


def evaluate_model(model, data, imu_key="imu_loose", skel=None, fps=None):
    """Run the streaming-exact forward over every sequence, derive endpoint
    positions by FK, and score against ground truth.

    Returns the PoseMetricsReport."""
    skel = skel or upper_body()
    fps = fps or data["fps"]
    seqs = data[imu_key]
    T = len(seqs[0])
    if any(len(s) != T for s in seqs):
        raise ValueError("evaluation expects equal-length sequences")
    imu = np.stack(seqs, axis=1)                      # (T, n, 36)
    flex = np.stack(data["flex"], axis=1)             # (T, n, 2)
    theta_hat, _ = model.forward_sequence(imu, flex)  # (T, n, 10, 3)
    pred_t, gt_t, pred_p, gt_p = [], [], [], []
    for i in range(imu.shape[1]):
        t_hat = theta_hat[:, i]
        t_gt = data["theta"][i].reshape(T, 10, 3)
        pred_t.append(t_hat)
        gt_t.append(t_gt)
        pred_p.append(fk_positions(skel, t_hat))
        gt_p.append(fk_positions(skel, t_gt))
    return evaluate_pose_sequences(pred_t, gt_t, pred_p, gt_p, fps)


def surrogate_from_dict(d):
    return ClothSurrogateParams(**d) if d else ClothSurrogateParams()
