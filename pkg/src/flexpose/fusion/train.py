"""Fusion predictor training: truncated BPTT over fixed-length segments."""

import logging

import numpy as np

from ..augment.vae import TrainingDiverged
from ..nn import Adam, clip_grad_norm
from .loss import pfp_loss
from .model import FusionConfig, PoseFusionPredictor

logger = logging.getLogger(__name__)


def make_segments(sequences, length):
    """Cut each (T, ...) array into non-overlapping length-L chunks and
    stack them as (S, L, ...). Short remainders are dropped."""
    chunks = []
    for seq in sequences:
        n = len(seq) // length
        for i in range(n):
            chunks.append(seq[i * length:(i + 1) * length])
    if not chunks:
        raise ValueError("no full segments; shorten tbptt or lengthen sequences")
    return np.stack(chunks)


def train_pfp(dataset, cfg: FusionConfig, seed):
    """Train on a synthetic dataset dict with per-sequence lists:
    imu (T, 36), flex (T, 2) radians, theta (T, 30), positions (T, 33),
    flexion (T, 2).

    Flex inputs get train-time Gaussian noise (cfg.flex_noise) and are
    zeroed entirely when cfg.zero_flex is set. On divergence, parameters
    are rolled back to the last finite snapshot and TrainingDiverged is
    raised. Returns (model, history).
    """
    rng = np.random.default_rng(seed)
    model = PoseFusionPredictor(cfg, rng)

    imu = make_segments(dataset["imu"], cfg.tbptt)
    flex = make_segments(dataset["flex"], cfg.tbptt)
    theta = make_segments(dataset["theta"], cfg.tbptt)
    pos = make_segments(dataset["positions"], cfg.tbptt)
    flexion = make_segments(dataset["flexion"], cfg.tbptt)
    S = len(imu)

    train_flex = np.zeros_like(flex) if cfg.zero_flex else flex
    model.set_standardization(imu.reshape(-1, imu.shape[-1]),
                              train_flex.reshape(-1, flex.shape[-1]))

    params = model.params()
    opt = Adam(params, lr=cfg.lr, weight_decay=cfg.weight_decay)
    history = []
    snapshot = {k: p.data.copy() for k, p in params.items()}
    for step in range(cfg.steps):
        idx = rng.integers(0, S, size=min(cfg.batch_size, S))
        # time-major batches
        b_imu = np.ascontiguousarray(imu[idx].transpose(1, 0, 2))
        b_flex = np.ascontiguousarray(flex[idx].transpose(1, 0, 2))
        if cfg.zero_flex:
            b_flex = np.zeros_like(b_flex)
        elif cfg.flex_noise > 0:
            b_flex = b_flex + rng.normal(size=b_flex.shape) * cfg.flex_noise
        b_theta = np.ascontiguousarray(theta[idx].transpose(1, 0, 2))
        b_pos = np.ascontiguousarray(pos[idx].transpose(1, 0, 2))
        b_flexion = np.ascontiguousarray(flexion[idx].transpose(1, 0, 2))

        opt.zero_grad()
        theta_hat, p_hat = model.forward_train(b_imu, b_flex)
        total, comps = pfp_loss(theta_hat, p_hat, b_theta, b_pos, b_flexion,
                                cfg.loss_weights)
        if not np.isfinite(comps["total"]):
            for k, p in params.items():
                p.data[...] = snapshot[k]
            raise TrainingDiverged(
                f"loss became {comps['total']} at step {step}; "
                f"parameters rolled back to step {max(0, step - step % 25)}")
        total.backward()
        clip_grad_norm(params, cfg.grad_clip)
        opt.step()
        history.append(comps)
        if step % 25 == 0:
            snapshot = {k: p.data.copy() for k, p in params.items()}
            logger.debug("pfp step %d: %s", step, comps)
    return model, history
