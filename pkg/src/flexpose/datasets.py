"""Synthetic dataset construction: pose sequences -> tight/loose IMU
channels, flex angles, FK targets, and displacement windows.

All IMU channels are stored T-pose normalized (the same normalization the
runtime applies after its calibration phase), gravity-free, global frame.
"""

import os
from dataclasses import dataclass, field

import numpy as np

from .kinematics import fk_sequence, elbow_flexion_sequence, upper_body
from .kinematics.rotations import matrix_to_rot6d, rot6d_to_matrix
from .synth import (
    ClothSurrogateParams, default_mounting, displacement, loose_surrogate,
    random_motion, synth_tight_imu, to_channels, save_manifest, load_manifest,
    STYLES,
)
from .augment import slice_windows


@dataclass
class SynthConfig:
    sequences: int = 24
    seconds: float = 30.0
    fps: int = 60
    styles: tuple = ("walk", "box", "mixed")
    stature: float = 1.0
    seed: int = 0
    window: int = 60
    surrogate: ClothSurrogateParams = field(default_factory=ClothSurrogateParams)


def ideal_references(skel, mounting):
    """Per-IMU reference rotations for a perfect T-pose (the rest pose):
    the inverse of each sensor's rest orientation."""
    rest = np.zeros((skel.num_rotations, 3))
    _, globals_ = fk_sequence(skel, rest[None])
    refs = np.empty((len(mounting.imus), 3, 3))
    for k, m in enumerate(mounting.imus):
        refs[k] = (globals_[0, skel.index(m.host)] @ m.rot_offset).T
    return refs


def normalize_imu(imu_seq, refs):
    """Apply reference rotations to the orientation channels:
    R_norm = ref @ R_meas. Acceleration channels pass through.
    imu_seq: (T, 4, 9); refs: (4, 3, 3)."""
    out = imu_seq.copy()
    rot = rot6d_to_matrix(imu_seq[:, :, :6])
    out[:, :, :6] = matrix_to_rot6d(np.einsum("kij,tkjl->tkil", refs, rot))
    return out


def build_dataset(cfg: SynthConfig, loose=True):
    """Generate a dataset dict of per-sequence arrays.

    Keys: imu_tight / imu_loose (T, 36), flex (T, 2) radians, theta (T, 30),
    positions (T, 33), flexion (T, 2), plus displacement windows
    (n, window, 36) pooled over sequences and the config echo.
    """
    skel = upper_body(cfg.stature)
    mounting = default_mounting()
    refs = ideal_references(skel, mounting)
    dt = 1.0 / cfg.fps
    data = {"imu_tight": [], "imu_loose": [], "flex": [], "theta": [],
            "positions": [], "flexion": [], "windows": None,
            "fps": cfg.fps, "config": cfg}
    windows = []
    for i in range(cfg.sequences):
        style = cfg.styles[i % len(cfg.styles)]
        poses = random_motion(cfg.seconds, cfg.fps, np.random.default_rng([cfg.seed, i]), style)
        tight = synth_tight_imu(skel, poses, mounting, dt)
        tight_n = normalize_imu(tight, refs)
        data["imu_tight"].append(to_channels(tight_n))
        if loose:
            lo = loose_surrogate(tight, cfg.surrogate, dt, np.random.default_rng([cfg.seed, i, 1]))
            lo_n = normalize_imu(lo, refs)
            data["imu_loose"].append(to_channels(lo_n))
            disp = to_channels(lo_n) - to_channels(tight_n)
            windows.append(slice_windows(disp, cfg.window))
        flexion = elbow_flexion_sequence(skel, poses)
        data["flexion"].append(flexion)
        data["flex"].append(flexion.copy())   # train-time flex input, radians
        positions, _ = fk_sequence(skel, poses)
        data["positions"].append(positions[:, 1:].reshape(len(poses), -1))
        data["theta"].append(poses.reshape(len(poses), -1))
    if windows:
        data["windows"] = np.concatenate(windows, axis=0)
    return data


def training_view(data, imu_key):
    """Select which IMU stream feeds training ('imu_tight' or a
    pre-augmented list stored under another key)."""
    return {"imu": data[imu_key], "flex": data["flex"], "theta": data["theta"],
            "positions": data["positions"], "flexion": data["flexion"]}


def augment_sequences(tight_list, window_pool, seed):
    """Make loose-like training inputs by adding generated displacement
    windows (tiled along time) to tight channel sequences."""
    rng = np.random.default_rng(seed)
    W = window_pool.shape[1]
    out = []
    for tight in tight_list:
        T = len(tight)
        reps = int(np.ceil(T / W))
        idx = rng.integers(0, len(window_pool), size=reps)
        disp = np.concatenate([window_pool[j] for j in idx], axis=0)[:T]
        out.append(tight + disp)
    return out


def save_dataset(path, data):
    os.makedirs(path, exist_ok=True)
    cfg = data["config"]
    manifest = {
        "fps": data["fps"],
        "sequences": len(data["imu_tight"]),
        "frames_per_sequence": [len(s) for s in data["imu_tight"]],
        "channel_layout": "4 IMUs x (rot6d[6], acc[3]); flex: (left, right) radians",
        "window": cfg.window,
        "seed": cfg.seed,
        "styles": list(cfg.styles),
        "surrogate": vars(cfg.surrogate),
        "has_loose": bool(data["imu_loose"]),
    }
    save_manifest(os.path.join(path, "manifest.json"), manifest)
    arrays = {}
    for key in ("imu_tight", "imu_loose", "flex", "theta", "positions", "flexion"):
        for i, seq in enumerate(data[key]):
            arrays[f"{key}_{i}"] = seq
    if data["windows"] is not None:
        arrays["windows"] = data["windows"]
    np.savez(os.path.join(path, "arrays.npz"), **arrays)


def load_dataset(path):
    manifest = load_manifest(os.path.join(path, "manifest.json"))
    with np.load(os.path.join(path, "arrays.npz")) as z:
        n = manifest["sequences"]
        data = {"fps": manifest["fps"], "manifest": manifest, "config": None,
                "windows": z["windows"] if "windows" in z else None}
        for key in ("imu_tight", "imu_loose", "flex", "theta", "positions", "flexion"):
            data[key] = [z[f"{key}_{i}"] for i in range(n) if f"{key}_{i}" in z]
    return data
