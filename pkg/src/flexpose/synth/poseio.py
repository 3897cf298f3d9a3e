"""Pose CSV files and dataset manifests."""

import json

import numpy as np

from ..kinematics import ROTATION_NAMES

POSE_COLUMNS = [f"{name}_{ax}" for name in ROTATION_NAMES for ax in "xyz"]


def save_pose_csv(path, poses):
    """One row per frame, 30 axis-angle columns."""
    poses = np.asarray(poses, dtype=np.float64)
    if poses.ndim != 3 or poses.shape[1:] != (10, 3):
        raise ValueError(f"expected (T, 10, 3) poses, got {poses.shape}")
    flat = poses.reshape(len(poses), 30)
    np.savetxt(path, flat, delimiter=",", header=",".join(POSE_COLUMNS), comments="")


def load_pose_csv(path):
    with open(path) as f:
        header = f.readline().strip().split(",")
    if header != POSE_COLUMNS:
        raise ValueError(f"unexpected pose CSV header in {path}")
    flat = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if flat.shape[1] != 30:
        raise ValueError(f"expected 30 columns, got {flat.shape[1]}")
    return flat.reshape(len(flat), 10, 3)


def save_manifest(path, manifest):
    with open(path, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")


def load_manifest(path):
    with open(path) as f:
        return json.load(f)
