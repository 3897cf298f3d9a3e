"""Tight-worn IMU synthesis from pose sequences."""

import numpy as np

from ..kinematics import fk_sequence, matrix_to_rot6d
from .mounting import MountingSpec, NUM_IMUS, CHANNELS_PER_IMU


def sensor_trajectories(skel, poses, mounting: MountingSpec, root_translation=None):
    """Global positions of each IMU's mounting point: (T, 4, 3)."""
    positions, globals_ = fk_sequence(skel, poses)
    out = np.empty((len(positions), NUM_IMUS, 3))
    for k, m in enumerate(mounting.imus):
        host = skel.index(m.host)
        point = positions[:, host] + np.einsum("tij,j->ti", globals_[:, host], m.pos_offset)
        if root_translation is not None:
            point = point + np.asarray(root_translation, dtype=np.float64)
        out[:, k] = point
    return out


def synth_tight_imu(skel, poses, mounting: MountingSpec, dt, root_translation=None):
    """Virtual IMUs rigidly attached to the skeleton.

    poses: (T, R, 3) axis-angle, T >= 3 (accelerations are second central
    differences). Orientation channels are bone global rotation composed
    with the mounting offset, as rot6d; acceleration is the gravity-free
    second derivative of the sensor point in the global frame.
    root_translation (T, 3), if given, displaces the whole body (it affects
    the sensor trajectory only, poses stay root-pinned).

    Returns (T, 4, 9) float64.
    """
    poses = np.asarray(poses, dtype=np.float64)
    T = poses.shape[0]
    if T < 3:
        raise ValueError(f"need at least 3 frames for accelerations, got {T}")
    positions, globals_ = fk_sequence(skel, poses)
    out = np.empty((T, NUM_IMUS, CHANNELS_PER_IMU))
    for k, m in enumerate(mounting.imus):
        host = skel.index(m.host)
        rot = globals_[:, host] @ m.rot_offset
        out[:, k, :6] = matrix_to_rot6d(rot)
        point = positions[:, host] + np.einsum("tij,j->ti", globals_[:, host], m.pos_offset)
        if root_translation is not None:
            point = point + np.asarray(root_translation, dtype=np.float64)
        acc = np.empty_like(point)
        acc[1:-1] = (point[2:] - 2.0 * point[1:-1] + point[:-2]) / dt ** 2
        acc[0] = acc[1]
        acc[-1] = acc[-2]
        out[:, k, 6:] = acc
    return out


def to_channels(imu_seq):
    """(T, 4, 9) -> (T, 36) flat channel view (copy)."""
    imu_seq = np.asarray(imu_seq)
    return imu_seq.reshape(imu_seq.shape[0], -1).copy()


def from_channels(flat):
    """(T, 36) -> (T, 4, 9)."""
    flat = np.asarray(flat)
    return flat.reshape(flat.shape[0], NUM_IMUS, CHANNELS_PER_IMU).copy()
