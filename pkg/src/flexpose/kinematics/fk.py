"""Forward kinematics and elbow flexion angles."""

import numpy as np

from .rotations import axis_angle_to_matrix
from .skeleton import Skeleton


class GeometryError(ValueError):
    pass


def fk_sequence(skel: Skeleton, poses):
    """FK over a pose sequence.

    poses: (T, R, 3) axis-angle, one row per rotation slot.
    Returns (positions (T, n, 3), globals (T, n, 3, 3)); the root stays at
    the origin and offsets are rotated by the parent's global rotation.
    """
    poses = np.asarray(poses, dtype=np.float64)
    if poses.ndim == 2:
        poses = poses[None]
    T = poses.shape[0]
    if poses.shape[1:] != (skel.num_rotations, 3):
        raise ValueError(f"pose shape {poses.shape[1:]} != ({skel.num_rotations}, 3)")
    n = skel.num_nodes
    local = np.broadcast_to(np.eye(3), (T, n, 3, 3)).copy()
    local[:, skel.rotating] = axis_angle_to_matrix(poses)
    globals_ = np.empty((T, n, 3, 3))
    positions = np.zeros((T, n, 3))
    globals_[:, 0] = local[:, 0]
    for j in range(1, n):
        p = skel.parents[j]
        globals_[:, j] = globals_[:, p] @ local[:, j]
        positions[:, j] = positions[:, p] + (globals_[:, p] @ skel.offsets[j])
    return positions, globals_


def fk(skel: Skeleton, pose):
    """Single-pose FK: returns (positions (n, 3), globals (n, 3, 3))."""
    positions, globals_ = fk_sequence(skel, np.asarray(pose)[None])
    return positions[0], globals_[0]


def _flexion_from_points(shoulder, elbow, wrist):
    u = shoulder - elbow
    v = wrist - elbow
    nu = np.linalg.norm(u, axis=-1)
    nv = np.linalg.norm(v, axis=-1)
    if np.any(nu < 1e-12) or np.any(nv < 1e-12):
        raise GeometryError("degenerate zero-length arm bone")
    cos = np.clip((u * v).sum(axis=-1) / (nu * nv), -1.0, 1.0)
    return np.pi - np.arccos(cos)


def elbow_flexion_sequence(skel: Skeleton, poses):
    """Per-frame (left, right) elbow flexion in radians: 0 for a straight
    arm, pi/2 for a right-angle bend. Returns (T, 2)."""
    positions, _ = fk_sequence(skel, poses)
    out = np.empty((positions.shape[0], 2))
    for k, side in enumerate(("l", "r")):
        s = skel.index(f"{side}_shoulder")
        e = skel.index(f"{side}_elbow")
        w = skel.index(f"{side}_wrist")
        out[:, k] = _flexion_from_points(positions[:, s], positions[:, e], positions[:, w])
    return out


def elbow_flexion(skel: Skeleton, pose):
    """(left, right) flexion in radians for one pose."""
    left, right = elbow_flexion_sequence(skel, np.asarray(pose)[None])[0]
    return float(left), float(right)
