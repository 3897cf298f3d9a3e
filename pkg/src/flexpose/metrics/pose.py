"""Pose accuracy metrics: angular, elbow angular, positional, jitter."""

import numpy as np

from ..kinematics import ELBOW_SLOTS, axis_angle_to_matrix, geodesic_angle_deg


def _check_lengths(a, b):
    if len(a) != len(b):
        raise ValueError(f"sequence length mismatch: {len(a)} vs {len(b)}")


def angular_error(pred_theta, gt_theta, slots=None):
    """Mean geodesic rotation error in degrees over frames and joints.

    pred/gt: (T, 10, 3) axis-angle; slots optionally restricts the joints.
    """
    pred_theta = np.asarray(pred_theta, dtype=np.float64)
    gt_theta = np.asarray(gt_theta, dtype=np.float64)
    _check_lengths(pred_theta, gt_theta)
    if slots is not None:
        pred_theta = pred_theta[:, slots]
        gt_theta = gt_theta[:, slots]
    ang = geodesic_angle_deg(axis_angle_to_matrix(pred_theta),
                             axis_angle_to_matrix(gt_theta))
    return float(ang.mean())


def elbow_angular_error(pred_theta, gt_theta):
    """Angular error restricted to the two elbow joints."""
    return angular_error(pred_theta, gt_theta, slots=list(ELBOW_SLOTS))


def positional_error(pred_p, gt_p):
    """Mean Euclidean endpoint distance in centimeters.

    Accepts (T, 11, 3) non-root endpoints, or (T, 12, 3) full sets with the
    pelvis pinned at the origin (it is checked and dropped).
    """
    pred_p = np.asarray(pred_p, dtype=np.float64)
    gt_p = np.asarray(gt_p, dtype=np.float64)
    _check_lengths(pred_p, gt_p)
    def strip_root(p):
        if p.shape[1] == 12:
            if np.abs(p[:, 0]).max() > 1e-9:
                raise ValueError("pelvis must be pinned at the origin")
            return p[:, 1:]
        return p
    pred_p, gt_p = strip_root(pred_p), strip_root(gt_p)
    dist = np.linalg.norm(pred_p - gt_p, axis=2)
    return float(dist.mean()) * 100.0


def jitter(positions, fps):
    """Mean jerk magnitude (m/s^3): third finite difference of positions
    times fps^3, norm per endpoint, averaged over frames and endpoints.

    positions: (T, n, 3) with T >= 4; the standard call passes all 12
    endpoints (the pinned root contributes zero).
    """
    positions = np.asarray(positions, dtype=np.float64)
    if len(positions) < 4:
        raise ValueError("need at least 4 frames for jerk")
    d3 = (positions[3:] - 3 * positions[2:-1] + 3 * positions[1:-2] - positions[:-3])
    jerk = np.linalg.norm(d3 * fps ** 3, axis=2)
    return float(jerk.mean())
