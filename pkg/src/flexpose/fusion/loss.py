"""Training loss: position MSE + rotation MSE + an elbow-focus term that
compares FK-derived flexion angles.

For collinear rest-pose arm bones, the flexion angle depends only on the
elbow's local rotation: cos(flexion) = cos|t| + (t.u)^2 (1-cos|t|)/|t|^2
where t is the elbow axis-angle and u the forearm direction. That keeps
the FK path differentiable without walking the whole chain.
"""

import numpy as np

from ..kinematics import ELBOW_SLOTS
from ..nn import mse, concat

_L = 3 * ELBOW_SLOTS[0]  # left elbow block start in the flattened 30 dims
_R = 3 * ELBOW_SLOTS[1]


def flexion_from_elbow_rotation(theta_e, forearm_dir):
    """Differentiable elbow flexion from the elbow axis-angle.

    theta_e: Tensor (..., 3); forearm_dir: unit 3-vector (constant).
    Returns Tensor (...) of flexion angles in radians.
    """
    u = np.asarray(forearm_dir, dtype=np.float64)
    phi2 = (theta_e * theta_e).sum(axis=-1)
    phi = (phi2 + 1e-24).sqrt()
    cos_phi = phi.cos()
    proj = (theta_e * u).sum(axis=-1)
    cos_angle = cos_phi + proj * proj * ((1.0 - cos_phi) / (phi2 + 1e-24))
    return cos_angle.arccos_clamped()


def pfp_loss(theta_hat, p_hat, theta_gt, p_gt, gt_flexion, weights,
             forearm_dirs=((1.0, 0.0, 0.0), (-1.0, 0.0, 0.0))):
    """Weighted total loss and its components.

    theta_hat (T, N, 30) / p_hat (T, N, 33): prediction Tensors.
    theta_gt / p_gt: matching arrays; gt_flexion: (T, N, 2) radians.
    weights: (lambda_p, lambda_theta, lambda_elbow).

    Returns (total Tensor, components dict of floats).
    """
    lam_p, lam_t, lam_e = weights
    loss_p = mse(p_hat, p_gt)
    loss_t = mse(theta_hat, theta_gt)
    flex_l = flexion_from_elbow_rotation(theta_hat[..., _L:_L + 3], forearm_dirs[0])
    flex_r = flexion_from_elbow_rotation(theta_hat[..., _R:_R + 3], forearm_dirs[1])
    flex_hat = concat([flex_l.reshape((-1, 1)), flex_r.reshape((-1, 1))], axis=1)
    loss_e = mse(flex_hat, np.asarray(gt_flexion).reshape(-1, 2))
    total = loss_p * lam_p + loss_t * lam_t + loss_e * lam_e
    return total, {"total": total.item(), "position": loss_p.item(),
                   "rotation": loss_t.item(), "elbow": loss_e.item()}
