"""Loose-wear surrogate: damped rotational oscillators excited by body
acceleration stand in for fabric dynamics, plus the displacement algebra
(loose - tight and its inverse)."""

from dataclasses import dataclass

import numpy as np

from .. import accel
from ..kinematics import axis_angle_to_matrix, matrix_to_rot6d, rot6d_to_matrix
from .mounting import NUM_IMUS


@dataclass
class ClothSurrogateParams:
    """Per-IMU fabric oscillator parameters.

    omega: natural frequency (rad/s); zeta: damping ratio; drive_gain maps
    host acceleration (m/s^2) to angular excitation (rad/s^2 per m/s^2);
    max_swing caps the rotational offset norm (rad); accel_noise is the
    white-noise sigma (m/s^2) on both the excitation and the output
    acceleration. lever_arm converts angular acceleration back to the
    induced linear acceleration at the sensor.
    """
    omega: float = 12.0
    zeta: float = 0.25
    drive_gain: float = 2.0
    max_swing: float = 0.35
    accel_noise: float = 0.3
    lever_arm: float = 0.05

    def validate(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if not 0 < self.zeta <= 1:
            raise ValueError("zeta must be in (0, 1]")
        if not 0 < self.max_swing <= np.pi / 4:
            raise ValueError("max_swing must be in (0, pi/4]")
        if self.drive_gain < 0 or self.accel_noise < 0 or self.lever_arm < 0:
            raise ValueError("gains and noise must be non-negative")


def discretize_oscillator(omega, zeta, dt):
    """Exact zero-order-hold discretization of x'' = u - 2*zeta*omega*x' -
    omega^2*x. Returns (p11, p12, p21, p22, g1, g2), vectorized over the
    inputs. zeta is nudged below 1 so the underdamped form applies."""
    omega = np.asarray(omega, dtype=np.float64)
    zeta = np.minimum(np.asarray(zeta, dtype=np.float64), 1.0 - 1e-9)
    wd = omega * np.sqrt(1.0 - zeta ** 2)
    e = np.exp(-zeta * omega * dt)
    s, c = np.sin(wd * dt), np.cos(wd * dt)
    p11 = e * (c + zeta * omega / wd * s)
    p12 = e * s / wd
    p21 = -e * omega ** 2 / wd * s
    p22 = e * (c - zeta * omega / wd * s)
    g1 = (1.0 - p22 - 2.0 * zeta * omega * p12) / omega ** 2
    g2 = p12
    return p11, p12, p21, p22, g1, g2


def _per_imu(params):
    if isinstance(params, ClothSurrogateParams):
        params = [params] * NUM_IMUS
    if len(params) != NUM_IMUS:
        raise ValueError(f"need {NUM_IMUS} parameter sets, got {len(params)}")
    for p in params:
        p.validate()
    return params


def loose_surrogate(tight, params, dt, seed):
    """Perturb a tight IMU sequence into a loose-worn one.

    Each IMU gets a 3-DoF damped oscillator driven by drive_gain * (host
    acceleration + noise); its state is a rotational offset (norm-clamped
    to max_swing) composed locally onto the tight orientation, and its
    angular acceleration times lever_arm is added to the acceleration
    channels together with output noise. Deterministic given the seed.

    tight: (T, 4, 9); returns (T, 4, 9).
    """
    tight = np.asarray(tight, dtype=np.float64)
    T = tight.shape[0]
    params = _per_imu(params)
    rng = np.random.default_rng(seed) if not isinstance(seed, np.random.Generator) else seed

    omega = np.array([p.omega for p in params])
    zeta = np.array([p.zeta for p in params])
    gain = np.array([p.drive_gain for p in params])
    swing = np.array([p.max_swing for p in params])
    sigma = np.array([p.accel_noise for p in params])
    lever = np.array([p.lever_arm for p in params])

    p11, p12, p21, p22, g1, g2 = discretize_oscillator(omega, zeta, dt)
    host_acc = tight[:, :, 6:]
    drive_noise = rng.normal(size=(T, NUM_IMUS, 3)) * sigma[None, :, None]
    drive = gain[None, :, None] * (host_acc + drive_noise)
    offset, ang_acc = accel.kernels().oscillator_path(
        np.ascontiguousarray(drive), p11, p12, p21, p22, g1, g2, omega, zeta, swing)

    loose = tight.copy()
    # compose only where the oscillator actually moved, so a resting
    # oscillator reproduces the tight channels bit-exactly
    moved = np.linalg.norm(offset, axis=2) > 0
    if np.any(moved):
        idx = np.nonzero(moved)
        tight_rot = rot6d_to_matrix(tight[:, :, :6][idx])
        loose[:, :, :6][idx] = matrix_to_rot6d(tight_rot @ axis_angle_to_matrix(offset[idx]))
    out_noise = rng.normal(size=(T, NUM_IMUS, 3)) * sigma[None, :, None]
    loose[:, :, 6:] = host_acc + lever[None, :, None] * ang_acc + out_noise
    return loose


def displacement(tight, loose):
    """Per-channel loose - tight. Shapes must match."""
    tight = np.asarray(tight, dtype=np.float64)
    loose = np.asarray(loose, dtype=np.float64)
    if tight.shape != loose.shape:
        raise ValueError(f"length/shape mismatch: {tight.shape} vs {loose.shape}")
    return loose - tight


def apply_displacement(tight, disp):
    """Inverse of displacement: tight + disp per channel."""
    tight = np.asarray(tight, dtype=np.float64)
    disp = np.asarray(disp, dtype=np.float64)
    if tight.shape != disp.shape:
        raise ValueError(f"length/shape mismatch: {tight.shape} vs {disp.shape}")
    return tight + disp
