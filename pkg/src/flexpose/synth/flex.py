"""Flex sensor synthesis and the donning-shift distortion."""

from dataclasses import dataclass

import numpy as np

from ..kinematics import elbow_flexion_sequence


@dataclass
class FlexSensorModel:
    """Affine response: raw reading = gain * flexion_angle(rad) + offset."""
    gain: float = 1.0
    offset: float = 0.0
    full_scale_span: float = np.pi  # raw-unit span of the sensor's output range


def synth_flex(skel, poses, model: FlexSensorModel = None):
    """Simulated raw flex readings from the elbow flexion angles.

    Returns (T, 2): left, right.
    """
    if model is None:
        model = FlexSensorModel()
    flexion = elbow_flexion_sequence(skel, poses)
    return model.gain * flexion + model.offset


def inject_primary_flex_displacement(flex, gain, offset, saturation=50.0):
    """Monotone range-shifting distortion modeling a garment-donning shift:
    reading -> s * tanh((gain*x + offset) / s). gain must be positive so
    monotonicity is preserved; large saturation approaches the pure affine
    map."""
    if gain <= 0:
        raise ValueError("wear gain must be positive")
    if saturation <= 0:
        raise ValueError("saturation must be positive")
    flex = np.asarray(flex, dtype=np.float64)
    return saturation * np.tanh((gain * flex + offset) / saturation)
