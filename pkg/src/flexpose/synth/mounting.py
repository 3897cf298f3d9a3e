"""Sensor placement on the skeleton."""

from dataclasses import dataclass, field

import numpy as np

IMU_NAMES = ["l_forearm", "r_forearm", "back", "waist"]
IMU_HOSTS = {"l_forearm": "l_elbow", "r_forearm": "r_elbow",
             "back": "chest", "waist": "pelvis"}
NUM_IMUS = 4
CHANNELS_PER_IMU = 9       # rot6d (6) + linear acceleration (3)
IMU_CHANNELS = NUM_IMUS * CHANNELS_PER_IMU
FLEX_SIDES = ("l", "r")


@dataclass
class ImuMount:
    name: str
    host: str                      # bone = segment from this node to its child
    rot_offset: np.ndarray = None  # (3, 3) fixed mounting rotation
    pos_offset: np.ndarray = None  # (3,) meters, in the host frame

    def __post_init__(self):
        if self.rot_offset is None:
            self.rot_offset = np.eye(3)
        self.rot_offset = np.asarray(self.rot_offset, dtype=np.float64)
        self.pos_offset = np.asarray(self.pos_offset, dtype=np.float64)


@dataclass
class MountingSpec:
    imus: list
    flex_sides: tuple = FLEX_SIDES

    def __post_init__(self):
        names = [m.name for m in self.imus]
        if names != IMU_NAMES:
            raise ValueError(f"expected IMUs {IMU_NAMES}, got {names}")
        for m in self.imus:
            if m.host != IMU_HOSTS[m.name]:
                raise ValueError(f"IMU {m.name} must sit on {IMU_HOSTS[m.name]}")
        if tuple(self.flex_sides) != FLEX_SIDES:
            raise ValueError("flex sensors must be on the left and right elbows")


def default_mounting():
    """Mounting used throughout: forearm IMUs part-way down the forearm and a
    little off the bone axis, back IMU on the upper back, waist IMU at the
    lower back. Rotation offsets identity."""
    return MountingSpec([
        ImuMount("l_forearm", "l_elbow", pos_offset=[0.12, 0.0, 0.03]),
        ImuMount("r_forearm", "r_elbow", pos_offset=[-0.12, 0.0, 0.03]),
        ImuMount("back", "chest", pos_offset=[0.0, 0.10, -0.08]),
        ImuMount("waist", "pelvis", pos_offset=[0.0, 0.02, -0.10]),
    ])
