from .mounting import (
    ImuMount, MountingSpec, default_mounting,
    IMU_NAMES, IMU_HOSTS, NUM_IMUS, CHANNELS_PER_IMU, IMU_CHANNELS, FLEX_SIDES,
)
from .imu import synth_tight_imu, sensor_trajectories, to_channels, from_channels
from .flex import FlexSensorModel, synth_flex, inject_primary_flex_displacement
from .surrogate import (
    ClothSurrogateParams, discretize_oscillator, loose_surrogate,
    displacement, apply_displacement,
)
from .motions import random_motion, tpose, elbow_bend_gesture, STYLES
from .poseio import save_pose_csv, load_pose_csv, save_manifest, load_manifest, POSE_COLUMNS
