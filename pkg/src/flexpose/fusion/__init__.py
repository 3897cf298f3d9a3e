from .model import (
    FusionConfig, PoseFusionPredictor,
    IMU_DIM, FLEX_DIM, POS_DIM, ELBOW_OUT, OTHER_OUT,
)
from .loss import pfp_loss, flexion_from_elbow_rotation
from .train import train_pfp, make_segments
