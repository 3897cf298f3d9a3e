from .pose import angular_error, elbow_angular_error, positional_error, jitter
from .signal import gaussian_frechet, psnr, ssim, PSNR_CAP_DB
from .report import PoseMetricsReport, evaluate_pose_sequences
