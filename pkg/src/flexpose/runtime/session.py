"""Calibration state machine and per-frame inference.

Phases run Idle -> TPoseCalibrating -> ElbowCalibrating -> Running; any
calibration failure drops back to Idle with the reason raised. Running
normalizes IMU orientations by the T-pose references, rescales flex
readings through the captured calibration range, and feeds the fusion
predictor one frame at a time.
"""

import enum
import json
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from ..calibration import (CalibrationRange, DegenerateRangeError, capture_range,
                           DEFAULT_TARGETS, DEFAULT_TRIM)
from ..kinematics import (fk, geodesic_angle_deg, matrix_to_quat, mean_rotation,
                          quat_to_matrix, matrix_to_rot6d, rot6d_to_matrix)
from .wire import WireFrame

logger = logging.getLogger(__name__)


class Phase(enum.Enum):
    IDLE = "idle"
    TPOSE = "tpose_calibrating"
    ELBOW = "elbow_calibrating"
    RUNNING = "running"


class UnstablePoseError(RuntimeError):
    """Orientation variance exceeded the threshold during T-pose capture."""


class SessionError(RuntimeError):
    pass


@dataclass
class SessionConfig:
    fps: int = 60
    tpose_seconds: float = 5.0
    elbow_seconds: float = 1.0
    tpose_max_dev_deg: float = 5.0
    flex_trim: tuple = DEFAULT_TRIM
    flex_targets: tuple = DEFAULT_TARGETS
    flex_full_scale_span: float = np.pi
    allow_imu_only: bool = False   # skip flex calibration; flex inputs zeroed


@dataclass
class PoseRecord:
    frame_id: int
    theta: np.ndarray       # (10, 3) axis-angle
    positions: np.ndarray   # (11, 3) FK endpoints, root dropped

    def to_line(self):
        vals = np.concatenate([self.theta.ravel(), self.positions.ravel()])
        return f"{self.frame_id} " + " ".join(f"{v:.9g}" for v in vals)

    @classmethod
    def from_line(cls, line):
        parts = line.split()
        vals = np.array([float(v) for v in parts[1:]])
        if vals.size != 63:
            raise ValueError(f"pose record needs 63 values, got {vals.size}")
        return cls(int(parts[0]), vals[:30].reshape(10, 3), vals[30:].reshape(11, 3))


def tpose_calibrate(orientations, max_dev_deg=5.0):
    """Per-IMU references from a T-pose window.

    orientations: (T, 4, 3, 3) measured rotations. The reference is the
    inverse of the time-averaged orientation; if any frame deviates from
    that average by more than max_dev_deg the pose was unstable.
    Returns (4, 3, 3) references.
    """
    orientations = np.asarray(orientations, dtype=np.float64)
    refs = np.empty((orientations.shape[1], 3, 3))
    for k in range(orientations.shape[1]):
        mean_q = mean_rotation(matrix_to_quat(orientations[:, k]))
        mean_m = quat_to_matrix(mean_q)
        dev = geodesic_angle_deg(orientations[:, k], mean_m[None]).max()
        if dev > max_dev_deg:
            raise UnstablePoseError(
                f"IMU {k} deviated {dev:.2f} deg from the mean during T-pose "
                f"(threshold {max_dev_deg})")
        refs[k] = mean_m.T
    return refs


class PoseSession:
    """Owns the calibration state and the predictor's recurrent state."""

    def __init__(self, model, skeleton, cfg: SessionConfig = None):
        self.model = model
        self.skeleton = skeleton
        self.cfg = cfg or SessionConfig()
        self.phase = Phase.IDLE
        self.references = None
        self.flex_ranges = None
        self.calibrated_at = None
        self._tpose_buf = []
        self._elbow_buf = []
        self._state = None
        self.last_frame_id = None
        self.skipped = 0

    # -- lifecycle ---------------------------------------------------------

    def begin_calibration(self):
        self.phase = Phase.TPOSE
        self._tpose_buf = []
        self._elbow_buf = []

    def _fail(self, exc):
        self.phase = Phase.IDLE
        logger.warning("calibration failed: %s", exc)
        raise exc

    def _enter_running(self):
        if self.references is None:
            self._fail(SessionError("cannot run without T-pose references"))
        if self.flex_ranges is None and not self.cfg.allow_imu_only:
            self._fail(SessionError(
                "flex calibration missing; set allow_imu_only to run without it"))
        self._state = self.model.init_state(1)
        self.phase = Phase.RUNNING
        self.calibrated_at = time.time()

    # -- frame handling ----------------------------------------------------

    def _ordered(self, frame: WireFrame):
        if self.last_frame_id is not None and frame.frame_id <= self.last_frame_id:
            self.skipped += 1
            logger.warning("skipping out-of-order frame %d (last %d)",
                           frame.frame_id, self.last_frame_id)
            return False
        self.last_frame_id = frame.frame_id
        return True

    def process_frame(self, frame: WireFrame):
        """Advance the state machine with one frame. Returns a PoseRecord in
        the Running phase, else None."""
        if not self._ordered(frame):
            return None
        if self.phase == Phase.IDLE:
            return None
        if self.phase == Phase.TPOSE:
            self._tpose_buf.append(np.asarray(frame.imu, dtype=np.float64))
            if len(self._tpose_buf) >= int(self.cfg.tpose_seconds * self.cfg.fps):
                imu = np.stack(self._tpose_buf).reshape(-1, 4, 9)
                try:
                    self.references = tpose_calibrate(
                        rot6d_to_matrix(imu[:, :, :6]), self.cfg.tpose_max_dev_deg)
                except UnstablePoseError as exc:
                    self._fail(exc)
                if self.cfg.allow_imu_only:
                    self._enter_running()
                else:
                    self.phase = Phase.ELBOW
            return None
        if self.phase == Phase.ELBOW:
            self._elbow_buf.append(np.asarray(frame.flex, dtype=np.float64))
            if len(self._elbow_buf) >= int(self.cfg.elbow_seconds * self.cfg.fps):
                window = np.stack(self._elbow_buf)
                try:
                    self.flex_ranges = tuple(
                        capture_range(window[:, side], self.cfg.flex_trim,
                                      self.cfg.flex_targets,
                                      self.cfg.flex_full_scale_span)
                        for side in (0, 1))
                except DegenerateRangeError as exc:
                    self._fail(exc)
                self._enter_running()
            return None
        return self._infer(frame)

    def _infer(self, frame: WireFrame):
        imu = np.asarray(frame.imu, dtype=np.float64).reshape(4, 9)
        rot = rot6d_to_matrix(imu[:, :6])
        normalized = imu.copy()
        normalized[:, :6] = matrix_to_rot6d(self.references @ rot)
        if self.flex_ranges is not None:
            from ..calibration import pic_apply
            flex_deg = np.array([pic_apply(float(frame.flex[s]), self.flex_ranges[s])
                                 for s in (0, 1)])
            flex_rad = np.radians(flex_deg)
        else:
            flex_rad = np.zeros(2)
        theta, _, self._state = self.model.step(
            normalized.reshape(1, 36), flex_rad.reshape(1, 2), self._state)
        theta = theta[0]
        positions, _ = fk(self.skeleton, theta)
        return PoseRecord(frame.frame_id, theta, positions[1:])

    # -- persistence -------------------------------------------------------

    def session_record(self):
        rec = {
            "calibrated_at": self.calibrated_at,
            "tpose_references_quat": matrix_to_quat(self.references).tolist()
            if self.references is not None else None,
            "flex_ranges": [r.as_dict() for r in self.flex_ranges]
            if self.flex_ranges is not None else None,
        }
        return rec

    def save_session(self, path):
        with open(path, "w") as f:
            json.dump(self.session_record(), f, indent=2)
            f.write("\n")

    def load_session(self, path):
        with open(path) as f:
            rec = json.load(f)
        if rec.get("tpose_references_quat") is not None:
            self.references = quat_to_matrix(np.array(rec["tpose_references_quat"]))
        if rec.get("flex_ranges") is not None:
            self.flex_ranges = tuple(CalibrationRange(**d) for d in rec["flex_ranges"])
        self.calibrated_at = rec.get("calibrated_at")
        self._enter_running()
