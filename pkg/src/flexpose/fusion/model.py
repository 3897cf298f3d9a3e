"""Three-network fusion predictor.

A position network maps the 36 IMU channels to 11 joint positions; an
elbow network maps (flex, IMU, predicted positions) to the two elbow
rotations; a third network maps (predicted positions, IMU) to the other
eight rotations. Outputs are concatenated into the fixed 10-slot rotation
layout with the elbows at slots 7 and 9.
"""

from dataclasses import dataclass, field

import numpy as np

from ..kinematics import ELBOW_SLOTS
from ..nn import RecurrentRegressor, concat, tensor
from ..nn.tensor import Tensor

IMU_DIM = 36
FLEX_DIM = 2
POS_DIM = 33      # 11 non-root endpoints x 3
ELBOW_OUT = 6     # 2 x 3 axis-angle
OTHER_OUT = 24    # 8 x 3 axis-angle


@dataclass
class FusionConfig:
    hidden: int = 256
    layers: int = 2            # stacked LSTM layers per network
    tbptt: int = 120           # training segment length (frames)
    batch_size: int = 512
    lr: float = 5e-4
    weight_decay: float = 1e-5
    grad_clip: float = 1.0
    steps: int = 400
    loss_weights: tuple = (4.0, 1.0, 0.1)   # positions, rotations, elbow focus
    flex_noise: float = 0.02   # train-time noise on flex inputs (radians)
    zero_flex: bool = False    # ablation: feed zeros instead of flex


def _scatter_rotations(elbow, other, cat):
    """Interleave elbow (.., 6) and other (.., 24) into the 30-dim layout."""

    def other_block(i):
        return other[..., 3 * i:3 * i + 3]

    pieces, oi = [], 0
    for slot in range(10):
        if slot == ELBOW_SLOTS[0]:
            pieces.append(elbow[..., 0:3])
        elif slot == ELBOW_SLOTS[1]:
            pieces.append(elbow[..., 3:6])
        else:
            pieces.append(other_block(oi))
            oi += 1
    return cat(pieces)


class PoseFusionPredictor:

    def __init__(self, cfg: FusionConfig, rng):
        self.cfg = cfg
        self.position = RecurrentRegressor(IMU_DIM, cfg.hidden, cfg.layers, POS_DIM, rng)
        self.elbow = RecurrentRegressor(FLEX_DIM + IMU_DIM + POS_DIM,
                                        cfg.hidden, cfg.layers, ELBOW_OUT, rng)
        self.other = RecurrentRegressor(POS_DIM + IMU_DIM,
                                        cfg.hidden, cfg.layers, OTHER_OUT, rng)
        self.imu_mean = np.zeros(IMU_DIM)
        self.imu_std = np.ones(IMU_DIM)
        self.flex_mean = np.zeros(FLEX_DIM)
        self.flex_std = np.ones(FLEX_DIM)

    def params(self):
        out = {}
        for name, p in (self.position.params("position") + self.elbow.params("elbow")
                        + self.other.params("other")):
            out[name] = p
        return out

    def standardization_state(self):
        return {"stats.imu_mean": self.imu_mean, "stats.imu_std": self.imu_std,
                "stats.flex_mean": self.flex_mean, "stats.flex_std": self.flex_std}

    def set_standardization(self, imu_pool, flex_pool):
        """Fit input statistics on (n, 36) and (n, 2) training pools."""
        self.imu_mean = imu_pool.mean(axis=0)
        self.imu_std = np.maximum(imu_pool.std(axis=0), 1e-8)
        self.flex_mean = flex_pool.mean(axis=0)
        self.flex_std = np.maximum(flex_pool.std(axis=0), 1e-8)

    def load_standardization(self, arrays):
        self.imu_mean = arrays["stats.imu_mean"]
        self.imu_std = arrays["stats.imu_std"]
        self.flex_mean = arrays["stats.flex_mean"]
        self.flex_std = arrays["stats.flex_std"]

    def _standardize(self, imu, flex):
        if not (np.all(np.isfinite(imu)) and np.all(np.isfinite(flex))):
            raise ValueError("non-finite sensor input")
        if self.cfg.zero_flex:
            flex = np.zeros_like(flex)
        imu_s = (imu - self.imu_mean) / self.imu_std
        flex_s = (flex - self.flex_mean) / self.flex_std
        return imu_s, flex_s

    def forward_train(self, imu, flex):
        """Graph-building sequence forward.

        imu: (T, N, 36), flex: (T, N, 2) radians. Returns (theta, p)
        Tensors of shape (T, N, 30) and (T, N, 33).
        """
        imu_s, flex_s = self._standardize(imu, flex)
        imu_t, flex_t = tensor(imu_s), tensor(flex_s)
        p = self.position.forward_sequence(imu_t)
        elbow_in = concat([flex_t, imu_t, p], axis=2)
        theta_e = self.elbow.forward_sequence(elbow_in)
        other_in = concat([p, imu_t], axis=2)
        theta_o = self.other.forward_sequence(other_in)
        theta = _scatter_rotations(theta_e, theta_o, lambda ps: concat(ps, axis=2))
        return theta, p

    def init_state(self, n=1):
        return {"position": self.position.init_state(n),
                "elbow": self.elbow.init_state(n),
                "other": self.other.init_state(n)}

    def step(self, imu, flex, state):
        """Streaming forward for one frame (numpy only).

        imu: (n, 36), flex: (n, 2) radians. Returns (theta (n, 10, 3),
        p (n, 11, 3), new state).
        """
        imu_s, flex_s = self._standardize(imu, flex)
        p, st_p = self.position.step(imu_s, state["position"])
        elbow_in = np.concatenate([flex_s, imu_s, p], axis=1)
        theta_e, st_e = self.elbow.step(elbow_in, state["elbow"])
        other_in = np.concatenate([p, imu_s], axis=1)
        theta_o, st_o = self.other.step(other_in, state["other"])
        theta = _scatter_rotations(theta_e, theta_o,
                                   lambda ps: np.concatenate(ps, axis=-1))
        n = imu.shape[0]
        return (theta.reshape(n, 10, 3), p.reshape(n, 11, 3),
                {"position": st_p, "elbow": st_e, "other": st_o})

    def forward_sequence(self, imu, flex):
        """Whole-sequence evaluation through the same per-frame path the
        streaming runtime uses (so outputs match frame-exactly).

        imu: (T, n, 36), flex: (T, n, 2). Returns (theta (T, n, 10, 3),
        p (T, n, 11, 3)).
        """
        T, n = imu.shape[0], imu.shape[1]
        state = self.init_state(n)
        thetas = np.empty((T, n, 10, 3))
        ps = np.empty((T, n, 11, 3))
        for t in range(T):
            thetas[t], ps[t], state = self.step(imu[t], flex[t], state)
        return thetas, ps
