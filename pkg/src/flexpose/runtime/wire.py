"""Fixed-length binary sensor frames.

Layout (172 bytes, little-endian): 4-byte magic, u64 frame id, u64
timestamp in microseconds, 36 IMU float32 channels (4 IMUs x [rot6d,
acc]), 2 flex float32 channels.
"""

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"FPW1"
_STRUCT = struct.Struct("<4sQQ36f2f")
FRAME_SIZE = _STRUCT.size
assert FRAME_SIZE == 172


class ProtocolError(ValueError):
    pass


@dataclass
class WireFrame:
    frame_id: int
    timestamp_us: int
    imu: np.ndarray      # (36,) float32 values
    flex: np.ndarray     # (2,) float32 values

    def __eq__(self, other):
        return (self.frame_id == other.frame_id
                and self.timestamp_us == other.timestamp_us
                and np.array_equal(self.imu, other.imu)
                and np.array_equal(self.flex, other.flex))


def encode_frame(frame: WireFrame) -> bytes:
    imu = np.asarray(frame.imu, dtype=np.float32)
    flex = np.asarray(frame.flex, dtype=np.float32)
    if imu.shape != (36,) or flex.shape != (2,):
        raise ProtocolError(f"bad payload shapes {imu.shape}, {flex.shape}")
    return _STRUCT.pack(MAGIC, frame.frame_id, frame.timestamp_us,
                        *imu.tolist(), *flex.tolist())


def decode_frame(buf: bytes) -> WireFrame:
    if len(buf) != FRAME_SIZE:
        raise ProtocolError(f"short frame: {len(buf)} bytes, expected {FRAME_SIZE}")
    fields = _STRUCT.unpack(buf)
    if fields[0] != MAGIC:
        raise ProtocolError(f"bad magic {fields[0]!r}")
    return WireFrame(fields[1], fields[2],
                     np.array(fields[3:39], dtype=np.float32),
                     np.array(fields[39:41], dtype=np.float32))


def read_frames(stream):
    """Yield frames from a binary stream until EOF; a trailing partial
    frame raises ProtocolError."""
    while True:
        buf = stream.read(FRAME_SIZE)
        if not buf:
            return
        if len(buf) < FRAME_SIZE:
            raise ProtocolError(f"truncated frame of {len(buf)} bytes at end of stream")
        yield decode_frame(buf)


def write_replay(path, frames):
    with open(path, "wb") as f:
        for frame in frames:
            f.write(encode_frame(frame))


def read_replay(path):
    with open(path, "rb") as f:
        return list(read_frames(f))


def frames_from_arrays(imu_channels, flex, fps, start_id=0):
    """Package (T, 36) IMU + (T, 2) flex arrays as wire frames."""
    out = []
    for t in range(len(imu_channels)):
        out.append(WireFrame(start_id + t, int(t * 1e6 / fps),
                             np.asarray(imu_channels[t], dtype=np.float32),
                             np.asarray(flex[t], dtype=np.float32)))
    return out
