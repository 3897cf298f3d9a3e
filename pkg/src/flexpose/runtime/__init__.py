from .wire import (
    MAGIC, FRAME_SIZE, ProtocolError, WireFrame,
    encode_frame, decode_frame, read_frames, write_replay, read_replay,
    frames_from_arrays,
)
from .session import (
    Phase, PoseSession, PoseRecord, SessionConfig,
    UnstablePoseError, SessionError, tpose_calibrate,
)
from .stream import (
    StreamStats, run_replay, run_pipeline, serve_once,
    socket_frames, replay_frames_from_file, QUEUE_SECONDS,
)
