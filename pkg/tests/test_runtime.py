import socket
import threading

import numpy as np
import pytest

from flexpose.calibration import DegenerateRangeError
from flexpose.datasets import ideal_references, normalize_imu
from flexpose.fusion import FusionConfig, PoseFusionPredictor
from flexpose.kinematics import (axis_angle_to_matrix, geodesic_angle_deg,
                                 matrix_to_rot6d, rot6d_to_matrix, upper_body)
from flexpose.runtime import (
    FRAME_SIZE, Phase, PoseRecord, PoseSession, ProtocolError, SessionConfig,
    SessionError, UnstablePoseError, WireFrame, decode_frame, encode_frame,
    frames_from_arrays, read_replay, run_pipeline, run_replay, serve_once,
    tpose_calibrate, write_replay,
)
from flexpose.synth import (
    FlexSensorModel, default_mounting, elbow_bend_gesture, random_motion,
    synth_flex, synth_tight_imu, to_channels, tpose,
)

FPS = 60
DT = 1.0 / FPS


# -- wire format ---------------------------------------------------------------

def test_wire_round_trip_random(rng):
    for _ in range(20):
        frame = WireFrame(int(rng.integers(0, 2 ** 63)), int(rng.integers(0, 2 ** 63)),
                          rng.normal(size=36).astype(np.float32),
                          rng.normal(size=2).astype(np.float32))
        buf = encode_frame(frame)
        assert len(buf) == FRAME_SIZE == 172
        assert decode_frame(buf) == frame
        assert encode_frame(decode_frame(buf)) == buf


def test_wire_boundary_values():
    for fid, ts in [(0, 0), (2 ** 64 - 1, 2 ** 64 - 1)]:
        frame = WireFrame(fid, ts, np.zeros(36, np.float32), np.zeros(2, np.float32))
        assert decode_frame(encode_frame(frame)) == frame


def test_wire_zero_payload():
    frame = decode_frame(encode_frame(WireFrame(1, 2, np.zeros(36, np.float32),
                                                np.zeros(2, np.float32))))
    assert np.all(frame.imu == 0.0) and np.all(frame.flex == 0.0)


def test_wire_errors():
    good = encode_frame(WireFrame(1, 2, np.zeros(36, np.float32), np.zeros(2, np.float32)))
    with pytest.raises(ProtocolError):
        decode_frame(b"XXXX" + good[4:])
    with pytest.raises(ProtocolError):
        decode_frame(good[:-1])


def test_replay_file_round_trip(tmp_path, rng):
    frames = [WireFrame(i, i * 16667, rng.normal(size=36).astype(np.float32),
                        rng.normal(size=2).astype(np.float32)) for i in range(10)]
    path = tmp_path / "replay.bin"
    write_replay(path, frames)
    assert read_replay(path) == frames


def test_pose_record_line_round_trip(rng):
    rec = PoseRecord(17, rng.normal(size=(10, 3)), rng.normal(size=(11, 3)))
    back = PoseRecord.from_line(rec.to_line())
    assert back.frame_id == 17
    assert np.allclose(back.theta, rec.theta, atol=1e-8)
    assert np.allclose(back.positions, rec.positions, atol=1e-8)


# -- T-pose calibration ----------------------------------------------------------

def test_tpose_constant_rotation_reference():
    R = axis_angle_to_matrix(np.array([0.3, -0.2, 0.5]))
    seq = np.tile(R, (50, 4, 1, 1))
    refs = tpose_calibrate(seq)
    assert np.allclose(refs[0], R.T, atol=1e-12)
    normalized = refs[0] @ R
    assert geodesic_angle_deg(normalized, np.eye(3)) < 1e-9


def test_tpose_small_jitter_ok(rng):
    R = axis_angle_to_matrix(np.array([0.1, 0.0, 0.2]))
    noise = axis_angle_to_matrix(rng.normal(size=(80, 4, 3)) * 0.002)  # ~0.2 deg jitter
    seq = np.einsum("ij,tkjl->tkil", R, noise)
    refs = tpose_calibrate(seq, max_dev_deg=5.0)
    for k in range(4):
        post = refs[k] @ seq[:, k]
        assert geodesic_angle_deg(post, np.eye(3)[None]).max() < 1.0


def test_tpose_unstable_rejected(rng):
    R = np.eye(3)
    wobble = axis_angle_to_matrix(rng.normal(size=(80, 4, 3)) * 0.15)  # ~10+ deg swings
    seq = np.einsum("ij,tkjl->tkil", R, wobble)
    with pytest.raises(UnstablePoseError):
        tpose_calibrate(seq, max_dev_deg=5.0)


# -- session machine --------------------------------------------------------------

@pytest.fixture(scope="module")
def skel():
    return upper_body()


@pytest.fixture(scope="module")
def model():
    cfg = FusionConfig(hidden=16, layers=1)
    m = PoseFusionPredictor(cfg, np.random.default_rng(0))
    m.set_standardization(np.random.default_rng(1).normal(size=(100, 36)),
                          np.random.default_rng(2).uniform(0, 1.5, size=(100, 2)))
    return m


def make_calibration_frames(skel, motion_seconds=2.0, flex_gain=1.0, flex_offset=0.0,
                            start_id=0, motion_seed=5):
    """T-pose (5 s) + elbow bend (1 s) + motion frames, raw wire units."""
    mounting = default_mounting()
    sensor = FlexSensorModel(flex_gain, flex_offset)
    segs = [tpose(5.0, FPS), elbow_bend_gesture(1.0, FPS),
            random_motion(motion_seconds, FPS, seed=motion_seed)]
    poses = np.concatenate(segs, axis=0)
    imu = to_channels(synth_tight_imu(skel, poses, mounting, DT))
    flex = synth_flex(skel, poses, sensor)
    return frames_from_arrays(imu, flex, FPS, start_id=start_id), poses


def make_session(model, skel, **cfg_kw):
    session = PoseSession(model, skel, SessionConfig(**cfg_kw))
    session.begin_calibration()
    return session


def test_session_happy_path(skel, model):
    frames, poses = make_calibration_frames(skel)
    session = make_session(model, skel)
    records, stats = run_replay(session, frames)
    assert session.phase == Phase.RUNNING
    assert stats.records_out == len(frames) - 6 * FPS
    assert records[0].frame_id == 6 * FPS
    # flex ranges reflect the 0..90 degree gesture through the affine sensor
    for r in session.flex_ranges:
        assert r.raw_min == pytest.approx(0.0, abs=1e-6)
        assert r.raw_max == pytest.approx(np.pi / 2, abs=1e-6)


def test_session_counting_60s(skel, model):
    frames, _ = make_calibration_frames(skel, motion_seconds=60.0)
    session = make_session(model, skel)
    records, _ = run_replay(session, frames)
    assert len(records) == 3600  # 60 Hz for 60 s, no drops


def test_session_out_of_order_skipped(skel, model):
    frames, _ = make_calibration_frames(skel)
    # duplicate an old frame id in the running phase
    bad = WireFrame(10, 123, frames[400].imu, frames[400].flex)
    frames.insert(400, bad)
    session = make_session(model, skel)
    records, stats = run_replay(session, frames)
    assert stats.skipped == 1
    assert len(records) == len(frames) - 6 * FPS - 1


def test_session_unstable_tpose_rejected(skel, model, rng):
    frames, _ = make_calibration_frames(skel)
    # corrupt the tpose window with large orientation wobble
    for i in range(0, 300):
        imu = np.array(frames[i].imu, dtype=np.float64).reshape(4, 9)
        wob = axis_angle_to_matrix(rng.normal(size=3) * 0.2)
        imu[:, :6] = matrix_to_rot6d(wob @ rot6d_to_matrix(imu[:, :6]))
        frames[i] = WireFrame(frames[i].frame_id, frames[i].timestamp_us,
                              imu.reshape(36).astype(np.float32), frames[i].flex)
    session = make_session(model, skel)
    with pytest.raises(UnstablePoseError):
        run_replay(session, frames)
    assert session.phase == Phase.IDLE


def test_session_degenerate_flexion_rejected(skel, model):
    frames, _ = make_calibration_frames(skel)
    # user never bends: constant flex during the elbow window
    for i in range(300, 360):
        frames[i] = WireFrame(frames[i].frame_id, frames[i].timestamp_us,
                              frames[i].imu, np.zeros(2, np.float32))
    session = make_session(model, skel)
    with pytest.raises(DegenerateRangeError):
        run_replay(session, frames)
    assert session.phase == Phase.IDLE


def test_session_imu_only_override(skel, model):
    frames, _ = make_calibration_frames(skel)
    session = make_session(model, skel, allow_imu_only=True)
    records, _ = run_replay(session, frames)
    assert session.phase == Phase.RUNNING
    assert session.flex_ranges is None
    # elbow window frames are consumed by the running phase instead
    assert len(records) == len(frames) - 5 * FPS


def test_session_refuses_running_without_calibration(skel, model):
    session = PoseSession(model, skel, SessionConfig())
    with pytest.raises(SessionError):
        session._enter_running()


def test_session_record_save_load(tmp_path, skel, model):
    frames, _ = make_calibration_frames(skel)
    session = make_session(model, skel)
    records, _ = run_replay(session, frames)
    path = tmp_path / "session.json"
    session.save_session(path)
    text = path.read_text()
    assert "flex_ranges" in text and "tpose_references_quat" in text
    fresh = PoseSession(model, skel, SessionConfig())
    fresh.load_session(path)
    assert fresh.phase == Phase.RUNNING
    # same calibration state reproduces the same inference
    out = [fresh.process_frame(f) for f in frames[360:]]
    assert np.array_equal(np.stack([r.theta for r in out]),
                          np.stack([r.theta for r in records]))


def test_online_equals_offline(skel, model):
    frames, _ = make_calibration_frames(skel, motion_seconds=4.0)
    offline_session = make_session(model, skel)
    offline_records, _ = run_replay(offline_session, frames)

    online_session = make_session(model, skel)
    online_records = []
    stats = run_pipeline(online_session, iter(frames), online_records.append,
                         fps=FPS, lossless=True)
    assert stats.dropped == 0
    assert len(online_records) == len(offline_records)
    for a, b in zip(online_records, offline_records):
        assert a.frame_id == b.frame_id
        assert np.array_equal(a.theta, b.theta)
        assert np.array_equal(a.positions, b.positions)


def test_tcp_stream_round_trip(skel, model):
    frames, _ = make_calibration_frames(skel)
    session = make_session(model, skel)
    records = []

    class Ready(threading.Event):
        port = None
    ready = Ready()
    result = {}

    def server():
        result["stats"] = serve_once("127.0.0.1", 0, session, records.append,
                                     fps=FPS, ready_event=ready)

    th = threading.Thread(target=server)
    th.start()
    assert ready.wait(10)
    conn = socket.create_connection(("127.0.0.1", ready.port), timeout=10)
    import time
    for f in frames:   # pace at ~4x real time; inference keeps up easily
        conn.sendall(encode_frame(f))
        time.sleep(1.0 / (4 * FPS))
    conn.close()
    th.join(timeout=60)
    assert not th.is_alive()
    assert result["stats"].frames_in == len(frames)
    assert result["stats"].dropped == 0
    assert len(records) == len(frames) - 6 * FPS


def test_pose_stream_positions_match_fk(skel, model):
    # emitted positions are the FK of the emitted rotations
    from flexpose.pipeline import fk_positions
    frames, _ = make_calibration_frames(skel)
    session = make_session(model, skel)
    records, _ = run_replay(session, frames)
    rec = records[7]
    pos = fk_positions(skel, rec.theta[None])[0]
    assert np.allclose(rec.positions, pos[1:], atol=1e-12)
