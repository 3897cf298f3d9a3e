"""Streaming drivers: synchronous replay (the offline/batch path) and a
threaded reader -> inference -> writer pipeline with bounded queues, plus a
single-client TCP source speaking the wire format."""

import collections
import logging
import socket
import threading
import time
from dataclasses import dataclass, field

import numpy as np

from .wire import FRAME_SIZE, ProtocolError, decode_frame, read_frames

logger = logging.getLogger(__name__)

QUEUE_SECONDS = 0.5   # backpressure buffer; beyond this the oldest frames drop


@dataclass
class StreamStats:
    frames_in: int = 0
    records_out: int = 0
    dropped: int = 0
    skipped: int = 0
    latencies_ms: list = field(default_factory=list)

    def summary(self, wall_seconds=None):
        lat = np.array(self.latencies_ms) if self.latencies_ms else np.zeros(1)
        out = {
            "frames_in": self.frames_in,
            "records_out": self.records_out,
            "dropped": self.dropped,
            "skipped": self.skipped,
            "latency_p50_ms": float(np.percentile(lat, 50)),
            "latency_p99_ms": float(np.percentile(lat, 99)),
            "latency_max_ms": float(lat.max()),
        }
        if wall_seconds:
            out["fps"] = self.frames_in / wall_seconds
        return out


def run_replay(session, frames, sink=None):
    """Synchronous frame loop: the reference (offline) execution path.

    Returns (records, stats). sink, if given, is called with each record.
    """
    stats = StreamStats()
    records = []
    t_start = time.perf_counter()
    for frame in frames:
        stats.frames_in += 1
        t0 = time.perf_counter()
        record = session.process_frame(frame)
        stats.latencies_ms.append((time.perf_counter() - t0) * 1e3)
        if record is not None:
            records.append(record)
            stats.records_out += 1
            if sink is not None:
                sink(record)
    stats.skipped = session.skipped
    stats.wall_seconds = time.perf_counter() - t_start
    return records, stats


class _BoundedQueue:
    """Bounded FIFO. Live mode drops the oldest element instead of
    blocking (real-time backpressure); lossless mode blocks the producer
    (file replay must not lose frames)."""

    def __init__(self, maxlen, lossless=False):
        self.buf = collections.deque()
        self.maxlen = maxlen
        self.lossless = lossless
        self.lock = threading.Lock()
        self.not_empty = threading.Condition(self.lock)
        self.not_full = threading.Condition(self.lock)
        self.dropped = 0
        self.closed = False

    def put(self, item):
        with self.lock:
            if self.lossless:
                while len(self.buf) >= self.maxlen:
                    self.not_full.wait()
            elif len(self.buf) >= self.maxlen:
                self.buf.popleft()
                self.dropped += 1
            self.buf.append(item)
            self.not_empty.notify()

    def close(self):
        with self.lock:
            self.closed = True
            self.not_empty.notify_all()

    def get(self):
        with self.lock:
            while not self.buf and not self.closed:
                self.not_empty.wait()
            if self.buf:
                item = self.buf.popleft()
                self.not_full.notify()
                return item
            return None


def run_pipeline(session, source, sink, fps=60, lossless=False):
    """Reader -> worker -> writer threads over bounded queues.

    source: iterable of WireFrames (file replay or socket reader); sink is
    called with each PoseRecord from the writer thread. Inference state is
    owned exclusively by the worker. Live sources drop the oldest frames
    beyond the buffer under backpressure; a lossless source (file replay)
    blocks instead. Returns StreamStats.
    """
    in_q = _BoundedQueue(max(1, int(QUEUE_SECONDS * fps)), lossless=lossless)
    out_q = _BoundedQueue(max(1, int(QUEUE_SECONDS * fps)) * 4, lossless=lossless)
    stats = StreamStats()

    def reader():
        for frame in source:
            stats.frames_in += 1
            in_q.put(frame)
        in_q.close()

    def worker():
        while True:
            frame = in_q.get()
            if frame is None:
                break
            t0 = time.perf_counter()
            record = session.process_frame(frame)
            stats.latencies_ms.append((time.perf_counter() - t0) * 1e3)
            if record is not None:
                out_q.put(record)
        out_q.close()

    def writer():
        while True:
            record = out_q.get()
            if record is None:
                break
            stats.records_out += 1
            sink(record)

    threads = [threading.Thread(target=fn, name=fn.__name__) for fn in (reader, worker, writer)]
    t_start = time.perf_counter()
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    stats.wall_seconds = time.perf_counter() - t_start
    stats.dropped = in_q.dropped
    stats.skipped = session.skipped
    if in_q.dropped:
        logger.warning("dropped %d frames under backpressure", in_q.dropped)
    return stats


def socket_frames(conn):
    """Yield frames from a connected socket until it closes."""
    buf = b""
    while True:
        chunk = conn.recv(65536)
        if not chunk:
            if buf:
                raise ProtocolError(f"connection closed mid-frame ({len(buf)} bytes)")
            return
        buf += chunk
        while len(buf) >= FRAME_SIZE:
            yield decode_frame(buf[:FRAME_SIZE])
            buf = buf[FRAME_SIZE:]


def serve_once(host, port, session, sink, fps=60, ready_event=None):
    """Accept a single wire-format connection and run the pipeline on it."""
    srv = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    srv.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    srv.bind((host, port))
    srv.listen(1)
    bound_port = srv.getsockname()[1]
    logger.info("listening on %s:%d", host, bound_port)
    if ready_event is not None:
        ready_event.port = bound_port
        ready_event.set()
    conn, addr = srv.accept()
    logger.info("connection from %s", addr)
    try:
        return run_pipeline(session, socket_frames(conn), sink, fps=fps)
    finally:
        conn.close()
        srv.close()


def replay_frames_from_file(path):
    with open(path, "rb") as f:
        yield from read_frames(f)
