"""Checkpoint files: a human-readable header followed by raw float64 data.

Layout:
    line 1:  FLEXPOSE-CKPT 1
    line 2:  one JSON object: kind, seed, step, params=[[name, shape], ...],
             plus optional extra metadata
    rest:    the parameter arrays, flattened little-endian float64, in the
             order listed in the header
"""

import json

import numpy as np

MAGIC = b"FLEXPOSE-CKPT 1"


def save_checkpoint(path, kind, params, seed=None, step=0, extra=None):
    """params: dict preserving declaration order; values Tensor or ndarray."""
    names = list(params.keys())
    arrays = [np.asarray(getattr(p, "data", p), dtype=np.float64) for p in params.values()]
    meta = {
        "kind": kind,
        "seed": seed,
        "step": int(step),
        "params": [[n, list(a.shape)] for n, a in zip(names, arrays)],
    }
    if extra:
        meta["extra"] = extra
    with open(path, "wb") as f:
        f.write(MAGIC + b"\n")
        f.write(json.dumps(meta).encode("utf-8") + b"\n")
        for a in arrays:
            f.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def load_checkpoint(path):
    """Returns (meta dict, dict name -> float64 ndarray)."""
    with open(path, "rb") as f:
        magic = f.readline().rstrip(b"\n")
        if magic != MAGIC:
            raise ValueError(f"not a checkpoint file: bad magic {magic!r}")
        meta = json.loads(f.readline().decode("utf-8"))
        blob = f.read()
    arrays = {}
    offset = 0
    for name, shape in meta["params"]:
        n = int(np.prod(shape)) if shape else 1
        chunk = np.frombuffer(blob, dtype="<f8", count=n, offset=offset)
        arrays[name] = chunk.reshape(shape).astype(np.float64)
        offset += n * 8
    if offset != len(blob):
        raise ValueError(f"checkpoint payload size mismatch: {len(blob)} bytes, expected {offset}")
    return meta, arrays


def restore_params(params, arrays):
    """Copy loaded arrays into live parameter tensors (shapes must match)."""
    for name, p in params.items():
        if name not in arrays:
            raise KeyError(f"checkpoint missing parameter {name!r}")
        if tuple(p.data.shape) != tuple(arrays[name].shape):
            raise ValueError(f"shape mismatch for {name!r}: "
                             f"{p.data.shape} vs {arrays[name].shape}")
        p.data[...] = arrays[name]
