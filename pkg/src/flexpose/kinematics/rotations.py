"""Rotation representations and conversions.

Four parameterizations are supported: axis-angle (3,), unit quaternion
(w, x, y, z), 3x3 matrix, and the 6-value form made of the first two
matrix columns. All converters are vectorized over leading axes and go
through the matrix form as the hub. Quaternions are kept on the w >= 0
hemisphere; axis-angle magnitudes are canonicalized to [0, pi].
"""

import numpy as np

REPRESENTATIONS = ("axis_angle", "quat", "matrix", "rot6d")


def axis_angle_to_matrix(aa):
    """Rodrigues formula, series-stabilized near zero angle. (..., 3) -> (..., 3, 3)."""
    aa = np.asarray(aa, dtype=np.float64)
    theta2 = (aa ** 2).sum(axis=-1)
    theta = np.sqrt(theta2)
    small = theta < 1e-8
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(small, 1.0 - theta2 / 6.0, np.sin(theta) / np.where(small, 1.0, theta))
        c = np.where(small, 0.5 - theta2 / 24.0, (1.0 - np.cos(theta)) / np.where(small, 1.0, theta2))
    x, y, z = aa[..., 0], aa[..., 1], aa[..., 2]
    K = np.zeros(aa.shape[:-1] + (3, 3))
    K[..., 0, 1], K[..., 0, 2] = -z, y
    K[..., 1, 0], K[..., 1, 2] = z, -x
    K[..., 2, 0], K[..., 2, 1] = -y, x
    eye = np.broadcast_to(np.eye(3), K.shape)
    return eye + s[..., None, None] * K + c[..., None, None] * (K @ K)


def quat_to_matrix(q):
    q = quat_normalize(q)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    m = np.empty(q.shape[:-1] + (3, 3))
    m[..., 0, 0] = 1 - 2 * (y * y + z * z)
    m[..., 0, 1] = 2 * (x * y - w * z)
    m[..., 0, 2] = 2 * (x * z + w * y)
    m[..., 1, 0] = 2 * (x * y + w * z)
    m[..., 1, 1] = 1 - 2 * (x * x + z * z)
    m[..., 1, 2] = 2 * (y * z - w * x)
    m[..., 2, 0] = 2 * (x * z - w * y)
    m[..., 2, 1] = 2 * (y * z + w * x)
    m[..., 2, 2] = 1 - 2 * (x * x + y * y)
    return m


def matrix_to_quat(m):
    """Shepperd's method, vectorized; returns w >= 0 quaternions."""
    m = np.asarray(m, dtype=np.float64)
    t = np.empty(m.shape[:-2] + (4,))
    tr = m[..., 0, 0] + m[..., 1, 1] + m[..., 2, 2]
    # branch on the largest of (trace, m00, m11, m22) for numerical safety
    choice = np.argmax(np.stack([tr, m[..., 0, 0], m[..., 1, 1], m[..., 2, 2]], axis=-1), axis=-1)
    w = np.sqrt(np.maximum(0.0, 1.0 + tr)) / 2.0
    cands = np.empty(m.shape[:-2] + (4, 4))
    s0 = 2.0 * np.sqrt(np.maximum(1e-12, 1.0 + tr))
    cands[..., 0, 0] = s0 / 4.0
    cands[..., 0, 1] = (m[..., 2, 1] - m[..., 1, 2]) / s0
    cands[..., 0, 2] = (m[..., 0, 2] - m[..., 2, 0]) / s0
    cands[..., 0, 3] = (m[..., 1, 0] - m[..., 0, 1]) / s0
    s1 = 2.0 * np.sqrt(np.maximum(1e-12, 1.0 + m[..., 0, 0] - m[..., 1, 1] - m[..., 2, 2]))
    cands[..., 1, 0] = (m[..., 2, 1] - m[..., 1, 2]) / s1
    cands[..., 1, 1] = s1 / 4.0
    cands[..., 1, 2] = (m[..., 0, 1] + m[..., 1, 0]) / s1
    cands[..., 1, 3] = (m[..., 0, 2] + m[..., 2, 0]) / s1
    s2 = 2.0 * np.sqrt(np.maximum(1e-12, 1.0 - m[..., 0, 0] + m[..., 1, 1] - m[..., 2, 2]))
    cands[..., 2, 0] = (m[..., 0, 2] - m[..., 2, 0]) / s2
    cands[..., 2, 1] = (m[..., 0, 1] + m[..., 1, 0]) / s2
    cands[..., 2, 2] = s2 / 4.0
    cands[..., 2, 3] = (m[..., 1, 2] + m[..., 2, 1]) / s2
    s3 = 2.0 * np.sqrt(np.maximum(1e-12, 1.0 - m[..., 0, 0] - m[..., 1, 1] + m[..., 2, 2]))
    cands[..., 3, 0] = (m[..., 1, 0] - m[..., 0, 1]) / s3
    cands[..., 3, 1] = (m[..., 0, 2] + m[..., 2, 0]) / s3
    cands[..., 3, 2] = (m[..., 1, 2] + m[..., 2, 1]) / s3
    cands[..., 3, 3] = s3 / 4.0
    t = np.take_along_axis(cands, choice[..., None, None].repeat(4, axis=-1), axis=-2)[..., 0, :]
    del w
    return quat_canonical(quat_normalize(t))


def quat_normalize(q):
    q = np.asarray(q, dtype=np.float64)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def quat_canonical(q):
    """Flip sign so w >= 0 (double cover convention)."""
    return np.where(q[..., :1] < 0, -q, q)


def quat_mul(a, b):
    # terms grouped so that conj(q) * q cancels to an exact zero vector
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack([
        aw * bw - (ax * bx + ay * by + az * bz),
        (aw * bx + ax * bw) + (ay * bz - az * by),
        (aw * by + ay * bw) + (az * bx - ax * bz),
        (aw * bz + az * bw) + (ax * by - ay * bx),
    ], axis=-1)


def quat_conj(q):
    out = np.array(q, dtype=np.float64, copy=True)
    out[..., 1:] = -out[..., 1:]
    return out


def axis_angle_to_quat(aa):
    aa = np.asarray(aa, dtype=np.float64)
    theta = np.linalg.norm(aa, axis=-1, keepdims=True)
    half = 0.5 * theta
    small = theta < 1e-8
    k = np.where(small, 0.5 - theta ** 2 / 48.0, np.sin(half) / np.where(small, 1.0, theta))
    return quat_canonical(np.concatenate([np.cos(half), aa * k], axis=-1))


def quat_to_axis_angle(q):
    q = quat_canonical(quat_normalize(q))
    vn = np.linalg.norm(q[..., 1:], axis=-1, keepdims=True)
    angle = 2.0 * np.arctan2(vn, q[..., :1])
    small = vn < 1e-12
    axis = np.where(small, 0.0, q[..., 1:] / np.where(small, 1.0, vn))
    return axis * angle


def matrix_to_axis_angle(m):
    return quat_to_axis_angle(matrix_to_quat(m))


def matrix_to_rot6d(m):
    """First two columns, flattened (r00 r10 r20 r01 r11 r21)."""
    m = np.asarray(m, dtype=np.float64)
    return np.concatenate([m[..., :, 0], m[..., :, 1]], axis=-1)


def rot6d_to_matrix(r6, tol=None):
    """Gram-Schmidt reconstruction. If tol is given, reject inputs whose
    raw columns deviate from orthonormal by more than tol."""
    r6 = np.asarray(r6, dtype=np.float64)
    a1, a2 = r6[..., :3], r6[..., 3:]
    if tol is not None:
        err = np.abs(np.linalg.norm(a1, axis=-1) - 1.0)
        err = np.maximum(err, np.abs(np.linalg.norm(a2, axis=-1) - 1.0))
        err = np.maximum(err, np.abs((a1 * a2).sum(axis=-1)))
        if np.any(err > tol):
            raise ValueError(f"rot6d columns not orthonormal within {tol}")
    b1 = a1 / np.linalg.norm(a1, axis=-1, keepdims=True)
    a2p = a2 - (b1 * a2).sum(axis=-1, keepdims=True) * b1
    b2 = a2p / np.linalg.norm(a2p, axis=-1, keepdims=True)
    b3 = np.cross(b1, b2)
    return np.stack([b1, b2, b3], axis=-1)


_TO_MATRIX = {
    "axis_angle": axis_angle_to_matrix,
    "quat": quat_to_matrix,
    "matrix": lambda m: np.asarray(m, dtype=np.float64),
    "rot6d": rot6d_to_matrix,
}
_FROM_MATRIX = {
    "axis_angle": matrix_to_axis_angle,
    "quat": matrix_to_quat,
    "matrix": lambda m: m,
    "rot6d": matrix_to_rot6d,
}


def convert(rot, frm, to, validate_tol=None):
    """Convert between any two of REPRESENTATIONS (via the matrix hub)."""
    if frm not in _TO_MATRIX or to not in _FROM_MATRIX:
        raise ValueError(f"unknown representation: {frm!r} -> {to!r}")
    m = _TO_MATRIX[frm](rot)
    if validate_tol is not None and frm == "matrix":
        err = np.abs(m @ np.swapaxes(m, -1, -2) - np.eye(3)).max()
        if err > validate_tol:
            raise ValueError(f"matrix not orthonormal within {validate_tol} (err {err:.3e})")
    return _FROM_MATRIX[to](m)


def geodesic_angle_deg(r1, r2):
    """Angle of the relative rotation r1^-1 r2, in degrees, in [0, 180].
    Inputs are rotation matrices (vectorized over leading axes). Computed
    through the quaternion atan2 form: the trace-arccos formula bottoms
    out around 1e-8 rad and cannot report exact zeros for equal inputs."""
    return np.degrees(rotation_distance_rad(r1, r2))


def rotation_distance_rad(r1, r2):
    """Geodesic distance in radians via the quaternion atan2 form, which
    stays accurate near zero where trace-arccos bottoms out around 1e-8.
    Inputs are rotation matrices."""
    q1 = matrix_to_quat(r1)
    q2 = matrix_to_quat(r2)
    rel = quat_mul(quat_conj(q1), q2)
    vn = np.linalg.norm(rel[..., 1:], axis=-1)
    return 2.0 * np.arctan2(vn, np.abs(rel[..., 0]))


def mean_rotation(quats):
    """Average of nearby orientations: sign-align quaternions to the first,
    take the normalized mean. Adequate for small dispersion (calibration)."""
    q = np.asarray(quats, dtype=np.float64)
    ref = q[0]
    aligned = np.where((q * ref).sum(axis=-1, keepdims=True) < 0, -q, q)
    return quat_canonical(quat_normalize(aligned.mean(axis=0)))
