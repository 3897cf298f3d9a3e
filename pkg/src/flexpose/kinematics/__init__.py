from .rotations import (
    rotation_distance_rad,
    REPRESENTATIONS, convert, geodesic_angle_deg, mean_rotation,
    axis_angle_to_matrix, matrix_to_axis_angle,
    axis_angle_to_quat, quat_to_axis_angle,
    quat_to_matrix, matrix_to_quat, quat_mul, quat_conj,
    quat_normalize, quat_canonical,
    matrix_to_rot6d, rot6d_to_matrix,
)
from .skeleton import (
    Skeleton, upper_body, NODE_NAMES, ROTATION_NAMES,
    ROTATING_NODES, ELBOW_SLOTS, OTHER_SLOTS,
)
from .fk import fk, fk_sequence, elbow_flexion, elbow_flexion_sequence, GeometryError
