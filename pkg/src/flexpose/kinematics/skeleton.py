"""Upper-body skeleton: node tree, rest offsets, and the rotation layout.

The default skeleton has 12 nodes; the three leaves (head_top and the two
wrists) do not move anything, and 10 nodes carry rotation slots. The
rotation attached at head_top orients the head end without displacing any
endpoint. Rest pose is a T-pose: +y up, left arm along +x, arms straight.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Skeleton:
    names: list
    parents: list          # parent index per node, -1 for the single root
    offsets: np.ndarray    # (n, 3) rest-pose bone offsets in meters
    rotating: list         # node index per rotation slot, in slot order
    rotation_names: list = field(default=None)

    def __post_init__(self):
        self.offsets = np.asarray(self.offsets, dtype=np.float64)
        if self.rotation_names is None:
            self.rotation_names = [self.names[i] for i in self.rotating]
        self.validate()

    def validate(self):
        n = len(self.names)
        if len(self.parents) != n or self.offsets.shape != (n, 3):
            raise ValueError("skeleton arrays inconsistent")
        roots = [i for i, p in enumerate(self.parents) if p < 0]
        if len(roots) != 1 or roots[0] != 0:
            raise ValueError("skeleton must have exactly one root at index 0")
        for i, p in enumerate(self.parents):
            if i > 0 and not (0 <= p < i):
                raise ValueError("nodes must be listed parents-first (tree, no cycles)")
        lengths = np.linalg.norm(self.offsets[1:], axis=1)
        if np.any(lengths <= 0):
            raise ValueError("non-root bone lengths must be positive")
        for r in self.rotating:
            if not (0 <= r < n):
                raise ValueError(f"rotation slot references unknown node {r}")

    @property
    def num_nodes(self):
        return len(self.names)

    @property
    def num_rotations(self):
        return len(self.rotating)

    def index(self, name):
        return self.names.index(name)

    def bone_lengths(self):
        return np.linalg.norm(self.offsets, axis=1)

    def save(self, path):
        with open(path, "w") as f:
            f.write("# flexpose skeleton: name parent offset_x offset_y offset_z rotation\n")
            rot_by_node = {node: self.rotation_names[slot] for slot, node in enumerate(self.rotating)}
            for i, name in enumerate(self.names):
                parent = "-" if self.parents[i] < 0 else self.names[self.parents[i]]
                ox, oy, oz = self.offsets[i]
                rot = rot_by_node.get(i, "-")
                f.write(f"{name} {parent} {ox:.9g} {oy:.9g} {oz:.9g} {rot}\n")

    @classmethod
    def load(cls, path):
        names, parents, offsets, rotating, rot_names = [], [], [], [], []
        with open(path) as f:
            for line in f:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split()
                if len(parts) != 6:
                    raise ValueError(f"bad skeleton line: {line!r}")
                name, parent, ox, oy, oz, rot = parts
                idx = len(names)
                names.append(name)
                parents.append(-1 if parent == "-" else names.index(parent))
                offsets.append([float(ox), float(oy), float(oz)])
                if rot != "-":
                    rotating.append(idx)
                    rot_names.append(rot)
        return cls(names, parents, np.array(offsets), rotating, rot_names)


# Node order of the default skeleton (parents-first).
NODE_NAMES = [
    "pelvis", "spine1", "spine2", "chest", "neck", "head_top",
    "l_shoulder", "l_elbow", "l_wrist",
    "r_shoulder", "r_elbow", "r_wrist",
]
NODE_PARENTS = [-1, 0, 1, 2, 3, 4, 3, 6, 7, 3, 9, 10]

# Rest offsets in meters, from published anthropometric means, scaled by a
# single stature factor. Left is +x, up is +y.
NODE_OFFSETS = np.array([
    [0.00, 0.00, 0.00],    # pelvis (root, pinned at origin)
    [0.00, 0.10, 0.00],    # spine1
    [0.00, 0.12, 0.00],    # spine2
    [0.00, 0.12, 0.00],    # chest
    [0.00, 0.22, 0.00],    # neck
    [0.00, 0.25, 0.00],    # head_top
    [0.18, 0.18, 0.00],    # l_shoulder (off the chest)
    [0.28, 0.00, 0.00],    # l_elbow (upper arm)
    [0.25, 0.00, 0.00],    # l_wrist (forearm)
    [-0.18, 0.18, 0.00],   # r_shoulder
    [-0.28, 0.00, 0.00],   # r_elbow
    [-0.25, 0.00, 0.00],   # r_wrist
])

# Rotation slots in node order; the slot at head_top is named "head".
ROTATING_NODES = [0, 1, 2, 3, 4, 5, 6, 7, 9, 10]
ROTATION_NAMES = ["pelvis", "spine1", "spine2", "chest", "neck", "head",
                  "l_shoulder", "l_elbow", "r_shoulder", "r_elbow"]

# Slot indices of the two elbows inside the 10-rotation layout.
ELBOW_SLOTS = (7, 9)
OTHER_SLOTS = tuple(i for i in range(10) if i not in ELBOW_SLOTS)


def upper_body(stature_scale=1.0):
    """The default 12-node / 10-rotation upper-body skeleton."""
    return Skeleton(list(NODE_NAMES), list(NODE_PARENTS),
                    NODE_OFFSETS * stature_scale, list(ROTATING_NODES),
                    list(ROTATION_NAMES))
