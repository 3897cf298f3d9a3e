"""Per-sequence and aggregate metric reports with text/CSV emitters."""

import csv
from dataclasses import dataclass

import numpy as np

from .pose import angular_error, elbow_angular_error, positional_error, jitter

COLUMNS = ["sequence", "angular_deg", "elbow_angular_deg", "positional_cm", "jitter_m_s3"]


@dataclass
class PoseMetricsReport:
    per_sequence: list          # rows of [name, angular, elbow, positional, jitter]

    def aggregate(self):
        """Mean and std across sequences (per-frame means within each)."""
        arr = np.array([row[1:] for row in self.per_sequence], dtype=np.float64)
        return {name: (float(m), float(s)) for name, m, s
                in zip(COLUMNS[1:], arr.mean(axis=0), arr.std(axis=0))}

    def to_text(self):
        agg = self.aggregate()
        lines = ["pose metrics (mean ± std across sequences):"]
        lines.append(f"  angular error:       {agg['angular_deg'][0]:7.3f} ± {agg['angular_deg'][1]:.3f} deg")
        lines.append(f"  elbow angular error: {agg['elbow_angular_deg'][0]:7.3f} ± {agg['elbow_angular_deg'][1]:.3f} deg")
        lines.append(f"  positional error:    {agg['positional_cm'][0]:7.3f} ± {agg['positional_cm'][1]:.3f} cm")
        lines.append(f"  jitter:              {agg['jitter_m_s3'][0]:7.3f} ± {agg['jitter_m_s3'][1]:.3f} m/s^3")
        return "\n".join(lines)

    def to_csv(self, path):
        agg = self.aggregate()
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(COLUMNS)
            w.writerows(self.per_sequence)
            w.writerow(["mean"] + [agg[c][0] for c in COLUMNS[1:]])
            w.writerow(["std"] + [agg[c][1] for c in COLUMNS[1:]])


def evaluate_pose_sequences(pred_thetas, gt_thetas, pred_positions, gt_positions, fps,
                            names=None):
    """Build a report from per-sequence predictions.

    thetas: lists of (T, 10, 3); positions: lists of (T, n, 3) endpoint sets
    used for the positional and jitter metrics.
    """
    rows = []
    for i in range(len(pred_thetas)):
        name = names[i] if names else f"seq{i}"
        rows.append([
            name,
            angular_error(pred_thetas[i], gt_thetas[i]),
            elbow_angular_error(pred_thetas[i], gt_thetas[i]),
            positional_error(pred_positions[i], gt_positions[i]),
            jitter(pred_positions[i], fps),
        ])
    return PoseMetricsReport(rows)
