"""Flex-sensor range calibration: capture (min, max) raw readings during a
single full elbow bend and rescale raw data onto a physical angle range.

The map is exactly affine and extrapolates linearly outside the captured
range (no clamping), so any affine distortion of the raw units — the kind
a garment-donning shift produces — is undone identically by recalibrating.
"""

from dataclasses import dataclass

import numpy as np

DEFAULT_TARGETS = (0.0, 90.0)     # degrees for a full vertical elbow bend
DEFAULT_TRIM = (5.0, 95.0)        # percentile trim against spikes
DEFAULT_SPAN_FRACTION = 0.05      # minimum captured span, as a fraction of full scale


class DegenerateRangeError(ValueError):
    """The calibration gesture produced no usable reading span."""


@dataclass(frozen=True)
class CalibrationRange:
    raw_min: float
    raw_max: float
    target_min: float = DEFAULT_TARGETS[0]
    target_max: float = DEFAULT_TARGETS[1]

    def __post_init__(self):
        if not self.raw_max > self.raw_min:
            raise DegenerateRangeError(
                f"raw range degenerate: [{self.raw_min}, {self.raw_max}]")
        if not self.target_max > self.target_min:
            raise ValueError("target_max must exceed target_min")

    def as_dict(self):
        return {"raw_min": self.raw_min, "raw_max": self.raw_max,
                "target_min": self.target_min, "target_max": self.target_max}


def capture_range(window, trim=DEFAULT_TRIM, targets=DEFAULT_TARGETS,
                  full_scale_span=np.pi, min_span_fraction=DEFAULT_SPAN_FRACTION):
    """Trimmed-percentile range of one sensor's calibration window.

    window: raw readings covering one full bend (>= 1 s at stream rate).
    Raises DegenerateRangeError if the trimmed span is below
    min_span_fraction * full_scale_span (the wearer did not bend).
    """
    window = np.asarray(window, dtype=np.float64).ravel()
    if window.size < 2:
        raise DegenerateRangeError("calibration window too short")
    lo, hi = np.percentile(window, trim)
    if hi - lo < min_span_fraction * full_scale_span:
        raise DegenerateRangeError(
            f"captured span {hi - lo:.4g} below threshold "
            f"{min_span_fraction * full_scale_span:.4g}")
    return CalibrationRange(float(lo), float(hi), targets[0], targets[1])


def pic_apply(raw, crange: CalibrationRange):
    """Affine rescale of raw readings onto the target angle range; values
    outside the captured range extrapolate linearly."""
    raw = np.asarray(raw, dtype=np.float64)
    scale = (crange.target_max - crange.target_min) / (crange.raw_max - crange.raw_min)
    return (raw - crange.raw_min) * scale + crange.target_min
