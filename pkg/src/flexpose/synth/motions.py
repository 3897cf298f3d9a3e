"""Procedural pose-sequence generator.

Each rotation slot gets a small bank of sinusoids with per-joint amplitude
and frequency envelopes; elbows are flexion-dominant with a slowly varying
positive envelope so sequences cover the full bend range. Styles shift the
envelopes toward walking-like arm swings or boxing-like fast elbow work.
"""

import numpy as np

from ..kinematics import ELBOW_SLOTS

# per-slot (max amplitude rad, max frequency Hz) for the non-elbow joints,
# in rotation-slot order: pelvis, spine1, spine2, chest, neck, head,
# l_shoulder, l_elbow, r_shoulder, r_elbow
_BASE_AMP = np.array([0.12, 0.08, 0.08, 0.10, 0.18, 0.15, 0.70, 0.0, 0.70, 0.0])
_BASE_FREQ = np.array([0.6, 0.5, 0.5, 0.6, 0.8, 0.8, 1.4, 0.0, 1.4, 0.0])

STYLES = {
    # (joint amp scale, joint freq scale, elbow range rad, elbow freq Hz)
    "walk": (0.8, 0.7, 1.1, 1.0),
    "box": (1.0, 1.3, 2.0, 1.8),
    "mixed": (1.0, 1.0, 1.8, 1.2),
}


def _sin_bank(rng, t, n_comp, amp, freq):
    out = np.zeros_like(t)
    for _ in range(n_comp):
        a = rng.uniform(0.2, 1.0) * amp / n_comp
        f = rng.uniform(0.15, 1.0) * freq
        phase = rng.uniform(0, 2 * np.pi)
        out += a * np.sin(2 * np.pi * f * t + phase)
    return out


def random_motion(duration_s, fps, seed, style="mixed"):
    """Generate a (T, 10, 3) axis-angle pose sequence.

    Deterministic given the seed; style is one of walk / box / mixed.
    """
    if style not in STYLES:
        raise ValueError(f"unknown style {style!r}; options: {sorted(STYLES)}")
    amp_scale, freq_scale, elbow_range, elbow_freq = STYLES[style]
    rng = np.random.default_rng(seed) if not isinstance(seed, np.random.Generator) else seed
    T = int(round(duration_s * fps))
    t = np.arange(T) / fps
    poses = np.zeros((T, 10, 3))
    for slot in range(10):
        if slot in ELBOW_SLOTS:
            continue
        for axis in range(3):
            poses[:, slot, axis] = _sin_bank(
                rng, t, 3, _BASE_AMP[slot] * amp_scale, _BASE_FREQ[slot] * freq_scale)
    for slot in ELBOW_SLOTS:
        # positive flexion envelope: slow carrier modulated by faster bends
        carrier = 0.5 * (1.0 + np.sin(2 * np.pi * rng.uniform(0.05, 0.2) * t
                                      + rng.uniform(0, 2 * np.pi)))
        bend = np.abs(_sin_bank(rng, t, 2, 1.0, elbow_freq))
        flexion = np.clip(elbow_range * carrier * bend, 0.02, 2.4)
        # flexion axis: mostly the vertical-bend axis with a small wobble
        wobble = 0.15 * _sin_bank(rng, t, 2, 1.0, 0.5)
        axis = np.stack([wobble, np.zeros_like(t), np.ones_like(t)], axis=1)
        axis /= np.linalg.norm(axis, axis=1, keepdims=True)
        poses[:, slot] = flexion[:, None] * axis
    return poses


def tpose(duration_s, fps):
    """All-zero poses (the rest pose is a T-pose)."""
    return np.zeros((int(round(duration_s * fps)), 10, 3))


def elbow_bend_gesture(duration_s, fps, max_angle=np.pi / 2):
    """One full vertical elbow bend on both arms: 0 -> max_angle -> 0,
    dwelling ~10% of the time at each extreme so a trimmed-percentile
    range capture still sees the true endpoints."""
    T = int(round(duration_s * fps))
    t = np.arange(T) / max(T - 1, 1)
    flexion = np.zeros(T)
    up = (t >= 0.1) & (t < 0.4)
    flexion[up] = 0.5 * (1.0 - np.cos(np.pi * (t[up] - 0.1) / 0.3))
    flexion[(t >= 0.4) & (t < 0.6)] = 1.0
    down = (t >= 0.6) & (t < 0.9)
    flexion[down] = 0.5 * (1.0 + np.cos(np.pi * (t[down] - 0.6) / 0.3))
    poses = np.zeros((T, 10, 3))
    for slot in ELBOW_SLOTS:
        poses[:, slot, 2] = max_angle * flexion
    return poses
