"""Training-time pose augmentation.

A sample passes through at most one gated pipeline application: each
arm may rotate rigidly about its shoulder, then the whole figure gets a
global rotation, a horizontal squeeze, and a random perspective warp.
All draws come from a caller-supplied generator, so augmentation is
reproducible sample by sample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_L_ARM = (13, 15, 17, 19, 21) + tuple(range(33, 54))
_R_ARM = (14, 16, 18, 20, 22) + tuple(range(54, 75))
_L_SHOULDER = 11
_R_SHOULDER = 12


@dataclass(frozen=True)
class AugmentationConfig:
    apply_probability: float = 0.5
    arm_rotate_max_deg: float = 4.0
    arm_rotate_probability: float = 0.4
    global_rotate_max_deg: float = 17.0
    squeeze_max_ratio: float = 0.4
    perspective_max_ratio: float = 0.2

    def __post_init__(self):
        for name in ("apply_probability", "arm_rotate_probability"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        for name in ("squeeze_max_ratio", "perspective_max_ratio"):
            v = getattr(self, name)
            if not (0.0 <= v < 1.0):
                raise ValueError(f"{name} must be in [0, 1), got {v}")
        if self.arm_rotate_max_deg < 0 or self.global_rotate_max_deg < 0:
            raise ValueError("rotation limits must be non-negative")


def _rotate_about(track: np.ndarray, idx: tuple[int, ...], pivot: np.ndarray, deg: float):
    if deg == 0.0:
        return
    theta = np.deg2rad(deg)
    c, s = np.cos(theta), np.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    rel = track[:, idx, :] - pivot[:, None, :]
    track[:, idx, :] = rel @ rot.T + pivot[:, None, :]


def _perspective_matrix(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    a = np.zeros((8, 8))
    b = np.zeros(8)
    for i, ((x, y), (u, v)) in enumerate(zip(src, dst)):
        a[2 * i] = (x, y, 1, 0, 0, 0, -u * x, -u * y)
        a[2 * i + 1] = (0, 0, 0, x, y, 1, -v * x, -v * y)
        b[2 * i] = u
        b[2 * i + 1] = v
    h = np.linalg.solve(a, b)
    return np.array(
        [[h[0], h[1], h[2]], [h[3], h[4], h[5]], [h[6], h[7], 1.0]]
    )


def augment(
    track: np.ndarray, cfg: AugmentationConfig, rng: np.random.Generator
) -> np.ndarray:
    """Return an augmented copy of a (T, 75, 2) coordinate track."""
    if track.ndim != 3 or track.shape[1] != 75 or track.shape[2] != 2:
        raise ValueError(f"bad track shape {track.shape}")
    if rng.random() >= cfg.apply_probability:
        return track.copy()
    out = track.astype(np.float64).copy()

    for arm, shoulder in ((_L_ARM, _L_SHOULDER), (_R_ARM, _R_SHOULDER)):
        if rng.random() < cfg.arm_rotate_probability:
            deg = rng.uniform(-cfg.arm_rotate_max_deg, cfg.arm_rotate_max_deg)
            _rotate_about(out, arm, out[:, shoulder, :].copy(), deg)

    deg = rng.uniform(-cfg.global_rotate_max_deg, cfg.global_rotate_max_deg)
    center = np.full((out.shape[0], 2), 0.5)
    _rotate_about(out, tuple(range(75)), center, deg)

    squeeze = 1.0 - rng.uniform(0.0, cfg.squeeze_max_ratio)
    if squeeze != 1.0:
        out[:, :, 0] = 0.5 + (out[:, :, 0] - 0.5) * squeeze

    if cfg.perspective_max_ratio > 0.0:
        src = np.array([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
        dst = src + rng.uniform(
            -cfg.perspective_max_ratio, cfg.perspective_max_ratio, size=(4, 2)
        )
        h = _perspective_matrix(src, dst)
        flat = out.reshape(-1, 2)
        ones = np.ones((flat.shape[0], 1))
        proj = np.hstack([flat, ones]) @ h.T
        out = (proj[:, :2] / proj[:, 2:3]).reshape(out.shape)

    np.clip(out, 0.0, 1.0, out=out)
    return out
