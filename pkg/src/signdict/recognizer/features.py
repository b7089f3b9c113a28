"""Feature extraction: camera-invariant landmark normalization.

Coordinates are first snapped to integer micro-units (1e-6) so that
centering can be done in exact integer arithmetic: a clip shifted by a
whole number of micro-units yields bit-identical features. Scale comes
from the torso bounding-box diagonal, making the features invariant to
translation and uniform to body size.
"""

from __future__ import annotations

import math

import numpy as np

# shoulders and hips; stable under arm movement, defines body scale
TORSO_LANDMARKS = (11, 12, 23, 24)

# eyes, ears, shoulders, elbows, wrists, hips, then both full hands
DEFAULT_SUBSET = (2, 5, 7, 8, 11, 12, 13, 14, 15, 16, 23, 24) + tuple(range(33, 75))

_MICRO = 1_000_000


def feature_dim(subset: tuple[int, ...] = DEFAULT_SUBSET) -> int:
    return 2 * len(subset)


def normalize(
    coords: np.ndarray, subset: tuple[int, ...] = DEFAULT_SUBSET
) -> np.ndarray:
    """Map (T, 75, >=2) landmark coords to (T, 2*|subset|) float32 features.

    Each frame is centered on the clip-wide torso centroid and scaled by
    the clip-wide torso bounding-box diagonal. Centering happens on
    micro-unit integers, so uniform translations that survive the input
    quantization cancel exactly.
    """
    if coords.ndim != 3 or coords.shape[1] < max(TORSO_LANDMARKS) + 1:
        raise ValueError(f"bad coords shape {coords.shape}")
    q = np.rint(coords[:, :, :2].astype(np.float64) * _MICRO).astype(np.int64)
    frames = q.shape[0]
    torso_sums = q[:, TORSO_LANDMARKS, :].sum(axis=0)  # (4, 2), exact
    n = frames * len(TORSO_LANDMARKS)
    total = torso_sums.sum(axis=0)
    # bbox of the temporal mean of each torso landmark, held as integer
    # sums so uniform micro-unit shifts cancel exactly; the mean damps
    # per-frame estimation noise that would otherwise inflate the box
    span = torso_sums.max(axis=0) - torso_sums.min(axis=0)
    diag = math.hypot(float(span[0]), float(span[1]))
    if diag == 0.0:
        raise ValueError("degenerate pose: torso has no spatial extent")
    centered = n * q[:, subset, :] - total  # exact integers
    feats = centered.astype(np.float64) * (frames / (n * diag))
    return feats.reshape(coords.shape[0], -1).astype(np.float32)
