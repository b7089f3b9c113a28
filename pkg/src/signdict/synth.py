"""Synthetic pose datasets for training and benchmark runs.

Ten scripted sign classes move one or both hands along fixed
trajectories over a plausible standing skeleton. Classes differ by
direction, location, repetition, or oscillation amplitude, so the set
spans easy separations and deliberately close pairs. Every sample is
reproducible from (seed, class, index) alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalog import GlossEntry, SignMetadata, VocabularyCatalog
from .pose import LANDMARKS_PER_PERSON, PoseSequence

DEFAULT_RESOLUTION = (640, 480)
DEFAULT_FPS = 30.0

# gloss, movement, hands, location, handshape (None = unannotated)
CLASS_TABLE = [
    ("ACROSS", "unidirectional", "one", "torso", "FLAT"),
    ("RETURN", "unidirectional", "one", "torso", "FLAT"),
    ("LIFT", "unidirectional", "one", "face", "OPEN"),
    ("HALO", "circular", "one", "face", "INDEX"),
    ("SPREAD", "bidirectional", "two", "torso", "OPEN"),
    ("WAVE", "repeated", "two", "torso", "OPEN"),
    ("TAP", "repeated", "one", "neck", "INDEX"),
    ("TOUCH", "repeated", "one", "neck", "INDEX"),
    ("REACH", "unidirectional", "one", "in_space", "FLAT"),
    ("POINT", "unidirectional", "one", "in_space", None),
]

MAX_CLASSES = len(CLASS_TABLE)

# oscillation amplitude ranges for the repeated-movement classes; the
# TAP/TOUCH pair is near but non-overlapping so a nearest-template
# decision on clean data stays exact while noisy samples get close
_AMP_RANGES = {5: (0.040, 0.060), 6: (0.0255, 0.0425), 7: (0.009, 0.015)}

_L_SHOULDER = np.array([0.415, 0.300])
_R_SHOULDER = np.array([0.585, 0.300])
_L_WRIST_REST = np.array([0.400, 0.520])
_R_WRIST_REST = np.array([0.600, 0.520])


def _base_skeleton() -> np.ndarray:
    """Neutral standing pose, normalized image coords, y down."""
    pts = np.zeros((LANDMARKS_PER_PERSON, 2))
    pts[0] = (0.500, 0.180)  # nose
    pts[1] = (0.478, 0.163)
    pts[2] = (0.466, 0.163)  # left eye
    pts[3] = (0.454, 0.164)
    pts[4] = (0.522, 0.163)
    pts[5] = (0.534, 0.163)  # right eye
    pts[6] = (0.546, 0.164)
    pts[7] = (0.445, 0.175)  # ears
    pts[8] = (0.555, 0.175)
    pts[9] = (0.482, 0.210)  # mouth
    pts[10] = (0.518, 0.210)
    pts[11] = _L_SHOULDER
    pts[12] = _R_SHOULDER
    pts[13] = (0.385, 0.430)  # elbows
    pts[14] = (0.615, 0.430)
    pts[15] = _L_WRIST_REST
    pts[16] = _R_WRIST_REST
    for i, dx in ((17, -0.020), (19, -0.025), (21, -0.012)):  # left hand stubs
        pts[i] = (_L_WRIST_REST[0] + dx, _L_WRIST_REST[1] + 0.030)
    for i, dx in ((18, 0.020), (20, 0.025), (22, 0.012)):
        pts[i] = (_R_WRIST_REST[0] + dx, _R_WRIST_REST[1] + 0.030)
    pts[23] = (0.455, 0.600)  # hips
    pts[24] = (0.545, 0.600)
    pts[25] = (0.452, 0.780)
    pts[26] = (0.548, 0.780)
    pts[27] = (0.458, 0.930)
    pts[28] = (0.542, 0.930)
    pts[29] = (0.452, 0.958)
    pts[30] = (0.548, 0.958)
    pts[31] = (0.470, 0.970)
    pts[32] = (0.530, 0.970)
    return pts


def _hand_offsets() -> np.ndarray:
    """21 hand landmarks as offsets from the wrist, loose open-palm blob."""
    offs = np.zeros((21, 2))
    offs[0] = (0.0, 0.0)  # wrist
    # thumb, then four fingers of four joints each
    chains = [
        ((-0.018, 0.008), (-0.028, 0.014), (-0.035, 0.020), (-0.040, 0.026)),
        ((-0.010, -0.022), (-0.012, -0.034), (-0.013, -0.043), (-0.014, -0.050)),
        ((0.000, -0.024), (0.000, -0.038), (0.000, -0.048), (0.000, -0.056)),
        ((0.010, -0.022), (0.012, -0.034), (0.013, -0.043), (0.014, -0.050)),
        ((0.020, -0.018), (0.024, -0.028), (0.027, -0.036), (0.029, -0.042)),
    ]
    i = 1
    for chain in chains:
        for dx, dy in chain:
            offs[i] = (dx, dy)
            i += 1
    return offs * 0.8


_HAND = _hand_offsets()


def _wrist_paths(class_id: int, t: np.ndarray, amp: float) -> tuple[np.ndarray, np.ndarray]:
    """Right and left wrist positions along the unit-time axis t."""
    right = np.tile(_R_WRIST_REST, (len(t), 1))
    left = np.tile(_L_WRIST_REST, (len(t), 1))
    if class_id == 0:
        right = np.stack([0.38 + 0.24 * t, np.full_like(t, 0.42)], axis=1)
    elif class_id == 1:
        right = np.stack([0.62 - 0.24 * t, np.full_like(t, 0.42)], axis=1)
    elif class_id == 2:
        right = np.stack([np.full_like(t, 0.58), 0.52 - 0.30 * t], axis=1)
    elif class_id == 3:
        ang = 2 * np.pi * t
        right = np.stack([0.56 + 0.06 * np.cos(ang), 0.26 + 0.06 * np.sin(ang)], axis=1)
    elif class_id == 4:
        right = np.stack([0.55 + 0.12 * t, np.full_like(t, 0.45)], axis=1)
        left = np.stack([0.45 - 0.12 * t, np.full_like(t, 0.45)], axis=1)
    elif class_id == 5:
        osc = amp * np.sin(4 * np.pi * t)
        right = np.stack([np.full_like(t, 0.58), 0.45 + osc], axis=1)
        left = np.stack([np.full_like(t, 0.42), 0.45 - osc], axis=1)
    elif class_id in (6, 7):
        osc = amp * np.sin(6 * np.pi * t)
        right = np.stack([np.full_like(t, 0.56), 0.33 + osc], axis=1)
    elif class_id == 8:
        right = np.stack([0.55 + 0.16 * t, 0.50 - 0.22 * t], axis=1)
    elif class_id == 9:
        right = np.stack([0.60 + 0.16 * t, 0.50 - 0.22 * t], axis=1)
    else:
        raise ValueError(f"class_id must be in [0, {MAX_CLASSES}), got {class_id}")
    return right, left


def _clean_track(class_id: int, frames: int, amp: float) -> np.ndarray:
    """Noise-free (frames, 75, 2) coordinate track for one class."""
    t = np.linspace(0.0, 1.0, frames)
    right_w, left_w = _wrist_paths(class_id, t, amp)
    track = np.tile(_base_skeleton(), (frames, 1, 1))
    track[:, 16] = right_w
    track[:, 15] = left_w
    # elbows trail their wrist partway back toward the shoulder
    track[:, 14] = _R_SHOULDER + 0.55 * (right_w - _R_SHOULDER) + (0.03, 0.02)
    track[:, 13] = _L_SHOULDER + 0.55 * (left_w - _L_SHOULDER) + (-0.03, 0.02)
    track[:, 18] = right_w + (0.020, 0.030)
    track[:, 20] = right_w + (0.025, 0.030)
    track[:, 22] = right_w + (0.012, 0.030)
    track[:, 17] = left_w + (-0.020, 0.030)
    track[:, 19] = left_w + (-0.025, 0.030)
    track[:, 21] = left_w + (-0.012, 0.030)
    track[:, 33:54] = left_w[:, None, :] + _HAND * (-1, 1)  # mirror left hand
    track[:, 54:75] = right_w[:, None, :] + _HAND
    return track


def _nominal_amp(class_id: int) -> float:
    lo, hi = _AMP_RANGES.get(class_id, (0.0, 0.0))
    return (lo + hi) / 2.0


def class_template(class_id: int, frames: int = 60) -> np.ndarray:
    """Canonical noise-free track for a class, nominal parameters."""
    return _clean_track(class_id, frames, _nominal_amp(class_id))


def sample_rng(seed: int, class_id: int, index: int) -> np.random.Generator:
    """Per-sample generator; independent stream for every (class, index)."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(class_id, index)))
    )


def make_sample(
    class_id: int, index: int, frames: int, noise_sigma: float, seed: int
) -> np.ndarray:
    """One sample as a (frames, 75, 3) array of x, y, visibility."""
    rng = sample_rng(seed, class_id, index)
    if class_id in _AMP_RANGES:
        lo, hi = _AMP_RANGES[class_id]
        amp = rng.uniform(lo, hi)
    else:
        amp = 0.0
    track = _clean_track(class_id, frames, amp)
    track = track + rng.normal(0.0, noise_sigma, size=track.shape)
    np.clip(track, 0.0, 1.0, out=track)
    vis = np.empty((frames, LANDMARKS_PER_PERSON))
    vis[:, :33] = 0.97 + rng.normal(0.0, 0.01, size=(frames, 33))
    vis[:, 33:] = 0.90 + rng.normal(0.0, 0.03, size=(frames, 42))
    np.clip(vis, 0.0, 1.0, out=vis)
    return np.concatenate([track, vis[:, :, None]], axis=2)


@dataclass
class SynthDataset:
    """Array-backed labeled pose samples plus their generation recipe."""

    coords: np.ndarray  # (N, frames, 75, 3) float32
    labels: np.ndarray  # (N,) int64 class ids
    indices: np.ndarray  # (N,) int64 per-class sample indices
    frames: int
    noise_sigma: float
    seed: int
    fps: float = DEFAULT_FPS
    resolution: tuple[int, int] = DEFAULT_RESOLUTION

    def __len__(self) -> int:
        return self.coords.shape[0]

    def sequence(self, i: int) -> PoseSequence:
        return PoseSequence(
            self.coords[i].astype(np.float64), self.fps, self.resolution
        )


def synthesize_dataset(
    num_classes: int,
    per_class: int,
    frames: int = 60,
    noise_sigma: float = 0.02,
    seed: int = 0,
) -> SynthDataset:
    """Build a labeled dataset of per_class samples for each class."""
    if not (1 <= num_classes <= MAX_CLASSES):
        raise ValueError(f"num_classes must be in [1, {MAX_CLASSES}], got {num_classes}")
    if per_class < 1 or frames < 2:
        raise ValueError("per_class must be >= 1 and frames >= 2")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be non-negative")
    n = num_classes * per_class
    coords = np.empty((n, frames, LANDMARKS_PER_PERSON, 3), dtype=np.float32)
    labels = np.empty(n, dtype=np.int64)
    indices = np.empty(n, dtype=np.int64)
    row = 0
    for c in range(num_classes):
        for i in range(per_class):
            coords[row] = make_sample(c, i, frames, noise_sigma, seed)
            labels[row] = c
            indices[row] = i
            row += 1
    return SynthDataset(coords, labels, indices, frames, noise_sigma, seed)


def split_dataset(ds: SynthDataset, train_per_class: int) -> tuple[SynthDataset, SynthDataset]:
    """Split by per-class sample index: first train_per_class train, rest test."""
    train_mask = ds.indices < train_per_class
    def take(mask: np.ndarray) -> SynthDataset:
        return SynthDataset(
            ds.coords[mask], ds.labels[mask], ds.indices[mask],
            ds.frames, ds.noise_sigma, ds.seed, ds.fps, ds.resolution,
        )
    return take(train_mask), take(~train_mask)


def synthetic_catalog(num_classes: int = MAX_CLASSES) -> VocabularyCatalog:
    """Catalog describing the scripted classes, one rendition per gloss."""
    if not (1 <= num_classes <= MAX_CLASSES):
        raise ValueError(f"num_classes must be in [1, {MAX_CLASSES}], got {num_classes}")
    entries = []
    for c in range(num_classes):
        gloss, movement, hands, location, handshape = CLASS_TABLE[c]
        meta = SignMetadata(movement=movement, hands=hands, location=location, handshape=handshape)
        entries.append(
            GlossEntry(
                rendition_id=f"synth-{c:03d}",
                gloss=gloss,
                metadata=meta,
                example_media=f"synth:class={c},seed=0",
            )
        )
    return VocabularyCatalog(entries)
