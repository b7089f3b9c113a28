"""Pose sequence types, file format, and geometry helpers.

A pose frame holds 75 landmarks in normalized image coordinates:
indices 0-32 are body points, 33-53 the left hand, 54-74 the right
hand. Sequences carry their capture rate and source resolution so the
quality gate and the recognizer can reason about pixel geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

LANDMARKS_PER_PERSON = 75
BODY_SLICE = slice(0, 33)
LEFT_HAND_SLICE = slice(33, 54)
RIGHT_HAND_SLICE = slice(54, 75)

# boundary slack for start_s*fps landing a hair under an integer
_FRAME_EPS = 1e-9


class Landmark(NamedTuple):
    x: float
    y: float
    visibility: float


@dataclass(frozen=True)
class PoseFrame:
    """One person's landmarks for a single video frame."""

    landmarks: tuple[Landmark, ...]

    def __post_init__(self):
        if len(self.landmarks) != LANDMARKS_PER_PERSON:
            raise ValueError(
                f"expected {LANDMARKS_PER_PERSON} landmarks, got {len(self.landmarks)}"
            )


@dataclass
class PoseSequence:
    """Landmark track for one person across a clip.

    `data` has shape (frames, 75, 3) with columns x, y, visibility,
    all in [0, 1]. `source_resolution` is the (width, height) of the
    video the landmarks were estimated from.
    """

    data: np.ndarray
    fps: float
    source_resolution: tuple[int, int]

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        self.fps = float(self.fps)
        if self.data.ndim != 3 or self.data.shape[1:] != (LANDMARKS_PER_PERSON, 3):
            raise ValueError(f"bad pose data shape {self.data.shape}")
        if self.data.shape[0] < 1:
            raise ValueError("pose sequence must contain at least one frame")
        if not (self.fps > 0):
            raise ValueError(f"fps must be positive, got {self.fps}")
        w, h = self.source_resolution
        if w < 1 or h < 1:
            raise ValueError(f"bad source resolution {self.source_resolution}")
        if np.min(self.data) < 0.0 or np.max(self.data) > 1.0:
            raise ValueError("landmark values must lie in [0, 1]")

    def __len__(self) -> int:
        return self.data.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.fps

    def frame(self, i: int) -> PoseFrame:
        return PoseFrame(tuple(Landmark(*row) for row in self.data[i]))

    @property
    def frames(self) -> tuple[PoseFrame, ...]:
        return tuple(self.frame(i) for i in range(len(self)))

    @classmethod
    def from_frames(
        cls, frames: Iterable[PoseFrame], fps: float, source_resolution: tuple[int, int]
    ) -> "PoseSequence":
        data = np.array([[tuple(lm) for lm in f.landmarks] for f in frames], dtype=np.float64)
        return cls(data, fps, source_resolution)


def trim(seq: PoseSequence, start_s: float, end_s: float) -> PoseSequence:
    """Cut a sequence to [start_s, end_s), rounding outward to whole frames.

    Keeps frames floor(start_s*fps) through ceil(end_s*fps)-1 inclusive.
    """
    if not (0.0 <= start_s < end_s):
        raise ValueError(f"bad trim bounds [{start_s}, {end_s}]")
    if end_s > seq.duration_s + _FRAME_EPS:
        raise ValueError(f"trim end {end_s}s beyond clip duration {seq.duration_s}s")
    first = math.floor(start_s * seq.fps + _FRAME_EPS)
    last = math.ceil(end_s * seq.fps - _FRAME_EPS) - 1
    last = min(last, len(seq) - 1)
    if last < first:
        raise ValueError("trim window selects no frames")
    return PoseSequence(seq.data[first : last + 1].copy(), seq.fps, seq.source_resolution)


def scaled_resolution(resolution: tuple[int, int], ratio: float) -> tuple[int, int]:
    """Pixel grid of a capture downscaled by ratio; never below 2 a side."""
    if not (0.0 < ratio <= 1.0):
        raise ValueError(f"ratio must be in (0, 1], got {ratio}")
    w, h = resolution
    return max(2, round(w * ratio)), max(2, round(h * ratio))


def quantize_coords(
    data: np.ndarray, resolution: tuple[int, int], ratio: float
) -> np.ndarray:
    """Snap x/y columns of (..., >=2) landmark data to a downscaled grid.

    At scale `ratio`, a w-pixel-wide source has W = max(2, round(w*ratio))
    addressable columns, so x snaps to round(x*(W-1))/(W-1); y likewise
    against the scaled height. Any further columns pass through untouched.
    """
    wq, hq = scaled_resolution(resolution, ratio)
    out = np.array(data, dtype=np.float64, copy=True)
    out[..., 0] = np.round(out[..., 0] * (wq - 1)) / (wq - 1)
    out[..., 1] = np.round(out[..., 1] * (hq - 1)) / (hq - 1)
    return out


def quantize_resolution(seq: PoseSequence, ratio: float) -> PoseSequence:
    """Sequence as it would look captured at a fraction of its resolution."""
    data = quantize_coords(seq.data, seq.source_resolution, ratio)
    return PoseSequence(data, seq.fps, scaled_resolution(seq.source_resolution, ratio))


# ---------------------------------------------------------------------------
# file format
#
# Line 1:  POSE v1 fps=<float> w=<int> h=<int> n=<75*people>
# Then one line per frame: n*3 values (x y visibility per landmark),
# six decimal places, space separated. '#' lines are comments.
# ---------------------------------------------------------------------------

_MAGIC = "POSE"
_VERSION = "v1"


class PoseFormatError(ValueError):
    """Raised when bytes do not decode to a valid pose file."""


class PoseTruncationError(PoseFormatError):
    """Raised when a pose file starts well but ends mid-frame."""


def _parse_header(line: str) -> tuple[float, int, int, int]:
    parts = line.split()
    if len(parts) != 6 or parts[0] != _MAGIC or parts[1] != _VERSION:
        raise PoseFormatError(f"bad pose header: {line!r}")
    fields = {}
    for part in parts[2:]:
        key, _, value = part.partition("=")
        if not value:
            raise PoseFormatError(f"bad header field: {part!r}")
        fields[key] = value
    try:
        fps = float(fields["fps"])
        w = int(fields["w"])
        h = int(fields["h"])
        n = int(fields["n"])
    except (KeyError, ValueError) as exc:
        raise PoseFormatError(f"bad header fields in {line!r}") from exc
    if fps <= 0 or w < 1 or h < 1:
        raise PoseFormatError(f"bad header values in {line!r}")
    if n < LANDMARKS_PER_PERSON or n % LANDMARKS_PER_PERSON != 0:
        raise PoseFormatError(f"landmark count {n} is not a multiple of {LANDMARKS_PER_PERSON}")
    return fps, w, h, n


def parse_pose_tracks(text: str | bytes) -> list[PoseSequence]:
    """Parse a pose file into one sequence per recorded person."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise PoseFormatError("pose file is not valid UTF-8") from exc
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise PoseFormatError("empty pose file")
    fps, w, h, n = _parse_header(lines[0])
    people = n // LANDMARKS_PER_PERSON
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        values = line.split()
        if len(values) != n * 3:
            raise PoseTruncationError(
                f"line {lineno}: expected {n * 3} values, got {len(values)}"
            )
        try:
            row = np.array([float(v) for v in values], dtype=np.float64)
        except ValueError as exc:
            raise PoseFormatError(f"line {lineno}: non-numeric value") from exc
        rows.append(row)
    if not rows:
        raise PoseTruncationError("pose file has a header but no frames")
    data = np.stack(rows).reshape(len(rows), people, LANDMARKS_PER_PERSON, 3)
    if np.min(data) < 0.0 or np.max(data) > 1.0:
        raise PoseFormatError("landmark values must lie in [0, 1]")
    return [PoseSequence(data[:, p], fps, (w, h)) for p in range(people)]


def parse_pose_file(text: str | bytes) -> PoseSequence:
    """Parse a single-person pose file."""
    tracks = parse_pose_tracks(text)
    if len(tracks) != 1:
        raise PoseFormatError(f"expected a single-person file, found {len(tracks)} tracks")
    return tracks[0]


def write_pose_tracks(tracks: list[PoseSequence]) -> str:
    if not tracks:
        raise ValueError("no tracks to write")
    first = tracks[0]
    for t in tracks[1:]:
        if len(t) != len(first) or t.fps != first.fps:
            raise ValueError("all tracks must share frame count and fps")
    n = LANDMARKS_PER_PERSON * len(tracks)
    w, h = first.source_resolution
    out = [f"{_MAGIC} {_VERSION} fps={first.fps!r} w={w} h={h} n={n}"]
    stacked = np.concatenate([t.data for t in tracks], axis=1)  # (T, n, 3)
    for frame in stacked:
        out.append(" ".join(f"{v:.6f}" for v in frame.ravel()))
    return "\n".join(out) + "\n"


def write_pose_file(seq: PoseSequence) -> str:
    return write_pose_tracks([seq])
