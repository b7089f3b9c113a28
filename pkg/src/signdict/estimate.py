"""Pose estimation boundary.

Recognition never touches raw media directly; an estimator turns
uploaded bytes into pose tracks and reports what it could read. The
file-backed estimator consumes the text pose format (stand-in for a
camera-model pipeline); the synthetic estimator replays generated
samples from a compact recipe string, which keeps example media for
the scripted vocabulary fully reproducible.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

from .gate import BYTE_COMPLETE, BYTE_TRUNCATED, BYTE_UNDECODABLE
from .pose import (
    PoseFormatError,
    PoseSequence,
    PoseTruncationError,
    parse_pose_tracks,
)
from . import synth

SYNTH_PREFIX = "synth:"


@dataclass(frozen=True)
class EstimatorCapabilities:
    max_resolution: tuple[int, int]
    containers: tuple[str, ...]


@dataclass(frozen=True)
class MediaProbe:
    byte_status: str  # complete | truncated | undecodable
    resolution: tuple[int, int] | None


class PoseEstimator(ABC):
    """Turns uploaded media bytes into per-person pose tracks."""

    @abstractmethod
    def capabilities(self) -> EstimatorCapabilities: ...

    @abstractmethod
    def probe(self, media: bytes | str) -> MediaProbe:
        """Cheap technical inspection without full decoding."""

    @abstractmethod
    def tracks(self, media: bytes | str) -> list[PoseSequence]:
        """All detected people, primary signer first."""

    def estimate(self, media: bytes | str) -> PoseSequence:
        """Pose track of the primary signer."""
        tracks = self.tracks(media)
        if not tracks:
            raise ValueError("no person detected")
        return tracks[0]


class FilePoseEstimator(PoseEstimator):
    """Reads the text pose format instead of running a vision model."""

    def capabilities(self) -> EstimatorCapabilities:
        return EstimatorCapabilities(max_resolution=(3840, 2160), containers=("pose",))

    def probe(self, media: bytes | str) -> MediaProbe:
        try:
            tracks = parse_pose_tracks(media)
        except PoseTruncationError:
            return MediaProbe(BYTE_TRUNCATED, self._header_resolution(media))
        except PoseFormatError:
            return MediaProbe(BYTE_UNDECODABLE, None)
        return MediaProbe(BYTE_COMPLETE, tracks[0].source_resolution)

    @staticmethod
    def _header_resolution(media: bytes | str) -> tuple[int, int] | None:
        from .pose import _parse_header

        try:
            text = media.decode("utf-8") if isinstance(media, bytes) else media
            for line in text.splitlines():
                line = line.strip()
                if line and not line.startswith("#"):
                    _, w, h, _ = _parse_header(line)
                    return (w, h)
        except (UnicodeDecodeError, PoseFormatError):
            return None
        return None

    def tracks(self, media: bytes | str) -> list[PoseSequence]:
        return parse_pose_tracks(media)


class SyntheticPoseEstimator(PoseEstimator):
    """Replays generated samples from recipe strings.

    Media must be UTF-8 text like "synth:class=3,seed=9"; optional keys
    index, frames, and noise refine the recipe.
    """

    def capabilities(self) -> EstimatorCapabilities:
        return EstimatorCapabilities(
            max_resolution=synth.DEFAULT_RESOLUTION, containers=("synth",)
        )

    @staticmethod
    def _parse_recipe(media: bytes | str) -> dict:
        try:
            text = media.decode("utf-8") if isinstance(media, bytes) else media
        except UnicodeDecodeError as exc:
            raise ValueError("synthetic recipe must be UTF-8 text") from exc
        text = text.strip()
        if not text.startswith(SYNTH_PREFIX):
            raise ValueError(f"synthetic recipe must start with {SYNTH_PREFIX!r}")
        fields = {"index": 0, "frames": 60, "noise": 0.02}
        for part in text[len(SYNTH_PREFIX):].split(","):
            key, _, value = part.strip().partition("=")
            if key in ("class", "seed", "index", "frames"):
                fields[key] = int(value)
            elif key == "noise":
                fields[key] = float(value)
            else:
                raise ValueError(f"unknown recipe field {key!r}")
        if "class" not in fields or "seed" not in fields:
            raise ValueError("recipe needs class= and seed=")
        return fields

    def probe(self, media: bytes | str) -> MediaProbe:
        try:
            self._parse_recipe(media)
        except ValueError:
            return MediaProbe(BYTE_UNDECODABLE, None)
        return MediaProbe(BYTE_COMPLETE, synth.DEFAULT_RESOLUTION)

    def tracks(self, media: bytes | str) -> list[PoseSequence]:
        r = self._parse_recipe(media)
        coords = synth.make_sample(r["class"], r["index"], r["frames"], r["noise"], r["seed"])
        return [PoseSequence(coords, synth.DEFAULT_FPS, synth.DEFAULT_RESOLUTION)]
