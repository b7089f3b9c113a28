"""Submission quality gate.

Two check families run before recognition: technical checks on the
uploaded bytes (completeness, decodability, capture resolution) and
visibility checks on the estimated pose tracks (person count, framing,
landmark visibility). Technical failures reject a submission; framing
problems only warn, since recognition may still succeed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pose import PoseSequence

SEVERITY_ERROR = "error"
SEVERITY_WARNING = "warning"

VERDICT_PROCEED = "proceed"
VERDICT_PROCEED_WITH_WARNINGS = "proceed_with_warnings"
VERDICT_REJECT = "reject"

# landmark regions the visibility checks look at
_FACE = tuple(range(0, 11))
_TORSO = (11, 12, 23, 24)
_HANDS = tuple(range(33, 75))

_CATALOG = {
    "incomplete_upload": (
        SEVERITY_ERROR,
        "The upload ended before the clip was complete.",
        "Re-record or re-upload; the file is cut off partway through.",
    ),
    "undecodable": (
        SEVERITY_ERROR,
        "The file could not be decoded.",
        "Upload the clip in a supported format.",
    ),
    "low_resolution": (
        SEVERITY_WARNING,
        "The capture resolution is low, which hurts hand detail.",
        "Record at a higher resolution or move the camera closer.",
    ),
    "multiple_people": (
        SEVERITY_WARNING,
        "More than one person is visible.",
        "Make sure only the signer is in the frame.",
    ),
    "off_center": (
        SEVERITY_WARNING,
        "The signer is far from the middle of the frame.",
        "Stand closer to the center of the frame.",
    ),
    "hands_not_visible": (
        SEVERITY_WARNING,
        "The hands are not reliably visible.",
        "Keep both hands inside the frame while signing.",
    ),
    "torso_not_visible": (
        SEVERITY_WARNING,
        "The upper body is not reliably visible.",
        "Step back so your shoulders and hips stay in view.",
    ),
    "face_not_visible": (
        SEVERITY_WARNING,
        "The face is not reliably visible.",
        "Face the camera directly.",
    ),
}

BYTE_COMPLETE = "complete"
BYTE_TRUNCATED = "truncated"
BYTE_UNDECODABLE = "undecodable"


@dataclass(frozen=True)
class Issue:
    code: str
    severity: str
    message: str
    suggestion: str

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "severity": self.severity,
            "message": self.message,
            "suggestion": self.suggestion,
        }


def make_issue(code: str) -> Issue:
    severity, message, suggestion = _CATALOG[code]
    return Issue(code, severity, message, suggestion)


@dataclass(frozen=True)
class GateThresholds:
    min_width: int = 192
    min_height: int = 144
    center_band: float = 0.30
    visibility_floor: float = 0.5
    min_visible_fraction: float = 0.6

    def __post_init__(self):
        if self.min_width < 1 or self.min_height < 1:
            raise ValueError("minimum resolution must be positive")
        for name in ("center_band", "visibility_floor", "min_visible_fraction"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must be in [0, 1], got {v}")


def check_technical(
    byte_status: str,
    resolution: tuple[int, int] | None,
    thresholds: GateThresholds = GateThresholds(),
) -> list[Issue]:
    """Checks on the raw upload, before any pose estimation."""
    if byte_status == BYTE_TRUNCATED:
        return [make_issue("incomplete_upload")]
    if byte_status == BYTE_UNDECODABLE:
        return [make_issue("undecodable")]
    if byte_status != BYTE_COMPLETE:
        raise ValueError(f"unknown byte status {byte_status!r}")
    issues = []
    if resolution is not None:
        w, h = resolution
        if w < thresholds.min_width or h < thresholds.min_height:
            issues.append(make_issue("low_resolution"))
    return issues


def _visible_fraction(seq: PoseSequence, region: tuple[int, ...], floor: float) -> float:
    vis = seq.data[:, region, 2]
    return float(np.mean(vis >= floor))


def check_visibility(
    people: list[PoseSequence], thresholds: GateThresholds = GateThresholds()
) -> list[Issue]:
    """Framing checks on estimated pose tracks, one per detected person."""
    if not people:
        raise ValueError("no pose tracks to check")
    if len(people) > 1:
        return [make_issue("multiple_people")]
    person = people[0]
    issues = []
    torso_mid_x = float(np.mean(person.data[:, _TORSO, 0]))
    if abs(torso_mid_x - 0.5) > thresholds.center_band / 2:
        issues.append(make_issue("off_center"))
    for code, region in (
        ("hands_not_visible", _HANDS),
        ("torso_not_visible", _TORSO),
        ("face_not_visible", _FACE),
    ):
        frac = _visible_fraction(person, region, thresholds.visibility_floor)
        if frac < thresholds.min_visible_fraction:
            issues.append(make_issue(code))
    return issues


@dataclass
class SubmissionReport:
    verdict: str
    issues: list[Issue] = field(default_factory=list)

    @property
    def summary(self) -> str:
        errors = [i for i in self.issues if i.severity == SEVERITY_ERROR]
        warnings = [i for i in self.issues if i.severity == SEVERITY_WARNING]
        if errors:
            return "Submission rejected: " + " ".join(i.message for i in errors)
        if warnings:
            n = len(warnings)
            return f"Submission accepted with {n} warning{'s' if n != 1 else ''}."
        return "Submission looks good."

    @property
    def suggestions(self) -> list[str]:
        seen, out = set(), []
        for i in self.issues:
            if i.suggestion not in seen:
                seen.add(i.suggestion)
                out.append(i.suggestion)
        return out

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "summary": self.summary,
            "issues": [i.to_dict() for i in self.issues],
            "suggestions": self.suggestions,
        }


def gate(technical: list[Issue], visibility: list[Issue]) -> SubmissionReport:
    """Fold both check families into a verdict."""
    issues = list(technical) + list(visibility)
    if any(i.severity == SEVERITY_ERROR for i in issues):
        return SubmissionReport(VERDICT_REJECT, issues)
    if issues:
        return SubmissionReport(VERDICT_PROCEED_WITH_WARNINGS, issues)
    return SubmissionReport(VERDICT_PROCEED, issues)
