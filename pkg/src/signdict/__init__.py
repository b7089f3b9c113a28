"""Pose-based sign dictionary engine.

Subpackages cover the full lookup pipeline: pose capture and storage,
submission quality gating, sequence recognition, ranked result views,
an evaluation harness, and an HTTP service exposing the lot.
"""

__version__ = "0.1.0"

from .catalog import (
    GlossEntry,
    SignMetadata,
    VocabularyCatalog,
    load_catalog,
    shares_attribute,
)
from .pose import Landmark, PoseFrame, PoseSequence, parse_pose_file, write_pose_file

__all__ = [
    "GlossEntry",
    "SignMetadata",
    "VocabularyCatalog",
    "load_catalog",
    "shares_attribute",
    "Landmark",
    "PoseFrame",
    "PoseSequence",
    "parse_pose_file",
    "write_pose_file",
    "__version__",
]
