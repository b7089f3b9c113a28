"""Ranked results, confidence labels, and result views.

A class-probability distribution becomes an ordered result list over
the whole catalog; ties break toward the lower class index so ordering
is total and reproducible. Confidence wording is banded: thirds of the
probability mass map to unlikely / possibly / probably.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .catalog import HANDS, LOCATIONS, MOVEMENTS, SignMetadata, VocabularyCatalog
from .recognizer import Distribution, TrainedModel

CONFIDENCE_PROBABLY = "probably"
CONFIDENCE_POSSIBLY = "possibly"
CONFIDENCE_UNLIKELY = "unlikely"

COMPACT_GRID_SIZE = 6  # grid entries under the single primary result
DETAILED_MAX_ENTRIES = 20


def confidence_label(p: float) -> str:
    """Band a probability into dictionary-style wording, lower bounds inclusive."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"probability out of range: {p}")
    if p >= 2.0 / 3.0:
        return CONFIDENCE_PROBABLY
    if p >= 1.0 / 3.0:
        return CONFIDENCE_POSSIBLY
    return CONFIDENCE_UNLIKELY


@dataclass(frozen=True)
class RankedResult:
    rank: int  # position in the current list, 1-based
    original_rank: int  # position before any filtering
    class_index: int
    rendition_id: str
    gloss: str
    probability: float
    confidence: str
    metadata: SignMetadata
    example_media: str

    def to_dict(self) -> dict:
        m = self.metadata
        return {
            "rank": self.rank,
            "original_rank": self.original_rank,
            "class_index": self.class_index,
            "rendition_id": self.rendition_id,
            "gloss": self.gloss,
            "probability": self.probability,
            "confidence": self.confidence,
            "movement": m.movement,
            "hands": m.hands,
            "location": m.location,
            "handshape": m.handshape,
            "example_media": self.example_media,
        }


def rank(
    dist: Distribution, catalog: VocabularyCatalog, model: TrainedModel | None = None
) -> list[RankedResult]:
    """Order every catalog entry by descending probability.

    When the producing model is given, its catalog fingerprint must
    match; ranking against the wrong vocabulary is an error, not a
    silently shuffled list.
    """
    if len(dist.probs) != len(catalog):
        raise ValueError(
            f"distribution over {len(dist.probs)} classes vs catalog of {len(catalog)}"
        )
    if model is not None and not model.matches_catalog(catalog):
        raise ValueError("model was trained against a different catalog")
    order = sorted(range(len(catalog)), key=lambda i: (-dist.probs[i], i))
    results = []
    for pos, ci in enumerate(order, start=1):
        e = catalog.entry(ci)
        p = float(dist.probs[ci])
        results.append(
            RankedResult(
                rank=pos,
                original_rank=pos,
                class_index=ci,
                rendition_id=e.rendition_id,
                gloss=e.gloss,
                probability=p,
                confidence=confidence_label(p),
                metadata=e.metadata,
                example_media=e.example_media,
            )
        )
    return results


def filter_results(
    results: list[RankedResult],
    movement: str | None = None,
    hands: str | None = None,
    location: str | None = None,
    handshape: str | None = None,
) -> list[RankedResult]:
    """Keep results matching every given criterion, in original order.

    Ranks are renumbered contiguously; original_rank keeps each entry's
    place in the unfiltered list. A handshape criterion never matches
    unannotated entries.
    """
    if movement is not None and movement not in MOVEMENTS:
        raise ValueError(f"unknown movement {movement!r}")
    if hands is not None and hands not in HANDS:
        raise ValueError(f"unknown hands value {hands!r}")
    if location is not None and location not in LOCATIONS:
        raise ValueError(f"unknown location {location!r}")
    kept = []
    for r in results:
        m = r.metadata
        if movement is not None and m.movement != movement:
            continue
        if hands is not None and m.hands != hands:
            continue
        if location is not None and m.location != location:
            continue
        if handshape is not None and (m.handshape is None or m.handshape != handshape):
            continue
        kept.append(r)
    return [replace(r, rank=i) for i, r in enumerate(kept, start=1)]


def compose_view(results: list[RankedResult], kind: str) -> dict:
    """Shape a result list for display.

    compact: one primary result plus a grid of up to six runners-up.
    detailed: up to twenty entries in rank order.
    """
    if not results:
        raise ValueError("no results to compose")
    if kind == "compact":
        return {
            "view": "compact",
            "primary": results[0].to_dict(),
            "grid": [r.to_dict() for r in results[1 : 1 + COMPACT_GRID_SIZE]],
        }
    if kind == "detailed":
        return {
            "view": "detailed",
            "entries": [r.to_dict() for r in results[:DETAILED_MAX_ENTRIES]],
        }
    raise ValueError(f"unknown view kind {kind!r}")
