"""Vocabulary catalog: the closed set of sign renditions the engine ranks.

Each catalog entry is one recorded rendition of a gloss. Glosses may
appear several times (regional or stylistic variants); every rendition
is its own recognition class, indexed by file order.

Catalog files are UTF-8 TSV, one entry per line:

    rendition_id<TAB>gloss<TAB>movement<TAB>hands<TAB>location<TAB>handshape<TAB>example_media

'#' starts a comment line and '-' marks an absent handshape.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

MOVEMENTS = frozenset({"unidirectional", "bidirectional", "repeated", "circular", "none"})
HANDS = frozenset({"one", "two"})
LOCATIONS = frozenset({"torso", "neck", "face", "in_space"})

_ABSENT = "-"


@dataclass(frozen=True)
class SignMetadata:
    """Linguistic feature annotation for one rendition."""

    movement: str
    hands: str
    location: str
    handshape: str | None = None

    def __post_init__(self):
        if self.movement not in MOVEMENTS:
            raise ValueError(f"unknown movement {self.movement!r}")
        if self.hands not in HANDS:
            raise ValueError(f"unknown hands value {self.hands!r}")
        if self.location not in LOCATIONS:
            raise ValueError(f"unknown location {self.location!r}")
        if self.handshape is not None and (not self.handshape or self.handshape == _ABSENT):
            raise ValueError("handshape must be a non-empty label or None")


@dataclass(frozen=True)
class GlossEntry:
    rendition_id: str
    gloss: str
    metadata: SignMetadata
    example_media: str

    def __post_init__(self):
        if not self.rendition_id or any(c.isspace() for c in self.rendition_id):
            raise ValueError(f"bad rendition_id {self.rendition_id!r}")
        if not self.gloss:
            raise ValueError("gloss must be non-empty")


def shares_attribute(a: SignMetadata, b: SignMetadata) -> bool:
    """Partial-match rule for graded relevance.

    Two renditions count as related when they agree on hands, movement,
    or handshape. Location is deliberately ignored, and an unannotated
    handshape never matches anything.
    """
    if a.hands == b.hands:
        return True
    if a.movement == b.movement:
        return True
    if a.handshape is not None and b.handshape is not None and a.handshape == b.handshape:
        return True
    return False


class VocabularyCatalog:
    """Ordered, immutable collection of renditions; order defines class ids."""

    def __init__(self, entries: list[GlossEntry]):
        if not entries:
            raise ValueError("catalog must contain at least one entry")
        seen = set()
        for e in entries:
            if e.rendition_id in seen:
                raise ValueError(f"duplicate rendition_id {e.rendition_id!r}")
            seen.add(e.rendition_id)
        self._entries = tuple(entries)
        self._index = {e.rendition_id: i for i, e in enumerate(self._entries)}

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    @property
    def entries(self) -> tuple[GlossEntry, ...]:
        return self._entries

    def entry(self, class_index: int) -> GlossEntry:
        return self._entries[class_index]

    def class_index(self, rendition_id: str) -> int:
        return self._index[rendition_id]

    def unique_glosses(self) -> set[str]:
        return {e.gloss for e in self._entries}

    def multi_rendition_glosses(self) -> set[str]:
        counts: dict[str, int] = {}
        for e in self._entries:
            counts[e.gloss] = counts.get(e.gloss, 0) + 1
        return {g for g, c in counts.items() if c > 1}

    def to_tsv(self) -> str:
        lines = []
        for e in self._entries:
            m = e.metadata
            lines.append(
                "\t".join(
                    [
                        e.rendition_id,
                        e.gloss,
                        m.movement,
                        m.hands,
                        m.location,
                        m.handshape if m.handshape is not None else _ABSENT,
                        e.example_media,
                    ]
                )
            )
        return "\n".join(lines) + "\n"

    def fingerprint(self) -> str:
        """Hex digest of the canonical serialization; pins models to catalogs."""
        return hashlib.sha256(self.to_tsv().encode("utf-8")).hexdigest()


def parse_catalog(text: str) -> VocabularyCatalog:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 7:
            raise ValueError(f"line {lineno}: expected 7 tab-separated fields, got {len(fields)}")
        rendition_id, gloss, movement, hands, location, handshape, media = fields
        meta = SignMetadata(
            movement=movement,
            hands=hands,
            location=location,
            handshape=None if handshape == _ABSENT else handshape,
        )
        entries.append(GlossEntry(rendition_id, gloss, meta, media))
    return VocabularyCatalog(entries)


def load_catalog(path: str | Path) -> VocabularyCatalog:
    return parse_catalog(Path(path).read_text(encoding="utf-8"))


def save_catalog(catalog: VocabularyCatalog, path: str | Path) -> None:
    Path(path).write_text(catalog.to_tsv(), encoding="utf-8")
