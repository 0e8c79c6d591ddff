"""Web evidence search (fixture-backed) and the evidence document record."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import ConfigError

SOURCE_KINDS = ("peer_reviewed", "preprint", "government", "web", "unknown")
DEFAULT_KEYWORDS = ("plastic", "microplastic", "nanoplastic", "pollut", "polymer", "bisphenol")


@dataclass(frozen=True)
class EvidenceDoc:
    doc_id: str
    title: str
    text: str
    source_kind: str = "unknown"
    date: tuple[int, int] | None = None
    origin: str = "web"

    def __post_init__(self):
        if self.source_kind not in SOURCE_KINDS:
            object.__setattr__(self, "source_kind", "unknown")
        if self.origin not in ("internal", "web"):
            raise ValueError(f"origin must be internal or web, got {self.origin!r}")

    def to_json(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "title": self.title,
            "text": self.text,
            "source_kind": self.source_kind,
            "date": list(self.date) if self.date else None,
            "origin": self.origin,
        }

    @classmethod
    def from_json(cls, obj: dict, origin: str | None = None) -> EvidenceDoc:
        date = obj.get("date")
        if date is not None:
            if isinstance(date, int):
                date = (date, 1)
            else:
                date = (int(date[0]), int(date[1]) if len(date) > 1 else 1)
        return cls(
            doc_id=str(obj["doc_id"]),
            title=obj.get("title", ""),
            text=obj.get("text", ""),
            source_kind=obj.get("source_kind", "unknown"),
            date=date,
            origin=origin or obj.get("origin", "web"),
        )


class FixtureSearch:
    """Query string -> list of documents, read from a JSON object.

    A ``"*"`` entry, if present, answers queries that have no exact entry.
    """

    def __init__(self, results=None, keywords=DEFAULT_KEYWORDS):
        self.results = results or {}
        self.keywords = tuple(k.casefold() for k in keywords)

    @classmethod
    def load(cls, path, keywords=DEFAULT_KEYWORDS) -> FixtureSearch:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read search fixture {path}: {exc}") from exc
        return cls(data, keywords)

    def search(self, query: str) -> list[EvidenceDoc]:
        if not query:
            raise ValueError("query must be non-empty")
        raw = self.results.get(query, self.results.get("*", []))
        docs = [EvidenceDoc.from_json(d, origin="web") for d in raw]
        return [d for d in docs if self._on_topic(d)]

    def _on_topic(self, doc: EvidenceDoc) -> bool:
        hay = f"{doc.title} {doc.text}".casefold()
        return any(k in hay for k in self.keywords)


def web_search(query: str, backend) -> list[EvidenceDoc]:
    return backend.search(query)
