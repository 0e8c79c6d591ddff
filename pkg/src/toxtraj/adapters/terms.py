"""Offline terminology table and gazetteer NER."""

from __future__ import annotations

from pathlib import Path

from ..errors import ConfigError
from ..schema import ENTITY_TYPES, Entity
from ..text import word_spans, word_tokens


class TermTable:
    """Case-folded surface form -> (canonical name, entity type).

    Canonical names are always added as their own surface forms so that
    normalising an already-canonical name is a no-op.
    """

    def __init__(self, rows=()):
        self.rows: dict[str, tuple[str, str]] = {}
        self._phrases: dict[tuple[str, ...], str] = {}
        pending = []
        for surface, canonical, etype in rows:
            if etype not in ENTITY_TYPES:
                raise ValueError(f"unknown entity type {etype!r} for {surface!r}")
            pending.append((surface, canonical, etype))
        for surface, canonical, etype in pending:
            self.rows.setdefault(canonical.casefold(), (canonical, etype))
        for surface, canonical, etype in pending:
            key = surface.casefold()
            if key in self.rows and self.rows[key][0] != canonical:
                raise ValueError(f"surface {surface!r} maps to two canonical names")
            self.rows[key] = (canonical, etype)
        for key in self.rows:
            toks = tuple(word_tokens(key))
            if toks:
                self._phrases.setdefault(toks, key)
        self.max_words = max((len(t) for t in self._phrases), default=0)

    def __len__(self):
        return len(self.rows)

    def lookup(self, surface: str) -> tuple[str, str] | None:
        hit = self.rows.get(surface.strip().casefold())
        if hit is None:
            toks = tuple(word_tokens(surface))
            key = self._phrases.get(toks)
            hit = self.rows.get(key) if key else None
        return hit

    @classmethod
    def load(cls, path) -> TermTable:
        rows = []
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read term table {path}: {exc}") from exc
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ConfigError(f"{path}:{lineno}: expected surface<TAB>canonical<TAB>etype")
            rows.append(tuple(p.strip() for p in parts))
        try:
            return cls(rows)
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from exc


def ner(text: str, table: TermTable) -> list[Entity]:
    """Left-to-right, longest-match, non-overlapping gazetteer scan."""
    spans = word_spans(text)
    toks = [text[a:b].casefold() for a, b in spans]
    found = []
    i = 0
    while i < len(toks):
        for n in range(min(table.max_words, len(toks) - i), 0, -1):
            key = table._phrases.get(tuple(toks[i:i + n]))
            if key is not None:
                canonical, etype = table.rows[key]
                surface = text[spans[i][0]:spans[i + n - 1][1]]
                found.append(Entity(surface, canonical, etype, normalized=True))
                i += n
                break
        else:
            i += 1
    return found
