"""Loading, cleaning and chunking of the abstract corpus."""

from __future__ import annotations

import html
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterator, Mapping

from .errors import CorpusError, DuplicatePmidError

_TAG_RE = re.compile(r"<!--.*?-->|</?[A-Za-z][^<>]*>", re.DOTALL)
_URL_RE = re.compile(r"(?:https?|ftp)://\S+|www\.\S+", re.IGNORECASE)
_WS_RE = re.compile(r"\s+")
# sentence ends at ". ", "? " or "! " when the next sentence starts uppercase
_BOUNDARY_RE = re.compile(r"[.?!]\s+(?=[A-Z])")


def clean_text(raw: str) -> str:
    """Strip HTML tags/entities and URLs, collapse whitespace.

    Applied until a fixed point so that, e.g., entity-escaped markup
    (``&lt;b&gt;``) is removed too and the function is idempotent.
    """
    text = raw
    for _ in range(64):
        new = html.unescape(text)
        new = _TAG_RE.sub(" ", new)
        new = _URL_RE.sub(" ", new)
        new = _WS_RE.sub(" ", new).strip()
        if new == text:
            break
        text = new
    return text


@dataclass(frozen=True)
class AbstractRecord:
    pmid: str
    year: int
    title: str
    text: str
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if not self.pmid:
            raise ValueError("pmid must be non-empty")
        if self.year < 1900:
            raise ValueError(f"year {self.year} < 1900")
        object.__setattr__(self, "meta", MappingProxyType(dict(self.meta)))

    def __eq__(self, other):
        if not isinstance(other, AbstractRecord):
            return NotImplemented
        return (self.pmid, self.year, self.title, self.text, dict(self.meta)) == (
            other.pmid, other.year, other.title, other.text, dict(other.meta)
        )

    def __hash__(self):
        return hash((self.pmid, self.year, self.title, self.text))

    def to_json(self) -> dict:
        obj = {"pmid": self.pmid, "year": self.year, "title": self.title, "text": self.text}
        if self.meta:
            obj["meta"] = dict(self.meta)
        return obj


class Corpus:
    """Immutable, ordered collection of abstracts with unique PMIDs."""

    def __init__(self, records=()):
        self._records = tuple(records)
        self._by_pmid = {}
        for rec in self._records:
            if rec.pmid in self._by_pmid:
                raise DuplicatePmidError(rec.pmid)
            self._by_pmid[rec.pmid] = rec

    def __len__(self):
        return len(self._records)

    def __iter__(self) -> Iterator[AbstractRecord]:
        return iter(self._records)

    def __getitem__(self, pmid: str) -> AbstractRecord:
        return self._by_pmid[pmid]

    def __contains__(self, pmid):
        return pmid in self._by_pmid

    def __eq__(self, other):
        return isinstance(other, Corpus) and self._records == other._records

    @property
    def records(self) -> tuple[AbstractRecord, ...]:
        return self._records


def _parse_record(obj, lineno: int) -> AbstractRecord:
    if not isinstance(obj, dict):
        raise CorpusError("record is not an object", lineno)
    for key in ("pmid", "year", "title", "text"):
        if key not in obj or obj[key] is None:
            raise CorpusError(f"missing field {key!r}", lineno)
    pmid = str(obj["pmid"]).strip()
    if not pmid:
        raise CorpusError("empty pmid", lineno)
    year = obj["year"]
    if isinstance(year, bool) or not isinstance(year, int):
        raise CorpusError(f"year must be an integer, got {year!r}", lineno)
    if year < 1900:
        raise CorpusError(f"year {year} < 1900", lineno)
    text = clean_text(str(obj["text"]))
    if not text:
        raise CorpusError(f"pmid {pmid}: text is empty after cleaning", lineno)
    meta = obj.get("meta") or {}
    if not isinstance(meta, dict):
        raise CorpusError("meta must be an object", lineno)
    return AbstractRecord(pmid, year, clean_text(str(obj["title"])), text, meta)


def load_corpus(path) -> Corpus:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc}") from exc
    records = []
    seen = set()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"malformed record: {exc.msg}", lineno) from None
        rec = _parse_record(obj, lineno)
        if rec.pmid in seen:
            raise DuplicatePmidError(rec.pmid, lineno)
        seen.add(rec.pmid)
        records.append(rec)
    return Corpus(records)


def dump_corpus(corpus: Corpus) -> str:
    return "".join(
        json.dumps(rec.to_json(), ensure_ascii=False, sort_keys=True) + "\n" for rec in corpus
    )


def save_corpus(corpus: Corpus, path) -> None:
    Path(path).write_text(dump_corpus(corpus), encoding="utf-8")


# -- chunking -----------------------------------------------------------------


@dataclass(frozen=True)
class ChunkConfig:
    max_tokens: int = 128
    overlap_sentences: int = 1

    def __post_init__(self):
        if self.max_tokens < 16:
            raise ValueError("max_tokens must be >= 16")
        if self.overlap_sentences < 0:
            raise ValueError("overlap_sentences must be >= 0")


@dataclass(frozen=True)
class Chunk:
    pmid: str
    index: int
    text: str
    char_span: tuple[int, int]

    @property
    def chunk_id(self) -> str:
        return f"{self.pmid}#{self.index:04d}"


def sentence_spans(text: str) -> list[tuple[int, int]]:
    """Partition ``text`` into sentence spans; trailing whitespace stays with its sentence."""
    spans = []
    start = 0
    for m in _BOUNDARY_RE.finditer(text):
        spans.append((start, m.end()))
        start = m.end()
    if start < len(text):
        spans.append((start, len(text)))
    return spans


def _n_tokens(s: str) -> int:
    return len(s.split())


def _split_long(text: str, span: tuple[int, int], max_tokens: int) -> list[tuple[int, int]]:
    """Cut one over-long sentence into pieces of at most ``max_tokens`` words."""
    start, end = span
    words = [m.span() for m in re.finditer(r"\S+", text[start:end])]
    pieces = []
    for i in range(0, len(words), max_tokens):
        a = start + (words[i][0] if i else 0)
        j = min(i + max_tokens, len(words))
        b = start + words[j][0] if j < len(words) else end
        pieces.append((a, b))
    return pieces


def chunk(record: AbstractRecord, cfg: ChunkConfig = ChunkConfig()) -> list[Chunk]:
    text = record.text
    if not text:
        raise ValueError(f"pmid {record.pmid}: cannot chunk empty text")
    units = []
    for span in sentence_spans(text):
        if _n_tokens(text[span[0]:span[1]]) > cfg.max_tokens:
            units.extend(_split_long(text, span, cfg.max_tokens))
        else:
            units.append(span)
    sizes = [_n_tokens(text[a:b]) for a, b in units]

    groups = []
    i = 0
    while True:
        j = i
        total = 0
        while j < len(units) and total + sizes[j] <= cfg.max_tokens:
            total += sizes[j]
            j += 1
        groups.append((i, j))
        if j >= len(units):
            break
        # carry up to `overlap` trailing units, but always make progress and
        # leave room for the next unit
        nxt = max(j - cfg.overlap_sentences, i + 1)
        while nxt < j and sum(sizes[nxt:j]) + sizes[j] > cfg.max_tokens:
            nxt += 1
        i = nxt

    return [
        Chunk(record.pmid, n, text[units[a][0]:units[b - 1][1]], (units[a][0], units[b - 1][1]))
        for n, (a, b) in enumerate(groups)
    ]


def reassemble(chunks: list[Chunk]) -> str:
    """Inverse of chunking: stitch spans together, dropping overlaps."""
    out = []
    pos = 0
    for c in chunks:
        a, b = c.char_span
        if b <= pos:
            continue
        out.append(c.text[max(pos - a, 0):])
        pos = b
    return "".join(out)
