import re

_WORD_RE = re.compile(r"\w+(?:['’\-]\w+)*")


def word_spans(text: str) -> list[tuple[int, int]]:
    return [m.span() for m in _WORD_RE.finditer(text)]


def word_tokens(text: str) -> list[str]:
    """Lower-cased word tokens; punctuation dropped, inner hyphens/apostrophes kept."""
    return [m.group(0).casefold() for m in _WORD_RE.finditer(text)]
