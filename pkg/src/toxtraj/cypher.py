"""A single-edge existence subset of Cypher.

Grammar (keywords case-insensitive, whitespace free-form)::

    query   := MATCH node "-" "[" ":" REL "]" "-" ">" node RETURN count "(" "*" ")" ">" "0"
    node    := "(" [var] ":" LABEL "{" "name" ":" STRING "}" ")"
    STRING  := '"' ( [^"\\] | '\\"' | '\\\\' )* '"'

LABEL is a layer name (Source, Pollutant, Medium, ExposureRoute, Organ,
Disease) and REL an upper-cased relation type (EMITS, NOT_CAUSE, ...).
``emit_cypher`` produces the canonical text; ``parse_cypher`` accepts any
spacing of the same tokens.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CypherLexError, CypherMalformed, CypherUnknownLabel, CypherUnknownRelation
from .schema import LAYER_ORDER, Layer, RelationType


@dataclass(frozen=True)
class QueryAst:
    src_label: Layer
    src_name: str
    rel_type: RelationType
    dst_label: Layer
    dst_name: str
    return_form: str = "existence"


def quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_cypher(ast: QueryAst) -> str:
    return (
        f"MATCH (a:{ast.src_label.value} {{name: {quote(ast.src_name)}}})"
        f"-[:{ast.rel_type.cypher_type}]->"
        f"(b:{ast.dst_label.value} {{name: {quote(ast.dst_name)}}}) RETURN count(*) > 0"
    )


@dataclass(frozen=True)
class Token:
    kind: str  # ident, string, number, punct, end
    value: str
    pos: int


_PUNCT = set("(){}[]:-><*,")


def tokenize(text: str) -> list[Token]:
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in _PUNCT:
            toks.append(Token("punct", ch, i))
            i += 1
        elif ch == '"':
            start = i
            i += 1
            buf = []
            while True:
                if i >= n:
                    raise CypherLexError("unterminated string literal", start)
                c = text[i]
                if c == "\\":
                    if i + 1 >= n or text[i + 1] not in '"\\':
                        raise CypherLexError("invalid escape in string literal", i)
                    buf.append(text[i + 1])
                    i += 2
                elif c == '"':
                    i += 1
                    break
                else:
                    buf.append(c)
                    i += 1
            toks.append(Token("string", "".join(buf), start))
        elif ch.isalpha() or ch == "_":
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            toks.append(Token("ident", text[start:i], start))
        elif ch.isdigit():
            start = i
            while i < n and text[i].isdigit():
                i += 1
            toks.append(Token("number", text[start:i], start))
        else:
            raise CypherLexError(f"unexpected character {ch!r}", i)
    toks.append(Token("end", "", n))
    return toks


_LABELS = {layer.value: layer for layer in LAYER_ORDER}
_RELS = {r.cypher_type: r for r in RelationType}


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind, value=None, ci=False) -> Token:
        tok = self.next()
        ok = tok.kind == kind and (
            value is None or (tok.value.upper() == value.upper() if ci else tok.value == value)
        )
        if not ok:
            want = value if value is not None else kind
            got = tok.value or tok.kind
            raise CypherMalformed(f"expected {want!r}, found {got!r}", tok.pos)
        return tok

    def node(self):
        self.expect("punct", "(")
        if self.peek().kind == "ident":
            self.next()
        self.expect("punct", ":")
        label_tok = self.expect("ident")
        if label_tok.value not in _LABELS:
            raise CypherUnknownLabel(f"unknown label {label_tok.value!r}", label_tok.pos)
        self.expect("punct", "{")
        self.expect("ident", "name")
        self.expect("punct", ":")
        name = self.expect("string").value
        self.expect("punct", "}")
        self.expect("punct", ")")
        return _LABELS[label_tok.value], name

    def query(self) -> QueryAst:
        self.expect("ident", "MATCH", ci=True)
        src_label, src_name = self.node()
        self.expect("punct", "-")
        self.expect("punct", "[")
        self.expect("punct", ":")
        rel_tok = self.expect("ident")
        if rel_tok.value not in _RELS:
            raise CypherUnknownRelation(f"unknown relationship type {rel_tok.value!r}", rel_tok.pos)
        self.expect("punct", "]")
        self.expect("punct", "-")
        self.expect("punct", ">")
        dst_label, dst_name = self.node()
        self.expect("ident", "RETURN", ci=True)
        self.expect("ident", "count", ci=True)
        self.expect("punct", "(")
        self.expect("punct", "*")
        self.expect("punct", ")")
        self.expect("punct", ">")
        self.expect("number", "0")
        self.expect("end")
        return QueryAst(src_label, src_name, _RELS[rel_tok.value], dst_label, dst_name)


def parse_cypher(text: str) -> QueryAst:
    return _Parser(text).query()
