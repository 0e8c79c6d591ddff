"""Check new metapaths and relations against the graph store, edge by edge."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .cypher import QueryAst, emit_cypher, parse_cypher
from .schema import Metapath, NodeKey, RelationType
from .ttg import EdgeState, TtgGraph


class Verdict(str, Enum):
    CONFIRMED = "Confirmed"
    NOVEL = "Novel"
    CONFLICT = "Conflict"


_TEMPLATES = {
    RelationType.EMITS: "Does {s} emits {o}?",
    RelationType.CONTAMINATES: "Does {s} contaminates {o}?",
    RelationType.CONSUMED_THROUGH: "Is {s} consumed through {o}?",
    RelationType.AFFECTS: "Does {s} affects {o}?",
    RelationType.CAUSES: "Does {s} causes {o}?",
    RelationType.NOT_EMIT: "Does {s} not emit {o}?",
    RelationType.NOT_AFFECT: "Does {s} not affect {o}?",
    RelationType.NOT_CAUSE: "Does {s} not cause {o}?",
}


def question(src: NodeKey, rel: RelationType, dst: NodeKey) -> str:
    return _TEMPLATES[rel].format(s=src.name, o=dst.name)


@dataclass(frozen=True)
class VerificationQuery:
    question: str
    pattern: tuple  # (src NodeKey, RelationType, dst NodeKey)

    @property
    def ast(self) -> QueryAst:
        src, rel, dst = self.pattern
        return QueryAst(src.layer, src.name, rel, dst.layer, dst.name)


def verbalize_edge(src, rel, dst) -> VerificationQuery:
    return VerificationQuery(question(src, rel, dst), (src, rel, dst))


def verbalize(m: Metapath) -> list[VerificationQuery]:
    return [verbalize_edge(*edge) for edge in m.edges]


def evaluate(ast: QueryAst, graph: TtgGraph) -> Verdict:
    src = NodeKey(ast.src_label, ast.src_name)
    dst = NodeKey(ast.dst_label, ast.dst_name)
    state = graph.edge_exists(src, ast.rel_type, dst)
    if state is EdgeState.ABSENT:
        return Verdict.NOVEL
    if (state is EdgeState.ACTIVE_POSITIVE) == ast.rel_type.positive:
        return Verdict.CONFIRMED
    return Verdict.CONFLICT


@dataclass(frozen=True)
class EdgeCheck:
    query: VerificationQuery
    cypher: str
    verdict: Verdict


@dataclass(frozen=True)
class ConsistencyReport:
    checks: tuple

    @property
    def verdicts(self) -> list[Verdict]:
        return [c.verdict for c in self.checks]

    @property
    def conflicts(self) -> list[EdgeCheck]:
        return [c for c in self.checks if c.verdict is Verdict.CONFLICT]

    @property
    def overall(self) -> str:
        return "NeedsResolution" if self.conflicts else "Consistent"

    def log_records(self, pmid: str, item: int) -> list[dict]:
        return [
            {"pmid": pmid, "item": item, "edge": i, "verdict": c.verdict.value, "cypher": c.cypher}
            for i, c in enumerate(self.checks)
        ]


def _check(queries, graph) -> ConsistencyReport:
    checks = []
    for vq in queries:
        text = emit_cypher(vq.ast)
        checks.append(EdgeCheck(vq, text, evaluate(parse_cypher(text), graph)))
    return ConsistencyReport(tuple(checks))


def check_metapath(m: Metapath, graph: TtgGraph) -> ConsistencyReport:
    """Verbalise each edge, compile it to Cypher, and run it against the store."""
    return _check(verbalize(m), graph)


def check_relation(src, rel, dst, graph: TtgGraph) -> ConsistencyReport:
    return _check([verbalize_edge(src, rel, dst)], graph)


def render(report: ConsistencyReport) -> str:
    lines = [f"{c.verdict.value:9s} {c.query.question}" for c in report.checks]
    lines.append(f"overall: {report.overall}")
    return "\n".join(lines)


def dumps_log(records) -> str:
    return "".join(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n" for r in records)
