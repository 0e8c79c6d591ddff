"""Evidence-weighted resolution of contradictory relations."""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import asdict, dataclass, field
from enum import Enum

from .adapters.embedding import cosine, embed
from .adapters.index import retrieve_top_k
from .adapters.llm import llm_call
from .adapters.search import EvidenceDoc, web_search
from .errors import BackendError, ConfigError
from .schema import NodeKey, RelationType

DEFAULT_RELIABILITY = {
    "peer_reviewed": 0.9,
    "government": 0.8,
    "preprint": 0.6,
    "web": 0.4,
    "unknown": 0.5,
}
ASSERTIVE_CUES = ("demonstrates", "demonstrated", "strongly associated with", "confirms",
                  "confirmed", "clearly shows")
HEDGE_CUES = ("may", "might", "unclear", "possibly", "suggests", "could")
NEGATION_CUES = ("no link", "not associated", "does not cause", "did not cause", "no association",
                 "not linked", "no evidence")


class Stance(str, Enum):
    SUPPORTING = "supporting"
    OPPOSING = "opposing"
    NEUTRAL = "neutral"


class Outcome(str, Enum):
    ACCEPTED = "Accepted"
    NEGATED = "Negated"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class EvaluatorConfig:
    alpha: float = 0.7
    weights: tuple = (0.4, 0.2, 0.4)
    accept_threshold: float = 0.8
    half_life: float = 5.0
    now: tuple = (2025, 1)
    internal_k: int = 5
    missing_date_score: float = 0.5
    reliability: dict = field(default_factory=lambda: dict(DEFAULT_RELIABILITY))
    assertive_cues: tuple = ASSERTIVE_CUES
    hedge_cues: tuple = HEDGE_CUES
    negation_cues: tuple = NEGATION_CUES

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        if len(self.weights) != 3 or any(w < 0 for w in self.weights):
            raise ConfigError("weights must be three non-negative numbers")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ConfigError(f"weights must sum to 1, got {sum(self.weights)!r}")
        if self.half_life <= 0:
            raise ConfigError("half_life must be positive")
        if self.internal_k < 1:
            raise ConfigError("internal_k must be >= 1")
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "now", tuple(self.now))

    def digest(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True, default=list)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class Evidence:
    doc: EvidenceDoc
    r_s: float
    r_t: float
    r_c: float
    s: float
    stance: Stance

    def to_json(self) -> dict:
        return {"doc_id": self.doc.doc_id, "title": self.doc.title, "origin": self.doc.origin,
                "source_kind": self.doc.source_kind, "r_s": self.r_s, "r_t": self.r_t,
                "r_c": self.r_c, "s": self.s, "stance": self.stance.value}


@dataclass(frozen=True)
class ConflictCase:
    relation: tuple  # (src, positive RelationType, dst)
    existing_polarity: str
    incoming_polarity: str
    existing_provenance: tuple = ()
    incoming_provenance: tuple = ()

    def __post_init__(self):
        if self.existing_polarity == self.incoming_polarity:
            raise ValueError("a conflict needs opposite polarities")
        src, rel, dst = self.relation
        object.__setattr__(self, "relation", (src, rel.positive_form, dst))


@dataclass(frozen=True)
class Decision:
    relation: tuple
    tau: float | None
    outcome: Outcome
    justification: str
    evidence: tuple
    incoming_polarity: str | None = None
    provenance: tuple | None = None
    config_hash: str = ""

    def to_json(self) -> dict:
        src, rel, dst = self.relation
        return {
            "relation": [src.to_json(), rel.value, dst.to_json()],
            "tau": self.tau,
            "outcome": self.outcome.value,
            "justification": self.justification,
            "evidence_ids": [e.doc.doc_id for e in self.evidence],
            "evidence": [e.to_json() for e in self.evidence],
            "incoming_polarity": self.incoming_polarity,
            "config_hash": self.config_hash,
        }


def relation_query(src: NodeKey, rel: RelationType, dst: NodeKey) -> str:
    return f"Does {src.name} {rel.positive_form.verb} {dst.name}?"


# -- evidence -------------------------------------------------------------------


def gather_evidence(case: ConflictCase, index, search, k: int, embedder=None,
                    documents=None) -> list[EvidenceDoc]:
    """Internal top-k abstracts for q_r followed by web results, deduplicated by doc_id.

    ``documents`` maps index ids to EvidenceDoc; ids missing from it are skipped.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    q_r = relation_query(*case.relation)
    docs = []
    if index is not None and len(index) and embedder is not None:
        for doc_id, _ in retrieve_top_k(index, embed(q_r, embedder), k):
            if documents and doc_id in documents:
                docs.append(documents[doc_id])
    if search is not None:
        docs.extend(web_search(q_r, search))
    seen, out = set(), []
    for d in docs:
        if d.doc_id not in seen:
            seen.add(d.doc_id)
            out.append(d)
    return out


_NUMBER = re.compile(r"[-+]?\d*\.?\d+(?:[eE][-+]?\d+)?")


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def _llm_number(prompt, llm, role):
    m = _NUMBER.search(llm_call(prompt, llm, role=role).text)
    return None if m is None else _clamp01(float(m.group()))


def score_reliability(doc: EvidenceDoc, cfg: EvaluatorConfig, llm=None) -> float:
    if llm is not None:
        prompt = (f"Rate the credibility of this source from 0 to 1.\nTitle: {doc.title}\n"
                  f"Source type: {doc.source_kind}\nScore:")
        value = _llm_number(prompt, llm, "reliability")
        if value is not None:
            return value
    return cfg.reliability.get(doc.source_kind, cfg.reliability.get("unknown", 0.5))


def score_timeliness(doc: EvidenceDoc, now, cfg: EvaluatorConfig) -> float:
    if doc.date is None:
        return cfg.missing_date_score
    age = (now[0] - doc.date[0]) + (now[1] - doc.date[1]) / 12.0
    return math.exp(-max(age, 0.0) / cfg.half_life)


def count_cues(text: str, cues) -> int:
    low = text.casefold()
    return sum(len(re.findall(r"\b" + re.escape(c.casefold()) + r"\b", low)) for c in cues)


def certainty(text: str, cfg: EvaluatorConfig) -> float:
    n_assert = count_cues(text, cfg.assertive_cues)
    n_hedge = count_cues(text, cfg.hedge_cues)
    return _clamp01(0.5 + 0.1 * n_assert - 0.1 * n_hedge)


def score_relevance(q_r: str, doc: EvidenceDoc, cfg: EvaluatorConfig, embedder, llm=None) -> float:
    sim = (cosine(embed(q_r, embedder), embed(doc.text, embedder)) + 1.0) / 2.0
    cm = None
    if llm is not None:
        prompt = f"How certain is the language of this passage, from 0 to 1?\n{doc.text}\nScore:"
        cm = _llm_number(prompt, llm, "certainty")
    if cm is None:
        cm = certainty(doc.text, cfg)
    return _clamp01(cfg.alpha * _clamp01(sim) + (1.0 - cfg.alpha) * cm)


def composite(r_s: float, r_t: float, r_c: float, cfg: EvaluatorConfig) -> float:
    l1, l2, l3 = cfg.weights
    if abs(l1 + l2 + l3 - 1.0) > 1e-12:
        raise ConfigError("composite weights must sum to 1")
    return _clamp01(l1 * r_s + l2 * r_t + l3 * r_c)


def classify_stance(doc: EvidenceDoc, relation, llm=None, cfg: EvaluatorConfig | None = None) -> Stance:
    src, rel, dst = relation
    if llm is not None:
        prompt = (f"Claim: {relation_query(src, rel, dst)}\nPassage: {doc.text}\n"
                  "Answer with one word: supporting, opposing or neutral.")
        reply = llm_call(prompt, llm, role="stance").text.strip().casefold()
        for s in Stance:
            if reply.startswith(s.value):
                return s
        return Stance.NEUTRAL
    hay = f"{doc.title} {doc.text}".casefold()
    if src.name.casefold() not in hay or dst.name.casefold() not in hay:
        return Stance.NEUTRAL
    cues = (cfg or EvaluatorConfig()).negation_cues
    if any(c.casefold() in hay for c in cues):
        return Stance.OPPOSING
    return Stance.SUPPORTING


def confidence(evidence) -> float | None:
    """Net supporting mass over total mass; None when undefined."""
    sup = sum(e.s for e in evidence if e.stance is Stance.SUPPORTING)
    opp = sum(e.s for e in evidence if e.stance is Stance.OPPOSING)
    total = sum(e.s for e in evidence)
    if not evidence or total <= 0.0:
        return None
    return (sup - opp) / total


def outcome_for(tau: float | None, cfg: EvaluatorConfig) -> Outcome:
    if tau is None:
        return Outcome.UNRESOLVED
    return Outcome.ACCEPTED if tau >= cfg.accept_threshold else Outcome.NEGATED


def _justify(evidence, tau, outcome, cfg, notes) -> str:
    counts = {s: sum(1 for e in evidence if e.stance is s) for s in Stance}
    parts = [
        f"{counts[Stance.SUPPORTING]} supporting, {counts[Stance.OPPOSING]} opposing, "
        f"{counts[Stance.NEUTRAL]} neutral of {len(evidence)} evidence items"
    ]
    if tau is None:
        parts.append("confidence undefined; left for review")
    else:
        op = ">=" if outcome is Outcome.ACCEPTED else "<"
        parts.append(f"tau={tau:.4f} {op} {cfg.accept_threshold}")
    top = sorted(evidence, key=lambda e: (-e.s, e.doc.doc_id))[:3]
    if top:
        parts.append("top evidence: " + "; ".join(f"{e.doc.title} ({e.stance.value}, s={e.s:.3f})"
                                                   for e in top))
    parts.extend(notes)
    return ". ".join(parts) + "."


def decide_from_evidence(relation, evidence, cfg: EvaluatorConfig, incoming_polarity=None,
                         provenance=None, notes=()) -> Decision:
    """Pure: the same evidence snapshot and config always give the same Decision."""
    evidence = tuple(evidence)
    tau = confidence(evidence)
    outcome = outcome_for(tau, cfg)
    return Decision(relation, tau, outcome, _justify(evidence, tau, outcome, cfg, notes), evidence,
                    incoming_polarity, provenance, cfg.digest())


@dataclass
class ResolutionDeps:
    embedder: object
    cfg: EvaluatorConfig = field(default_factory=EvaluatorConfig)
    index: object = None
    documents: dict = None
    search: object = None
    llm: object = None


def score_evidence(doc, relation, deps: ResolutionDeps, notes: list) -> Evidence:
    cfg, q_r = deps.cfg, relation_query(*relation)
    llm = deps.llm
    try:
        r_s = score_reliability(doc, cfg, llm)
        r_c = score_relevance(q_r, doc, cfg, deps.embedder, llm)
        stance = classify_stance(doc, relation, llm, cfg)
    except BackendError as exc:
        note = f"scorer backend failed ({exc}); default scorers used"
        if note not in notes:
            notes.append(note)
        r_s = score_reliability(doc, cfg)
        r_c = score_relevance(q_r, doc, cfg, deps.embedder)
        stance = classify_stance(doc, relation, None, cfg)
    r_t = score_timeliness(doc, cfg.now, cfg)
    return Evidence(doc, r_s, r_t, r_c, composite(r_s, r_t, r_c, cfg), stance)


def resolve(case: ConflictCase, deps: ResolutionDeps) -> Decision:
    notes = []
    docs = gather_evidence(case, deps.index, deps.search, deps.cfg.internal_k, deps.embedder,
                           deps.documents)
    evidence = [score_evidence(d, case.relation, deps, notes) for d in docs]
    prov = case.incoming_provenance[0] if case.incoming_provenance else None
    return decide_from_evidence(case.relation, evidence, deps.cfg, case.incoming_polarity, prov,
                                notes)


def dumps_decisions(decisions) -> str:
    return "".join(json.dumps(d.to_json(), ensure_ascii=False, sort_keys=True) + "\n"
                   for d in decisions)
