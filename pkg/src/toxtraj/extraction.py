"""Metapath generation: query battery -> answers -> typed triples -> layered graph -> paths."""

from __future__ import annotations

import hashlib
import logging
from collections import deque
from dataclasses import dataclass, field

from .adapters.index import VectorIndex, retrieve_top_k
from .adapters.llm import llm_call
from .adapters.terms import ner
from .errors import BackendError, PolicyLogprobUnavailable, QueryError
from .ranker import FallbackSignal, RankerConfig, build_rank_graph, rank_and_filter
from .refiner import RefineEpisode, missing_entities, refine, reward, episode_rng
from .schema import (
    LAYER_ORDER,
    Entity,
    Layer,
    Metapath,
    NodeKey,
    RelationType,
    Triple,
    placeholder,
    relation_from_name,
)

log = logging.getLogger(__name__)

QUERIES = {
    "Q1": "What pollutants or contaminants are mentioned in the abstract, and what are their respective sources?",
    "Q2": "Which environmental media (e.g., air, water, soil) are contaminated by these pollutants?",
    "Q3": "Through which exposure routes (e.g., inhalation, ingestion, dermal contact) do these pollutants reach or expose humans?",
    "Q4": "Which human organs or biological systems are affected by exposure to these pollutants?",
    "Q5": "What diseases, health effects, or physiological abnormalities are caused in these organs?",
    "Q6": "Are specific demographic groups (age group, gender) more affected by these pollutants or health outcomes? If so, specify the group.",
    "Q7": "Is there any indication that a specific source does not emit a particular pollutant? If so, specify the source and pollutant.",
    "Q8": "Is there any indication that a particular pollutant does not affect a specific organ? If so, specify the pollutant and organ.",
    "Q9": "Is there any indication that a particular pollutant is not linked to a specific disease or health effect? If so, specify the pollutant and disease.",
}
NEGATION_QUERIES = ("Q7", "Q8", "Q9")

NO_CONTEXT = "no relevant context"


# -- normalisation and parsing ------------------------------------------------


def normalize(entity: Entity, table) -> Entity:
    """Map a surface form onto its canonical name; unknown forms keep their surface."""
    hit = table.lookup(entity.surface) if table is not None else None
    if hit is None:
        return Entity(entity.surface, entity.surface, entity.etype, normalized=False)
    canonical, etype = hit
    return Entity(entity.surface, canonical, etype, normalized=True)


@dataclass
class Rejected:
    line: str
    reason: str


def _split_line(line: str):
    s = line.strip()
    start, end = s.find("("), s.rfind(")")
    if start < 0 or end <= start:
        return None
    parts = [p.strip() for p in s[start + 1:end].split("|")]
    if len(parts) not in (3, 4) or not all(parts[:3]):
        return None
    demographic = None
    if len(parts) == 4:
        key, sep, value = parts[3].partition("=")
        if key.strip().lower() != "demographic" or not sep or not value.strip():
            return None
        demographic = value.strip()
    return parts[0], parts[1], parts[2], demographic


def _compatible(ent: Entity, layer: Layer) -> bool:
    return ent.etype in ("Other", layer.value)


def parse_triples(answer: str, pmid: str, year: int, table=None, rejects=None) -> list[Triple]:
    """Parse ``(subject | relation | object[ | demographic=g])`` lines.

    Lines that do not match the grammar, name an unknown relation, or whose
    entities contradict the relation's layer signature are skipped; they are
    logged and, if ``rejects`` is given, appended to it.
    """
    triples = []

    def reject(line, reason):
        log.warning("pmid %s: skipped %r (%s)", pmid, line, reason)
        if rejects is not None:
            rejects.append(Rejected(line, reason))

    for line in answer.splitlines():
        if not line.strip():
            continue
        parts = _split_line(line)
        if parts is None:
            if "|" in line or "(" in line:
                reject(line, "grammar")
            continue
        subj, rel_name, obj, demographic = parts
        try:
            rel = relation_from_name(rel_name)
        except ValueError:
            reject(line, f"unknown relation {rel_name!r}")
            continue
        s_ent, o_ent = normalize(Entity(subj), table), normalize(Entity(obj), table)
        for s_layer, o_layer in rel.signatures:
            if _compatible(s_ent, s_layer) and _compatible(o_ent, o_layer):
                triples.append(Triple(NodeKey(s_layer, s_ent.name), rel, NodeKey(o_layer, o_ent.name),
                                      pmid, year, demographic))
                break
        else:
            reject(line, f"layer typing: {s_ent.etype} -{rel.value}-> {o_ent.etype}")
    return triples


# -- layered graph ------------------------------------------------------------


@dataclass
class LayerGraph:
    pmid: str = ""
    year: int = 0
    nodes: dict = field(default_factory=lambda: {layer: set() for layer in LAYER_ORDER})
    succ: dict = field(default_factory=dict)  # NodeKey -> set of NodeKey, adjacent layers only
    negations: list = field(default_factory=list)
    shortcuts: list = field(default_factory=list)
    demographics: dict = field(default_factory=dict)

    def add_node(self, node: NodeKey):
        self.nodes[node.layer].add(node.name)
        self.succ.setdefault(node, set())

    def add_edge(self, src: NodeKey, dst: NodeKey):
        if dst.layer.position != src.layer.position + 1:
            raise ValueError(f"edge {src} -> {dst} skips a layer")
        self.add_node(src)
        self.add_node(dst)
        self.succ[src].add(dst)

    @property
    def edge_count(self) -> int:
        return sum(len(v) for v in self.succ.values())

    @property
    def node_count(self) -> int:
        return sum(len(v) for v in self.nodes.values())

    def reachable(self, start: NodeKey) -> set:
        seen = {start}
        stack = [start]
        while stack:
            for nxt in self.succ.get(stack.pop(), ()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    def orphans(self) -> set:
        covered = set()
        for name in self.nodes[Layer.SOURCE]:
            covered |= self.reachable(NodeKey(Layer.SOURCE, name))
        return {n for n in self.succ if n not in covered}


def _bridge(lg: LayerGraph, pollutant: NodeKey, target: NodeKey):
    """Connect a pollutant to a later-layer node through its 'unknown' placeholders."""
    prev = pollutant
    for layer in LAYER_ORDER[pollutant.layer.position + 1:target.layer.position]:
        node = placeholder(layer, pollutant.name)
        lg.add_edge(prev, node)
        prev = node
    lg.add_edge(prev, target)


def assemble_layer_graph(triples, pmid=None, year=None) -> LayerGraph:
    triples = list(triples)
    lg = LayerGraph(pmid or (triples[0].pmid if triples else ""),
                    year or (triples[0].year if triples else 0))
    chain, shortcuts = [], []
    for t in triples:
        if not t.relation.positive:
            if t not in lg.negations:
                lg.negations.append(t)
        elif t.object.layer.position == t.subject.layer.position + 1:
            chain.append(t)
        else:
            shortcuts.append(t)
        if t.demographic and t.object.layer is Layer.DISEASE:
            lg.demographics.setdefault(t.object, set()).add(t.demographic)
    for t in chain:
        lg.add_edge(t.subject, t.object)
    shortcuts.sort(key=lambda t: (t.object.layer.position, t.subject.name, t.object.name))
    for t in shortcuts:
        if t not in lg.shortcuts:
            lg.shortcuts.append(t)
        lg.add_node(t.subject)
        if t.object not in lg.reachable(t.subject):
            _bridge(lg, t.subject, t.object)
    return lg


def enumerate_metapaths(lg: LayerGraph) -> list[Metapath]:
    """All Source -> ... -> Disease paths, found breadth-first from each source."""
    queue = deque((NodeKey(Layer.SOURCE, name),) for name in sorted(lg.nodes[Layer.SOURCE]))
    found = []
    while queue:
        path = queue.popleft()
        if len(path) == len(LAYER_ORDER):
            found.append(path)
            continue
        for nxt in sorted(lg.succ.get(path[-1], ()), key=lambda n: n.name):
            queue.append(path + (nxt,))
    found.sort(key=lambda p: tuple(n.name for n in p))
    return [
        Metapath(path, lg.pmid, lg.year, tuple(sorted(lg.demographics.get(path[-1], ()))))
        for path in found
    ]


# -- running the query battery ------------------------------------------------


@dataclass
class QueryDeps:
    embedder: object
    llm: object
    table: object = None
    kg: object = None
    params: object = None
    ranker_cfg: RankerConfig = field(default_factory=RankerConfig)
    policy: object = None
    top_k: int = 8
    max_refine_rounds: int = 1
    seed: int = 0


@dataclass
class QueryTrace:
    qid: str
    answer: str
    contexts: list
    refined: list = field(default_factory=list)
    episodes: list = field(default_factory=list)

    @property
    def answer_hash(self) -> str:
        return hashlib.sha256(self.answer.encode("utf-8")).hexdigest()[:16]


def answer_prompt(pmid: str, qid: str, query: str, contexts) -> str:
    ctx = "\n".join(f"[{i + 1}] {c.text.strip()}" for i, c in enumerate(contexts))
    return (
        "Extract relational triples from the scientific abstract contexts below.\n"
        f"PMID: {pmid}\n"
        f"Question {qid}: {query}\n"
        f"Contexts:\n{ctx}\n"
        'Answer with one "(subject | relation | object)" per line. Relations: '
        + ", ".join(r.value for r in RelationType)
        + '. Append "| demographic=<group>" when a population group is stated.'
    )


def _retrieve(index: VectorIndex, chunks_by_id, query, deps):
    hits = retrieve_top_k(index, deps.embedder.embed(query), deps.top_k)
    return [chunks_by_id[cid] for cid, _ in hits]


def run_query(record, qid, index, chunks_by_id, deps: QueryDeps) -> QueryTrace:
    query = QUERIES[qid]
    contexts = _retrieve(index, chunks_by_id, query, deps)
    trace = QueryTrace(qid, NO_CONTEXT, [])
    if not contexts:
        return trace
    res = rank_and_filter(build_rank_graph(query, contexts, deps.embedder, deps.table, deps.ranker_cfg),
                          deps.params, deps.ranker_cfg)
    current_q, current_ctx = query, contexts
    rounds = 0
    while isinstance(res, FallbackSignal) and rounds < deps.max_refine_rounds and deps.policy is not None:
        rounds += 1
        sets = missing_entities(current_q, current_ctx, deps.kg, deps.table)
        if not sets.eps_miss:
            break
        rng = episode_rng(deps.seed, record.pmid, qid, rounds)
        template_id = None
        try:
            refined, logprob, template_id = refine(deps.policy, current_q, current_ctx,
                                                   sets.eps_miss, deps.llm, rng)
        except PolicyLogprobUnavailable as exc:
            refined, logprob = exc.refined_query, None
        new_ctx = _retrieve(index, chunks_by_id, refined, deps)
        recovered = set()
        for c in new_ctx:
            recovered |= {e.key for e in ner(c.text, deps.table)} if deps.table else set()
        r = reward(sets.eps_miss, recovered)
        if logprob is not None:
            trace.episodes.append(RefineEpisode(
                state=f"{record.pmid}\x1f{qid}\x1f{current_q}\x1f{','.join(sorted(sets.eps_miss))}",
                action=refined, logprob=logprob, reward=r, template_id=template_id,
            ))
        trace.refined.append(refined)
        current_q, current_ctx = refined, new_ctx
        res = rank_and_filter(build_rank_graph(refined, new_ctx, deps.embedder, deps.table, deps.ranker_cfg),
                              deps.params, deps.ranker_cfg)
    if isinstance(res, FallbackSignal):
        return trace
    trace.contexts = [current_ctx[j] for j, _ in res.ranked]
    prompt = answer_prompt(record.pmid, qid, query, trace.contexts)
    try:
        trace.answer = llm_call(prompt, deps.llm, role="answer").text
    except BackendError as exc:
        raise QueryError(record.pmid, qid, exc) from exc
    return trace


def run_queries(record, index, chunks_by_id, deps: QueryDeps) -> dict[str, QueryTrace]:
    return {qid: run_query(record, qid, index, chunks_by_id, deps) for qid in QUERIES}
