"""Stage implementations behind the CLI verbs.

Artifacts under ``work_dir``::

    chunks.jsonl  index.jsonl                       ingest
    ranker_params.txt  ranker_metrics.jsonl         extract
    metapaths.jsonl  extraction_report.jsonl
    episodes.jsonl  policy.json
    graph.jsonl  consistency_log.jsonl              check
    decision_log.jsonl
    exports/...                                     export
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import ttg
from .adapters import (
    EvidenceDoc,
    FixtureKG,
    FixtureSearch,
    MockEmbedder,
    MockLLM,
    RemoteEmbedder,
    RemoteLLM,
    TermTable,
    VectorIndex,
    retrieve_top_k,
)
from .config import PipelineConfig
from .consistency import Verdict, check_metapath, check_relation
from .corpus import Chunk, load_corpus
from .corpus import chunk as chunk_record
from .errors import DataError
from .extraction import (
    NO_CONTEXT,
    QUERIES,
    QueryDeps,
    assemble_layer_graph,
    enumerate_metapaths,
    parse_triples,
    run_queries,
)
from .ranker import GatParams, build_rank_graph, select_pseudo_positive, train
from .refiner import DEFAULT_TEMPLATES, ToyPolicy, dump_episodes, load_templates, policy_update
from .resolution import ConflictCase, ResolutionDeps, dumps_decisions, resolve
from .schema import Layer, Metapath, triple_from_json, triple_to_json

log = logging.getLogger(__name__)

EXPORTS = ("summary", "cooccurrence", "emerging", "graphml", "cypher")


def _jsonl(objs) -> str:
    return "".join(json.dumps(o, ensure_ascii=False, sort_keys=True) + "\n" for o in objs)


def _read_jsonl(path) -> list[dict]:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"missing artifact {path}; run the earlier stage first")
    try:
        return [json.loads(ln) for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None


@dataclass
class Backends:
    embedder: object
    llm: object
    table: TermTable | None
    kg: FixtureKG | None
    search: FixtureSearch | None
    templates: list


def make_backends(cfg: PipelineConfig, llm=None) -> Backends:
    if cfg.embed_backend == "mock":
        embedder = MockEmbedder(cfg.embed_dim)
    else:
        embedder = RemoteEmbedder(cfg.embed_base_url, cfg.embed_model, cfg.api_key_env)
    if llm is None:
        if cfg.llm_backend == "mock":
            llm = MockLLM(cfg.llm_fixtures)
        else:
            llm = RemoteLLM(cfg.llm_base_url, cfg.llm_model, cfg.api_key_env)
    return Backends(
        embedder=embedder,
        llm=llm,
        table=TermTable.load(cfg.terms) if cfg.terms else None,
        kg=FixtureKG.load(cfg.kg) if cfg.kg else None,
        search=FixtureSearch.load(cfg.search) if cfg.search else None,
        templates=load_templates(cfg.templates) if cfg.templates else list(DEFAULT_TEMPLATES),
    )


# -- ingest ---------------------------------------------------------------------


def cmd_ingest(cfg: PipelineConfig, backends: Backends | None = None) -> dict:
    cfg.validate()
    corpus = load_corpus(cfg.corpus)
    if len(corpus) == 0:
        raise DataError("empty corpus")
    embedder = (backends or make_backends(cfg)).embedder
    chunks, vectors = [], []
    for rec in corpus:
        for c in chunk_record(rec, cfg.chunking):
            chunks.append({"id": c.chunk_id, "pmid": c.pmid, "index": c.index, "text": c.text,
                           "span": list(c.char_span)})
            vectors.append({"id": c.chunk_id, "vector": [float(x) for x in embedder.embed(c.text)]})
    cfg.work_dir.mkdir(parents=True, exist_ok=True)
    ttg.atomic_write(cfg.work_dir / "chunks.jsonl", _jsonl(chunks))
    ttg.atomic_write(cfg.work_dir / "index.jsonl", _jsonl(vectors))
    return {"abstracts": len(corpus), "chunks": len(chunks)}


def load_chunks(work_dir) -> tuple[dict, dict]:
    """Returns ({pmid: [Chunk]}, {chunk_id: vector})."""
    by_pmid = {}
    for obj in _read_jsonl(Path(work_dir) / "chunks.jsonl"):
        c = Chunk(obj["pmid"], obj["index"], obj["text"], tuple(obj["span"]))
        by_pmid.setdefault(c.pmid, []).append(c)
    vectors = {obj["id"]: np.array(obj["vector"]) for obj in _read_jsonl(Path(work_dir) / "index.jsonl")}
    return by_pmid, vectors


# -- extract --------------------------------------------------------------------


def _abstract_index(chunks, vectors):
    return VectorIndex([(c.chunk_id, vectors[c.chunk_id]) for c in chunks])


def training_batch(corpus, by_pmid, vectors, backends: Backends, cfg: PipelineConfig):
    """One (rank graph, pseudo-positive) pair per (abstract, query) with >= 2 contexts."""
    batch = []
    for rec in corpus:
        chunks = by_pmid.get(rec.pmid, [])
        if len(chunks) < 2:
            continue
        index = _abstract_index(chunks, vectors)
        by_id = {c.chunk_id: c for c in chunks}
        for query in QUERIES.values():
            hits = retrieve_top_k(index, backends.embedder.embed(query), cfg.top_k)
            contexts = [by_id[cid] for cid, _ in hits]
            graph = build_rank_graph(query, contexts, backends.embedder, backends.table, cfg.ranker)
            batch.append((graph, select_pseudo_positive(query, contexts, backends.embedder)))
    return batch


def _extract_one(rec, chunks, vectors, deps: QueryDeps):
    report = {"pmid": rec.pmid, "chunks": len(chunks)}
    if not chunks:
        report.update(triples=0, metapaths=0, relations=0, note="no chunks")
        return [], [], [], report
    index = _abstract_index(chunks, vectors)
    traces = run_queries(rec, index, {c.chunk_id: c for c in chunks}, deps)
    rejects, triples = [], []
    for qid, trace in traces.items():
        if trace.answer != NO_CONTEXT:
            triples.extend(parse_triples(trace.answer, rec.pmid, rec.year, deps.table, rejects))
    lg = assemble_layer_graph(triples, rec.pmid, rec.year)
    metapaths = enumerate_metapaths(lg)
    relations = sorted(lg.shortcuts + lg.negations,
                       key=lambda t: (t.subject.sort_key(), t.relation.value, t.object.sort_key()))
    episodes = [ep for qid in QUERIES for ep in traces[qid].episodes]
    report.update(
        triples=len(triples),
        rejected=len(rejects),
        metapaths=len(metapaths),
        relations=len(relations),
        orphan_nodes=len(lg.orphans()),
        no_context=[qid for qid, t in traces.items() if t.answer == NO_CONTEXT],
        refinements=sum(len(t.refined) for t in traces.values()),
    )
    if not triples:
        report["note"] = "no triples extracted"
    return metapaths, relations, episodes, report


def cmd_extract(cfg: PipelineConfig, backends: Backends | None = None) -> dict:
    cfg.validate()
    backends = backends or make_backends(cfg)
    corpus = load_corpus(cfg.corpus)
    by_pmid, vectors = load_chunks(cfg.work_dir)

    batch = training_batch(corpus, by_pmid, vectors, backends, cfg)
    in_dim = batch[0][0].features.shape[1] if batch else len(backends.embedder.embed("x")) + 2
    params = GatParams.init(in_dim, cfg.ranker.hidden1, cfg.ranker.hidden2,
                            rng=np.random.default_rng(cfg.seed), leaky_slope=cfg.ranker.leaky_slope)
    metrics_tmp = cfg.work_dir / ".ranker_metrics.tmp"
    params, history = train(params, batch, cfg.ranker, metrics_path=metrics_tmp)
    metrics_tmp.replace(cfg.work_dir / "ranker_metrics.jsonl")

    policy = ToyPolicy(list(backends.templates), learning_rate=cfg.policy_lr)
    deps = QueryDeps(
        embedder=backends.embedder, llm=backends.llm, table=backends.table, kg=backends.kg,
        params=params, ranker_cfg=cfg.ranker, policy=policy, top_k=cfg.top_k,
        max_refine_rounds=cfg.max_refine_rounds, seed=cfg.seed,
    )
    # the policy is frozen during extraction; its updates are applied below in corpus order
    records = list(corpus)
    work = [(rec, by_pmid.get(rec.pmid, [])) for rec in records]
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(lambda rc: _extract_one(rc[0], rc[1], vectors, deps), work))
    else:
        results = [_extract_one(rec, chunks, vectors, deps) for rec, chunks in work]

    items, reports, episodes = [], [], []
    for metapaths, relations, eps, report in results:
        items.extend(m.to_json() for m in metapaths)
        items.extend(triple_to_json(t) for t in relations)
        episodes.extend(eps)
        reports.append(report)
    for ep in episodes:
        policy = policy_update(policy, ep)

    out = cfg.work_dir
    ttg.atomic_write(out / "metapaths.jsonl", _jsonl(items))
    ttg.atomic_write(out / "extraction_report.jsonl", _jsonl(reports))
    tmp = out / ".episodes.tmp"
    dump_episodes(episodes, tmp)
    tmp.replace(out / "episodes.jsonl")
    ttg.atomic_write(out / "policy.json", json.dumps(policy.to_json(), sort_keys=True) + "\n")
    tmp = out / ".ranker_params.tmp"
    params.save(tmp)
    tmp.replace(out / "ranker_params.txt")
    return {
        "metapaths": sum(1 for i in items if i["kind"] == "metapath"),
        "relations": sum(1 for i in items if i["kind"] == "relation"),
        "episodes": len(episodes),
        "final_loss": history[-1][1] if history else None,
    }


# -- check ------------------------------------------------------------------------


def evidence_corpus(corpus, embedder):
    """Whole-abstract index and documents used as internal evidence."""
    docs, entries = {}, []
    for rec in corpus:
        doc_id = f"pmid:{rec.pmid}"
        docs[doc_id] = EvidenceDoc(doc_id, rec.title or f"PMID {rec.pmid}", rec.text,
                                   "peer_reviewed", (rec.year, 1), "internal")
        entries.append((doc_id, embedder.embed(rec.text)))
    return VectorIndex(entries), docs


def _item_key(obj) -> str:
    if obj["kind"] == "metapath":
        return "metapath|" + obj["pmid"] + "|" + "|".join(n[1] for n in obj["nodes"])
    return "relation|" + "|".join([obj["pmid"], obj["src"][1], obj["rel"], obj["dst"][1]])


def check_items(graph: ttg.TtgGraph, items, rdeps: ResolutionDeps):
    """Check, resolve and integrate extracted items in order.

    Returns (consistency records, decisions). Items already ingested are skipped.
    """
    consistency, decisions = [], []
    for n, obj in enumerate(items):
        key = _item_key(obj)
        if key in graph.ingested:
            continue
        if obj["kind"] == "metapath":
            m = Metapath.from_json(obj)
            report = check_metapath(m, graph)
            prov = (m.pmid, m.year)
        else:
            t = triple_from_json(obj)
            report = check_relation(t.subject, t.relation, t.object, graph)
            prov = (t.pmid, t.year)
        consistency.extend(report.log_records(obj["pmid"], n))
        integrate = True
        for c in report.conflicts:
            src, rel, dst = c.query.pattern
            existing = graph.active_record(src, rel, dst)
            case = ConflictCase(
                relation=(src, rel, dst),
                existing_polarity=existing.polarity,
                incoming_polarity="positive" if rel.positive else "negative",
                existing_provenance=tuple(existing.provenance),
                incoming_provenance=(prov,),
            )
            decision = resolve(case, rdeps)
            graph.apply_decision(decision)
            decisions.append(decision)
            now = graph.active_record(src, rel, dst)
            if now is None or now.rel is not rel:
                integrate = False
        if integrate:
            if obj["kind"] == "metapath":
                graph.upsert_metapath(m)
            else:
                graph.add_relation(t.subject, t.relation, t.object, prov)
                if t.demographic and t.object.layer is Layer.DISEASE:
                    graph.add_node(t.object, (t.demographic,))
        graph.ingested.add(key)
    return consistency, decisions


def cmd_check(cfg: PipelineConfig, backends: Backends | None = None) -> dict:
    cfg.validate()
    backends = backends or make_backends(cfg)
    items = _read_jsonl(cfg.work_dir / "metapaths.jsonl")
    graph = ttg.deserialize(cfg.graph_path) if cfg.graph_path.is_file() else ttg.TtgGraph()
    index, docs = evidence_corpus(load_corpus(cfg.corpus), backends.embedder)
    rdeps = ResolutionDeps(backends.embedder, cfg.evaluator, index, docs, backends.search, None)
    before = ttg.dumps(graph)
    consistency, decisions = check_items(graph, items, rdeps)
    graph.check_invariants()
    ttg.serialize(graph, cfg.graph_path)
    ttg.atomic_write(cfg.work_dir / "consistency_log.jsonl", _jsonl(consistency))
    ttg.atomic_write(cfg.work_dir / "decision_log.jsonl", dumps_decisions(decisions))
    counts = {v.value: sum(1 for r in consistency if r["verdict"] == v.value) for v in Verdict}
    return {"edges_checked": len(consistency), **counts, "decisions": len(decisions),
            "changed": ttg.dumps(graph) != before}


# -- export ---------------------------------------------------------------------


def cmd_export(cfg: PipelineConfig, what=EXPORTS) -> list[Path]:
    graph = ttg.deserialize(cfg.graph_path) if cfg.graph_path.is_file() else ttg.TtgGraph()
    out = cfg.work_dir / "exports"
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name in what:
        if name == "summary":
            p = out / "summary.json"
            ttg.atomic_write(p, json.dumps(ttg.stats(graph).to_json(), indent=1, sort_keys=True) + "\n")
            written.append(p)
        elif name == "cooccurrence":
            for a, b in cfg.cooccurrence:
                p = out / f"cooccurrence_{a}_{b}.tsv"
                ttg.atomic_write(p, ttg.cooccurrence(graph, a, b).to_tsv(f"{a}\\{b}"))
                written.append(p)
        elif name == "emerging":
            p = out / "emerging.tsv"
            ttg.atomic_write(p, ttg.emerging_tsv(graph, cfg.emerging_year))
            written.append(p)
        elif name == "graphml":
            p = out / "graph.graphml"
            tmp = out / ".graph.graphml.tmp"
            ttg.to_graphml(graph, tmp)
            tmp.replace(p)
            written.append(p)
        elif name == "cypher":
            p = out / "graph.cypher"
            ttg.atomic_write(p, ttg.to_cypher(graph))
            written.append(p)
        else:
            raise ValueError(f"unknown export {name!r}")
    return written


def cmd_stats(cfg: PipelineConfig) -> dict:
    graph = ttg.deserialize(cfg.graph_path) if cfg.graph_path.is_file() else ttg.TtgGraph()
    return ttg.stats(graph).to_json()
