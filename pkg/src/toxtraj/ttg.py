"""Toxicity Trajectory Graph store.

Edges are grouped by relation family (a relation together with its
negation, e.g. causes/not_cause) between the same two nodes. Each family
keeps its full history of records; exactly one of them is active.
"""

from __future__ import annotations

import copy
import json
import os
import tempfile
import threading
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import EdgeConflictError, GraphFormatError, LayerSignatureError, UnknownEdgeError
from .schema import CHAIN_RELATIONS, LAYER_ORDER, Layer, Metapath, NodeKey, RelationType, layer_from_name

FORMAT = "toxtraj-ttg"
FORMAT_VERSION = 1


class EdgeState(str, Enum):
    ACTIVE_POSITIVE = "ActivePositive"
    ACTIVE_NEGATIVE = "ActiveNegative"
    ABSENT = "Absent"


@dataclass
class EdgeRecord:
    src: NodeKey
    rel: RelationType
    dst: NodeKey
    provenance: list = field(default_factory=list)  # sorted [(pmid, year)]
    status: str = "active"
    notes: list = field(default_factory=list)

    @property
    def polarity(self) -> str:
        return "positive" if self.rel.positive else "negative"

    @property
    def active(self) -> bool:
        return self.status == "active"

    def add_provenance(self, prov) -> bool:
        prov = (str(prov[0]), int(prov[1]))
        if prov in self.provenance:
            return False
        self.provenance.append(prov)
        self.provenance.sort()
        return True

    def to_json(self) -> dict:
        return {
            "kind": "edge",
            "src": self.src.to_json(),
            "rel": self.rel.value,
            "dst": self.dst.to_json(),
            "status": self.status,
            "provenance": [list(p) for p in self.provenance],
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class GraphSummary:
    nodes_per_layer: dict
    edge_count: int
    metapath_count: int
    pollutant_count: int
    placeholder_count: int = 0

    def to_json(self) -> dict:
        return {
            "nodes_per_layer": dict(self.nodes_per_layer),
            "edge_count": self.edge_count,
            "metapath_count": self.metapath_count,
            "pollutant_count": self.pollutant_count,
            "placeholder_count": self.placeholder_count,
        }


def family_key(src: NodeKey, rel: RelationType, dst: NodeKey):
    return (src, rel.family, dst)


def _check_signature(src, rel, dst):
    if not rel.accepts(src.layer, dst.layer):
        raise LayerSignatureError(
            f"{rel.value} cannot connect {src.layer.value} {src.name!r} -> {dst.layer.value} {dst.name!r}"
        )


def _check_record(rec):
    # a decision can negate any family member, so a negated record may carry
    # the signature of its positive form (e.g. not_cause on Organ -> Disease)
    if not rec.rel.positive and rec.rel.positive_form.accepts(rec.src.layer, rec.dst.layer):
        return
    _check_signature(rec.src, rec.rel, rec.dst)


class TtgGraph:
    """Single-writer, multi-reader property graph. Readers use ``snapshot()``."""

    def __init__(self):
        self.nodes: dict[NodeKey, set] = {}  # node -> demographic groups
        self.families: dict[tuple, list[EdgeRecord]] = {}
        self.metapaths: dict[tuple, list] = {}  # node tuple -> sorted provenance
        self.ingested: set[str] = set()
        self._lock = threading.RLock()

    # -- comparison / copying

    def _state(self):
        return (
            {k: sorted(v) for k, v in self.nodes.items()},
            {k: [r.to_json() for r in v] for k, v in self.families.items()},
            self.metapaths,
            self.ingested,
        )

    def __eq__(self, other):
        return isinstance(other, TtgGraph) and self._state() == other._state()

    def __deepcopy__(self, memo):
        new = TtgGraph()
        with self._lock:
            new.nodes = copy.deepcopy(self.nodes, memo)
            new.families = copy.deepcopy(self.families, memo)
            new.metapaths = copy.deepcopy(self.metapaths, memo)
            new.ingested = set(self.ingested)
        return new

    def snapshot(self) -> TtgGraph:
        return copy.deepcopy(self)

    # -- lookups

    def add_node(self, node: NodeKey, demographics=()):
        with self._lock:
            groups = self.nodes.setdefault(node, set())
            if demographics:
                if node.layer is not Layer.DISEASE:
                    raise LayerSignatureError("demographics attach to Disease nodes only")
                groups.update(demographics)

    def history(self, src, rel, dst) -> list[EdgeRecord]:
        return list(self.families.get(family_key(src, rel, dst), ()))

    def active_record(self, src, rel, dst) -> EdgeRecord | None:
        for rec in self.families.get(family_key(src, rel, dst), ()):
            if rec.active:
                return rec
        return None

    def active_edges(self) -> list[EdgeRecord]:
        out = []
        for key in sorted(self.families, key=_fam_sort):
            out.extend(r for r in self.families[key] if r.active)
        return out

    def all_records(self) -> list[EdgeRecord]:
        return [r for key in sorted(self.families, key=_fam_sort) for r in self.families[key]]

    def check_invariants(self) -> None:
        for key, recs in self.families.items():
            n_active = sum(r.active for r in recs)
            if n_active != 1:
                raise AssertionError(f"family {key} has {n_active} active records")
            for r in recs:
                _check_record(r)

    # -- mutation

    def _put(self, src, rel, dst, prov) -> None:
        _check_signature(src, rel, dst)
        self.add_node(src)
        self.add_node(dst)
        recs = self.families.setdefault(family_key(src, rel, dst), [])
        active = next((r for r in recs if r.active), None)
        if active is None:
            active = EdgeRecord(src, rel, dst)
            recs.append(active)
        elif active.rel is not rel:
            raise EdgeConflictError(f"{src.name} -{rel.value}-> {dst.name} contradicts active {active.rel.value}")
        if prov is not None:
            active.add_provenance(prov)

    def add_relation(self, src: NodeKey, rel: RelationType, dst: NodeKey, prov=None) -> None:
        """Insert one edge or extend its provenance. Opposite polarity raises."""
        with self._lock:
            self._put(src, rel, dst, prov)

    def upsert_metapath(self, m: Metapath) -> None:
        prov = (m.pmid, m.year)
        with self._lock:
            for src, rel, dst in m.edges:
                _check_signature(src, rel, dst)
                active = self.active_record(src, rel, dst)
                if active is not None and active.rel is not rel:
                    raise EdgeConflictError(
                        f"metapath edge {src.name} -{rel.value}-> {dst.name} contradicts active {active.rel.value}"
                    )
            for node in m.nodes:
                self.add_node(node)
            if m.demographics:
                self.add_node(m.nodes[-1], m.demographics)
            for src, rel, dst in m.edges:
                self._put(src, rel, dst, prov)
            provs = self.metapaths.setdefault(tuple(m.nodes), [])
            if prov not in provs:
                provs.append(prov)
                provs.sort()

    def apply_decision(self, decision) -> None:
        """Make the decided polarity active; a flip supersedes the old record."""
        src, rel, dst = decision.relation
        outcome = str(getattr(decision.outcome, "value", decision.outcome))
        with self._lock:
            recs = self.families.get(family_key(src, rel, dst))
            if not recs:
                raise UnknownEdgeError(f"no edge {src.name} -{rel.family}-> {dst.name} to decide on")
            if outcome == "Unresolved":
                return
            positive = rel.positive_form
            wanted = positive if outcome == "Accepted" else positive.negation
            if wanted is None:
                raise UnknownEdgeError(f"relation {positive.value} has no negated form")
            active = next(r for r in recs if r.active)
            incoming = getattr(decision, "incoming_polarity", None)
            prov = getattr(decision, "provenance", None)
            carry = prov is not None and incoming == ("positive" if wanted.positive else "negative")
            note = getattr(decision, "justification", "")
            if active.rel is wanted:
                target = active
            else:
                active.status = "superseded"
                target = EdgeRecord(src, wanted, dst)
                recs.append(target)
            if carry:
                target.add_provenance(prov)
            if note:
                target.notes.append(note)

    # -- queries

    def edge_exists(self, src, rel, dst) -> EdgeState:
        rec = self.active_record(src, rel, dst)
        if rec is None:
            return EdgeState.ABSENT
        return EdgeState.ACTIVE_POSITIVE if rec.rel.positive else EdgeState.ACTIVE_NEGATIVE

    def metapath_live(self, nodes) -> bool:
        for i, rel in enumerate(CHAIN_RELATIONS):
            rec = self.active_record(nodes[i], rel, nodes[i + 1])
            if rec is None or rec.rel is not rel:
                return False
        return True

    def live_metapaths(self) -> list[tuple]:
        return sorted((p for p in self.metapaths if self.metapath_live(p)),
                      key=lambda p: tuple(n.name for n in p))


def _fam_sort(key):
    src, fam, dst = key
    return (src.layer.position, src.name, fam, dst.layer.position, dst.name)


# -- module-level operations ---------------------------------------------------


def upsert_metapath(graph: TtgGraph, m: Metapath) -> TtgGraph:
    graph.upsert_metapath(m)
    return graph


def edge_exists(graph: TtgGraph, src, rel, dst) -> EdgeState:
    return graph.edge_exists(src, rel, dst)


def apply_decision(graph: TtgGraph, decision) -> TtgGraph:
    graph.apply_decision(decision)
    return graph


def stats(graph: TtgGraph) -> GraphSummary:
    per_layer = Counter(n.layer.value for n in graph.nodes)
    return GraphSummary(
        nodes_per_layer={layer.value: per_layer.get(layer.value, 0) for layer in LAYER_ORDER},
        edge_count=len(graph.active_edges()),
        metapath_count=len(graph.live_metapaths()),
        pollutant_count=sum(1 for n in graph.nodes if n.layer is Layer.POLLUTANT and not n.is_placeholder),
        placeholder_count=sum(1 for n in graph.nodes if n.is_placeholder),
    )


@dataclass(frozen=True)
class Cooccurrence:
    rows: list
    cols: list
    counts: list  # counts[i][j]

    def cell(self, a: str, b: str) -> int:
        if a not in self.rows or b not in self.cols:
            return 0
        return self.counts[self.rows.index(a)][self.cols.index(b)]

    def to_tsv(self, corner="") -> str:
        lines = ["\t".join([corner] + self.cols)]
        for name, row in zip(self.rows, self.counts):
            lines.append("\t".join([name] + [str(c) for c in row]))
        return "\n".join(lines) + "\n"


def cooccurrence(graph: TtgGraph, layer_a, layer_b) -> Cooccurrence:
    """Number of distinct live metapaths through each (layer_a node, layer_b node) pair.

    Rows and columns are ordered by total count, descending, then by name.
    """
    la = layer_a if isinstance(layer_a, Layer) else layer_from_name(layer_a)
    lb = layer_b if isinstance(layer_b, Layer) else layer_from_name(layer_b)
    if la is lb:
        raise ValueError("cooccurrence needs two distinct layers")
    pairs = Counter()
    for path in graph.live_metapaths():
        pairs[(path[la.position].name, path[lb.position].name)] += 1
    row_tot, col_tot = Counter(), Counter()
    for (a, b), c in pairs.items():
        row_tot[a] += c
        col_tot[b] += c
    rows = sorted(row_tot, key=lambda a: (-row_tot[a], a))
    cols = sorted(col_tot, key=lambda b: (-col_tot[b], b))
    return Cooccurrence(rows, cols, [[pairs.get((a, b), 0) for b in cols] for a in rows])


def emerging(graph: TtgGraph, year_cut: int) -> list[tuple[tuple, int]]:
    """Active edges first attested after ``year_cut``, oldest first."""
    out = []
    for rec in graph.active_edges():
        if not rec.provenance:
            continue
        first = min(y for _, y in rec.provenance)
        if first > year_cut:
            out.append(((rec.src, rec.rel, rec.dst), first))
    out.sort(key=lambda e: (e[1], e[0][0].name, e[0][1].value, e[0][2].name))
    return out


def emerging_tsv(graph: TtgGraph, year_cut: int) -> str:
    rows = ["src_layer\tsrc\trelation\tdst_layer\tdst\tfirst_year"]
    for (src, rel, dst), year in emerging(graph, year_cut):
        rows.append(f"{src.layer.value}\t{src.name}\t{rel.value}\t{dst.layer.value}\t{dst.name}\t{year}")
    return "\n".join(rows) + "\n"


# -- serialisation -------------------------------------------------------------


def dumps(graph: TtgGraph) -> str:
    g = graph.snapshot()
    lines = [{"format": FORMAT, "version": FORMAT_VERSION}]
    for node in sorted(g.nodes, key=NodeKey.sort_key):
        rec = {"kind": "node", "layer": node.layer.value, "name": node.name}
        if g.nodes[node]:
            rec["demographics"] = sorted(g.nodes[node])
        lines.append(rec)
    lines.extend(r.to_json() for r in g.all_records())
    for path in sorted(g.metapaths, key=lambda p: tuple(n.name for n in p)):
        lines.append({"kind": "metapath", "nodes": [n.to_json() for n in path],
                      "provenance": [list(p) for p in g.metapaths[path]]})
    lines.extend({"kind": "ingested", "key": k} for k in sorted(g.ingested))
    return "".join(json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n" for obj in lines)


def loads(text: str) -> TtgGraph:
    lines = text.splitlines()
    if not lines:
        raise GraphFormatError("empty graph file (missing header)")
    try:
        header = json.loads(lines[0])
    except ValueError as exc:
        raise GraphFormatError(f"corrupt header: {exc}") from None
    if not isinstance(header, dict) or header.get("format") != FORMAT:
        raise GraphFormatError("not a toxtraj graph file")
    if header.get("version") != FORMAT_VERSION:
        raise GraphFormatError(
            f"unsupported format version {header.get('version')!r} (this build reads version {FORMAT_VERSION})"
        )
    g = TtgGraph()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            kind = obj["kind"]
            if kind == "node":
                node = NodeKey(layer_from_name(obj["layer"]), obj["name"])
                g.nodes.setdefault(node, set()).update(obj.get("demographics", ()))
            elif kind == "edge":
                src, dst = NodeKey.from_json(obj["src"]), NodeKey.from_json(obj["dst"])
                rec = EdgeRecord(src, RelationType(obj["rel"]), dst,
                                 [(str(p), int(y)) for p, y in obj["provenance"]],
                                 obj["status"], list(obj.get("notes", ())))
                _check_record(rec)
                g.families.setdefault(family_key(src, rec.rel, dst), []).append(rec)
            elif kind == "metapath":
                path = tuple(NodeKey.from_json(n) for n in obj["nodes"])
                g.metapaths[path] = [(str(p), int(y)) for p, y in obj["provenance"]]
            elif kind == "ingested":
                g.ingested.add(obj["key"])
            else:
                raise ValueError(f"unknown record kind {kind!r}")
        except (ValueError, KeyError, TypeError, IndexError, LayerSignatureError) as exc:
            raise GraphFormatError(f"line {lineno}: {exc}") from None
    return g


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def serialize(graph: TtgGraph, path) -> None:
    atomic_write(path, dumps(graph))


def deserialize(path) -> TtgGraph:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise GraphFormatError(f"cannot read graph {path}: {exc}") from exc
    return loads(text)


# -- exports -------------------------------------------------------------------


def to_graphml(graph: TtgGraph, path) -> None:
    import networkx as nx

    g = graph.snapshot()
    nxg = nx.MultiDiGraph()
    for node in sorted(g.nodes, key=NodeKey.sort_key):
        nxg.add_node(f"{node.layer.value}:{node.name}", label=node.layer.value, name=node.name,
                     demographics=";".join(sorted(g.nodes[node])))
    for rec in g.active_edges():
        nxg.add_edge(f"{rec.src.layer.value}:{rec.src.name}", f"{rec.dst.layer.value}:{rec.dst.name}",
                     type=rec.rel.cypher_type, polarity=rec.polarity,
                     pmids=";".join(p for p, _ in rec.provenance),
                     first_year=min((y for _, y in rec.provenance), default=0))
    nx.write_graphml(nxg, str(path))


def _cy(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_cypher(graph: TtgGraph) -> str:
    """MERGE statements for a Neo4j-style loader (labels = layers)."""
    g = graph.snapshot()
    out = []
    for node in sorted(g.nodes, key=NodeKey.sort_key):
        props = f"name: {_cy(node.name)}"
        if g.nodes[node]:
            props += ", demographics: [" + ", ".join(_cy(d) for d in sorted(g.nodes[node])) + "]"
        out.append(f"MERGE (:{node.layer.value} {{{props}}});")
    for rec in g.active_edges():
        pmids = ", ".join(_cy(p) for p, _ in rec.provenance)
        out.append(
            f"MATCH (a:{rec.src.layer.value} {{name: {_cy(rec.src.name)}}}), "
            f"(b:{rec.dst.layer.value} {{name: {_cy(rec.dst.name)}}}) "
            f"MERGE (a)-[:{rec.rel.cypher_type} {{pmids: [{pmids}]}}]->(b);"
        )
    return "\n".join(out) + ("\n" if out else "")
