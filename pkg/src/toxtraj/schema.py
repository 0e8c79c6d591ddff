"""Node layers, relation types and the typed records that flow between stages."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class Layer(str, Enum):
    SOURCE = "Source"
    POLLUTANT = "Pollutant"
    MEDIUM = "Medium"
    ROUTE = "ExposureRoute"
    ORGAN = "Organ"
    DISEASE = "Disease"

    @property
    def position(self) -> int:
        return LAYER_ORDER.index(self)

    @property
    def short(self) -> str:
        return "SPMROD"[self.position]

    @property
    def placeholder_word(self) -> str:
        return _PLACEHOLDER_WORDS[self]


LAYER_ORDER = (
    Layer.SOURCE,
    Layer.POLLUTANT,
    Layer.MEDIUM,
    Layer.ROUTE,
    Layer.ORGAN,
    Layer.DISEASE,
)

_PLACEHOLDER_WORDS = {
    Layer.SOURCE: "source",
    Layer.POLLUTANT: "pollutant",
    Layer.MEDIUM: "medium",
    Layer.ROUTE: "exposure route",
    Layer.ORGAN: "organ",
    Layer.DISEASE: "disease",
}

ENTITY_TYPES = tuple(layer.value for layer in LAYER_ORDER) + ("Other",)


def layer_from_name(name: str) -> Layer:
    for layer in LAYER_ORDER:
        if name == layer.value or name == layer.short:
            return layer
    raise ValueError(f"unknown layer {name!r}")


S, P, M, R, O, D = LAYER_ORDER


class RelationType(str, Enum):
    EMITS = "emits"
    CONTAMINATES = "contaminates"
    CONSUMED_THROUGH = "consumed_through"
    AFFECTS = "affects"
    CAUSES = "causes"
    NOT_EMIT = "not_emit"
    NOT_AFFECT = "not_affect"
    NOT_CAUSE = "not_cause"

    @property
    def signatures(self) -> tuple[tuple[Layer, Layer], ...]:
        return _SIGNATURES[self]

    @property
    def chain_signature(self) -> tuple[Layer, Layer] | None:
        """The adjacent-layer signature used inside metapaths, if any."""
        sig = self.signatures[0]
        if sig[1].position == sig[0].position + 1 and self.positive:
            return sig
        return None

    @property
    def positive(self) -> bool:
        return not self.value.startswith("not_")

    @property
    def family(self) -> str:
        return _FAMILY[self]

    @property
    def negation(self) -> RelationType | None:
        return _NEGATION.get(self)

    @property
    def positive_form(self) -> RelationType:
        if self.positive:
            return self
        return _POSITIVE_OF[self]

    @property
    def cypher_type(self) -> str:
        return self.value.upper()

    @property
    def verb(self) -> str:
        return self.value.replace("_", " ")

    def accepts(self, src: Layer, dst: Layer) -> bool:
        return (src, dst) in self.signatures


_SIGNATURES = {
    RelationType.EMITS: ((S, P),),
    RelationType.CONTAMINATES: ((P, M),),
    RelationType.CONSUMED_THROUGH: ((M, R),),
    RelationType.AFFECTS: ((R, O), (P, O)),
    RelationType.CAUSES: ((O, D), (P, D)),
    RelationType.NOT_EMIT: ((S, P),),
    RelationType.NOT_AFFECT: ((P, O),),
    RelationType.NOT_CAUSE: ((P, D),),
}

_FAMILY = {
    RelationType.EMITS: "emit",
    RelationType.NOT_EMIT: "emit",
    RelationType.CONTAMINATES: "contaminate",
    RelationType.CONSUMED_THROUGH: "consume",
    RelationType.AFFECTS: "affect",
    RelationType.NOT_AFFECT: "affect",
    RelationType.CAUSES: "cause",
    RelationType.NOT_CAUSE: "cause",
}

_NEGATION = {
    RelationType.EMITS: RelationType.NOT_EMIT,
    RelationType.AFFECTS: RelationType.NOT_AFFECT,
    RelationType.CAUSES: RelationType.NOT_CAUSE,
}
_POSITIVE_OF = {neg: pos for pos, neg in _NEGATION.items()}

# relation i of a metapath connects LAYER_ORDER[i] -> LAYER_ORDER[i + 1]
CHAIN_RELATIONS = (
    RelationType.EMITS,
    RelationType.CONTAMINATES,
    RelationType.CONSUMED_THROUGH,
    RelationType.AFFECTS,
    RelationType.CAUSES,
)


def relation_from_name(name: str) -> RelationType:
    key = name.strip().lower().replace(" ", "_")
    try:
        return RelationType(key)
    except ValueError:
        raise ValueError(f"unknown relation {name!r}") from None


@dataclass(frozen=True)
class Entity:
    surface: str
    canonical: str | None = None
    etype: str = "Other"
    normalized: bool = False

    def __post_init__(self):
        if not self.surface:
            raise ValueError("entity surface must be non-empty")
        if self.etype not in ENTITY_TYPES:
            raise ValueError(f"unknown entity type {self.etype!r}")

    @property
    def name(self) -> str:
        return self.canonical if self.canonical is not None else self.surface

    @property
    def key(self) -> str:
        return self.name.casefold()


@dataclass(frozen=True)
class NodeKey:
    layer: Layer
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("node name must be non-empty")

    @property
    def is_placeholder(self) -> bool:
        return self.name.startswith("unknown ")

    def sort_key(self):
        return (self.layer.position, self.name)

    def to_json(self) -> list:
        return [self.layer.value, self.name]

    @classmethod
    def from_json(cls, obj) -> NodeKey:
        return cls(layer_from_name(obj[0]), obj[1])


def placeholder(layer: Layer, pollutant: str) -> NodeKey:
    """Per-pollutant 'unknown' node; keeps chains of different pollutants apart."""
    return NodeKey(layer, f"unknown {layer.placeholder_word} ({pollutant})")


@dataclass(frozen=True)
class Triple:
    subject: NodeKey
    relation: RelationType
    object: NodeKey
    pmid: str
    year: int
    demographic: str | None = None

    def __post_init__(self):
        if not self.relation.accepts(self.subject.layer, self.object.layer):
            raise ValueError(
                f"{self.relation.value} does not connect "
                f"{self.subject.layer.value} -> {self.object.layer.value}"
            )


@dataclass(frozen=True)
class Metapath:
    """Six nodes S..D joined by the five chain relations, with provenance."""

    nodes: tuple[NodeKey, ...]
    pmid: str
    year: int
    demographics: tuple[str, ...] = ()
    relations: tuple[RelationType, ...] = field(default=CHAIN_RELATIONS)

    def __post_init__(self):
        if len(self.nodes) != 6:
            raise ValueError("a metapath has exactly six nodes")
        for node, layer in zip(self.nodes, LAYER_ORDER):
            if node.layer is not layer:
                raise ValueError(f"node {node.name!r} is not in layer {layer.value}")
        if tuple(self.relations) != CHAIN_RELATIONS:
            raise ValueError("metapath relations must follow the S->P->M->R->O->D chain")

    @property
    def edges(self) -> list[tuple[NodeKey, RelationType, NodeKey]]:
        return [
            (self.nodes[i], self.relations[i], self.nodes[i + 1])
            for i in range(len(self.relations))
        ]

    @property
    def signature(self) -> tuple[str, ...]:
        return tuple(n.name for n in self.nodes)

    @property
    def composite(self) -> str:
        return "∘".join(r.value for r in self.relations)

    def to_json(self) -> dict:
        return {
            "kind": "metapath",
            "pmid": self.pmid,
            "year": self.year,
            "nodes": [n.to_json() for n in self.nodes],
            "relations": [r.value for r in self.relations],
            "demographics": list(self.demographics),
        }

    @classmethod
    def from_json(cls, obj: dict) -> Metapath:
        return cls(
            nodes=tuple(NodeKey.from_json(n) for n in obj["nodes"]),
            pmid=str(obj["pmid"]),
            year=int(obj["year"]),
            demographics=tuple(obj.get("demographics", ())),
            relations=tuple(RelationType(r) for r in obj.get("relations", [r.value for r in CHAIN_RELATIONS])),
        )


def triple_to_json(t: Triple) -> dict:
    obj = {
        "kind": "relation",
        "pmid": t.pmid,
        "year": t.year,
        "src": t.subject.to_json(),
        "rel": t.relation.value,
        "dst": t.object.to_json(),
    }
    if t.demographic:
        obj["demographic"] = t.demographic
    return obj


def triple_from_json(obj: dict) -> Triple:
    return Triple(
        subject=NodeKey.from_json(obj["src"]),
        relation=RelationType(obj["rel"]),
        object=NodeKey.from_json(obj["dst"]),
        pmid=str(obj["pmid"]),
        year=int(obj["year"]),
        demographic=obj.get("demographic"),
    )
