"""Entity-guided query refinement with a REINFORCE-trained template policy."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .adapters.llm import llm_call
from .adapters.terms import ner
from .errors import ConfigError, NoMissingEntities, PolicyLogprobUnavailable

DEFAULT_TEMPLATES = (
    "{query} {missing}",
    "{missing}",
    "{query}",
)


@dataclass(frozen=True)
class EntitySets:
    eps_q: frozenset
    eps_ctx: frozenset
    eps_related: frozenset
    eps_miss: frozenset

    @classmethod
    def from_parts(cls, eps_q, eps_ctx, eps_related) -> EntitySets:
        eps_q, eps_ctx, eps_related = frozenset(eps_q), frozenset(eps_ctx), frozenset(eps_related)
        return cls(eps_q, eps_ctx, eps_related, (eps_q | eps_related) - eps_ctx)

    def consistent(self) -> bool:
        return self.eps_miss == (self.eps_q | self.eps_related) - self.eps_ctx


def _canonical_key(entity, table) -> str:
    if table is not None:
        hit = table.lookup(entity.name)
        if hit is not None:
            return hit[0].casefold()
    return entity.key


def missing_entities(query: str, contexts, kg, table) -> EntitySets:
    """(query entities + their KG neighbours) minus entities found in contexts."""
    q_ents = ner(query, table)
    eps_q = {e.key for e in q_ents}
    eps_ctx = set()
    for c in contexts:
        eps_ctx |= {e.key for e in ner(getattr(c, "text", c), table)}
    eps_related = set()
    if kg is not None:
        for e in q_ents:
            eps_related |= {_canonical_key(n, table) for n in kg.neighbors(e)}
    eps_related -= eps_q
    return EntitySets.from_parts(eps_q, eps_ctx, eps_related)


def reward(eps_miss, recovered) -> float:
    """Fraction of the missing entities present in the new contexts."""
    eps_miss = set(eps_miss)
    if not eps_miss:
        raise NoMissingEntities("reward is undefined when no entities are missing")
    return len(eps_miss & set(recovered)) / len(eps_miss)


def reinforce_loss(logprob: float, r: float, b: float) -> float:
    if logprob > 0:
        raise ValueError("log-probability must be <= 0")
    return -logprob * (r - b)


def _softmax(x):
    z = np.exp(x - np.max(x))
    return z / z.sum()


@dataclass(frozen=True)
class RefineEpisode:
    state: str
    action: str
    logprob: float
    reward: float
    template_id: int | None = None
    baseline: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.reward <= 1.0:
            raise ValueError("reward must be in [0, 1]")

    @property
    def state_hash(self) -> str:
        return hashlib.sha256(self.state.encode("utf-8")).hexdigest()[:16]

    def to_json(self) -> dict:
        return {
            "state_hash": self.state_hash,
            "template_id": self.template_id,
            "logprob": self.logprob,
            "reward": self.reward,
            "baseline": self.baseline,
        }


@dataclass
class ToyPolicy:
    """Softmax over query-rewrite templates; baseline is the running mean reward."""

    templates: list = field(default_factory=lambda: list(DEFAULT_TEMPLATES))
    logits: np.ndarray = None
    baseline: float = 0.0
    learning_rate: float = 0.5
    n_updates: int = 0

    def __post_init__(self):
        if not self.templates:
            raise ValueError("a policy needs at least one template")
        if self.logits is None:
            self.logits = np.zeros(len(self.templates))
        self.logits = np.asarray(self.logits, dtype=np.float64)
        if self.logits.shape != (len(self.templates),):
            raise ValueError("one logit per template")

    @property
    def probs(self) -> np.ndarray:
        return _softmax(self.logits)

    def log_prob(self, t: int) -> float:
        z = self.logits - self.logits.max()
        return float(z[t] - np.log(np.exp(z).sum()))

    def instantiate(self, t: int, query: str, missing) -> str:
        text = self.templates[t].format(query=query, missing=" ".join(sorted(missing)))
        return " ".join(text.split())

    def copy(self) -> ToyPolicy:
        return ToyPolicy(list(self.templates), self.logits.copy(), self.baseline,
                         self.learning_rate, self.n_updates)

    def to_json(self) -> dict:
        return {"templates": self.templates, "logits": self.logits.tolist(),
                "baseline": self.baseline, "learning_rate": self.learning_rate,
                "n_updates": self.n_updates}

    @classmethod
    def from_json(cls, obj) -> ToyPolicy:
        return cls(obj["templates"], np.array(obj["logits"]), obj["baseline"],
                   obj["learning_rate"], obj.get("n_updates", 0))


def load_templates(path) -> list[str]:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read templates {path}: {exc}") from exc
    templates = [ln for ln in lines if ln.strip() and not ln.startswith("#")]
    for t in templates:
        if "{query}" not in t and "{missing}" not in t:
            raise ConfigError(f"template {t!r} uses neither {{query}} nor {{missing}}")
    if not templates:
        raise ConfigError(f"{path}: no templates")
    return templates


class LlmPolicy:
    """Refinement proposed by an LLM; its weights are never updated here."""

    def __init__(self, llm):
        self.llm = llm


def build_state(query: str, contexts, eps_miss) -> str:
    ctx = "\n".join(f"[{i + 1}] {getattr(c, 'text', c)}" for i, c in enumerate(contexts))
    return (
        "Rewrite the query so that retrieval recovers the missing entities.\n"
        f"Query: {query}\n"
        f"Irrelevant contexts:\n{ctx}\n"
        f"Missing entities: {', '.join(sorted(eps_miss))}\n"
        "Refined query:"
    )


def refine(policy, query: str, contexts, eps_miss, llm=None, rng=None):
    """Return (refined query, log-probability, template id or None)."""
    if not eps_miss:
        raise NoMissingEntities("refinement needs at least one missing entity")
    if isinstance(policy, ToyPolicy):
        rng = np.random.default_rng(rng)
        t = int(rng.choice(len(policy.templates), p=policy.probs))
        return policy.instantiate(t, query, eps_miss), policy.log_prob(t), t
    backend = getattr(policy, "llm", None) or llm
    completion = llm_call(build_state(query, contexts, eps_miss), backend, role="refiner")
    refined = " ".join(completion.text.split())
    if completion.logprob is None:
        raise PolicyLogprobUnavailable(refined)
    return refined, completion.logprob, None


def policy_gradient(policy: ToyPolicy, template_id: int, r: float, b: float) -> np.ndarray:
    """d/dlogits of -log pi(t) * (r - b) for the softmax policy."""
    onehot = np.zeros_like(policy.logits)
    onehot[template_id] = 1.0
    return -(r - b) * (onehot - policy.probs)


def policy_update(policy: ToyPolicy, episode: RefineEpisode) -> ToyPolicy:
    """One REINFORCE step against the current baseline, then fold r into the baseline."""
    new = policy.copy()
    if episode.template_id is not None:
        grad = policy_gradient(policy, episode.template_id, episode.reward, policy.baseline)
        new.logits = policy.logits - policy.learning_rate * grad
    new.n_updates = policy.n_updates + 1
    new.baseline = policy.baseline + (episode.reward - policy.baseline) / new.n_updates
    return new


def dump_episodes(episodes, path) -> None:
    Path(path).write_text(
        "".join(json.dumps(ep.to_json(), sort_keys=True) + "\n" for ep in episodes),
        encoding="utf-8",
    )


def episode_rng(seed: int, *parts) -> np.random.Generator:
    """Order-independent RNG stream for one (pmid, query) refinement."""
    digest = hashlib.sha256("\x1f".join([str(seed), *map(str, parts)]).encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "little"))

