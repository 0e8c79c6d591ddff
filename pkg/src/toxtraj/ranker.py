"""Graph-attention context ranker.

A query node and its k retrieved contexts form a small graph; two
single-head GAT layers refine the node features and contexts are scored by
cosine similarity to the refined query node. Training uses an InfoNCE loss
against a pseudo-positive context; gradients are derived by hand.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .adapters.embedding import cosine
from .adapters.terms import ner
from .errors import DataError
from .text import word_tokens

_EPS = 1e-12


@dataclass(frozen=True)
class RankerConfig:
    temperature: float = 0.07
    relevance_threshold: float = 0.9
    top_n: int = 3
    edge_threshold: float = 0.5
    learning_rate: float = 0.05
    epochs: int = 30
    hidden1: int = 64
    hidden2: int = 32
    leaky_slope: float = 0.2

    def __post_init__(self):
        if self.temperature <= 0:
            raise ValueError("temperature must be > 0")
        if not 0 < self.relevance_threshold <= 1:
            raise ValueError("relevance_threshold must be in (0, 1]")
        if self.top_n < 1:
            raise ValueError("top_n must be >= 1")


@dataclass
class GatParams:
    W1: np.ndarray
    a1: np.ndarray
    W2: np.ndarray
    a2: np.ndarray
    leaky_slope: float = 0.2

    NAMES = ("W1", "a1", "W2", "a2")

    def __post_init__(self):
        f, h1 = self.W1.shape
        h1b, h2 = self.W2.shape
        if h1b != h1 or self.a1.shape != (2 * h1,) or self.a2.shape != (2 * h2,):
            raise ValueError("inconsistent GAT parameter shapes")

    @classmethod
    def init(cls, in_dim, hidden1=64, hidden2=32, rng=None, leaky_slope=0.2) -> GatParams:
        rng = np.random.default_rng(rng)

        def glorot(shape):
            lim = np.sqrt(6.0 / sum(shape))
            return rng.uniform(-lim, lim, size=shape)

        return cls(
            W1=glorot((in_dim, hidden1)),
            a1=glorot((2 * hidden1, 1)).ravel(),
            W2=glorot((hidden1, hidden2)),
            a2=glorot((2 * hidden2, 1)).ravel(),
            leaky_slope=leaky_slope,
        )

    def arrays(self):
        return [getattr(self, n) for n in self.NAMES]

    def copy(self) -> GatParams:
        return GatParams(*(a.copy() for a in self.arrays()), leaky_slope=self.leaky_slope)

    def zeros_like(self) -> GatParams:
        return GatParams(*(np.zeros_like(a) for a in self.arrays()), leaky_slope=self.leaky_slope)

    def step(self, grads: GatParams, lr: float) -> GatParams:
        return GatParams(*(p - lr * g for p, g in zip(self.arrays(), grads.arrays())),
                         leaky_slope=self.leaky_slope)

    def allclose(self, other: GatParams, **kw) -> bool:
        return all(np.allclose(a, b, **kw) for a, b in zip(self.arrays(), other.arrays()))

    def save(self, path) -> None:
        lines = ["# toxtraj gat-params v1", f"leaky_slope {self.leaky_slope!r}"]
        for name, arr in zip(self.NAMES, self.arrays()):
            m = np.atleast_2d(arr) if arr.ndim == 2 else arr[None, :]
            lines.append(f"{name} {' '.join(str(s) for s in arr.shape)}")
            lines.extend(" ".join(repr(float(x)) for x in row) for row in m)
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> GatParams:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        if not lines or lines[0] != "# toxtraj gat-params v1":
            raise DataError(f"{path}: not a gat-params v1 file")
        slope = float(lines[1].split()[1])
        arrays = {}
        i = 2
        while i < len(lines):
            head = lines[i].split()
            name, shape = head[0], tuple(int(s) for s in head[1:])
            nrows = shape[0] if len(shape) == 2 else 1
            rows = [[float(x) for x in lines[i + 1 + r].split()] for r in range(nrows)]
            arrays[name] = np.array(rows).reshape(shape)
            i += 1 + nrows
        return cls(**arrays, leaky_slope=slope)


# -- graph construction -------------------------------------------------------


@dataclass(frozen=True)
class NodeFeatures:
    enc: np.ndarray
    shared_token_pct: float
    entity_overlap: int

    def vector(self) -> np.ndarray:
        return np.concatenate([self.enc, [self.shared_token_pct, float(self.entity_overlap)]])


def _shared_pct(query: str, text: str) -> float:
    q = set(word_tokens(query))
    if not q:
        return 0.0
    return len(q & set(word_tokens(text))) / len(q)


def _entity_keys(text, table) -> set:
    if table is None:
        return set()
    return {e.key for e in ner(text, table)}


def encode_features(query: str, context, embedder, table=None) -> NodeFeatures:
    """Pair encoding of ``query [SEP] context`` plus the two overlap features."""
    text = getattr(context, "text", context)
    return NodeFeatures(
        enc=embedder.embed(f"{query} [SEP] {text}"),
        shared_token_pct=_shared_pct(query, text),
        entity_overlap=len(_entity_keys(query, table) & _entity_keys(text, table)),
    )


def encode_query(query: str, embedder, table=None) -> NodeFeatures:
    return NodeFeatures(
        enc=embedder.embed(f"{query} [SEP]"),
        shared_token_pct=1.0 if word_tokens(query) else 0.0,
        entity_overlap=len(_entity_keys(query, table)),
    )


@dataclass
class RankGraph:
    """Node 0 is the query; nodes 1..k are the contexts.

    ``adjacency`` is symmetric without self-loops; the GAT adds them.
    """

    features: np.ndarray
    adjacency: np.ndarray
    contexts: list = field(default_factory=list)
    query: str = ""

    @property
    def n_nodes(self) -> int:
        return self.features.shape[0]

    @property
    def edges(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(i.tolist(), j.tolist()))

    @property
    def attention_mask(self) -> np.ndarray:
        return self.adjacency | np.eye(self.n_nodes, dtype=bool)


def graph_from_features(feats: list[NodeFeatures], edge_threshold: float,
                        contexts=None, query="") -> RankGraph:
    n = len(feats)
    adj = np.zeros((n, n), dtype=bool)
    adj[0, 1:] = adj[1:, 0] = True
    for i in range(1, n):
        for j in range(i + 1, n):
            if cosine(feats[i].enc, feats[j].enc) >= edge_threshold:
                adj[i, j] = adj[j, i] = True
    return RankGraph(np.vstack([f.vector() for f in feats]), adj, list(contexts or []), query)


def build_rank_graph(query: str, contexts, embedder, table=None,
                     cfg: RankerConfig = RankerConfig()) -> RankGraph:
    if not contexts:
        raise ValueError("cannot build a rank graph without contexts")
    feats = [encode_query(query, embedder, table)]
    feats += [encode_features(query, c, embedder, table) for c in contexts]
    return graph_from_features(feats, cfg.edge_threshold, contexts, query)


# -- GAT layer ----------------------------------------------------------------


def _leaky(u, slope):
    return np.where(u > 0, u, slope * u)


def _layer_forward(mask, H, W, a, slope, activation):
    h = W.shape[1]
    Z = H @ W
    u = (Z @ a[:h])[:, None] + (Z @ a[h:])[None, :]
    e = np.where(mask, _leaky(u, slope), -np.inf)
    e = e - e.max(axis=1, keepdims=True)
    w = np.where(mask, np.exp(e), 0.0)
    alpha = w / w.sum(axis=1, keepdims=True)
    pre = alpha @ Z
    if activation == "elu":
        out = np.where(pre > 0, pre, np.expm1(np.minimum(pre, 0)))
    else:
        out = pre
    cache = (mask, H, W, a, slope, activation, Z, u, alpha, pre)
    return out, cache


def _layer_backward(dout, cache):
    mask, H, W, a, slope, activation, Z, u, alpha, pre = cache
    h = W.shape[1]
    if activation == "elu":
        dpre = dout * np.where(pre > 0, 1.0, np.exp(np.minimum(pre, 0)))
    else:
        dpre = dout
    dalpha = dpre @ Z.T
    dZ = alpha.T @ dpre
    de = alpha * (dalpha - (alpha * dalpha).sum(axis=1, keepdims=True))
    du = de * np.where(u > 0, 1.0, slope)
    du = np.where(mask, du, 0.0)
    row, col = du.sum(axis=1), du.sum(axis=0)
    da = np.concatenate([Z.T @ row, Z.T @ col])
    dZ += np.outer(row, a[:h]) + np.outer(col, a[h:])
    return dZ @ W.T, H.T @ dZ, da


def attention(graph: RankGraph, H, W, a, slope=0.2) -> np.ndarray:
    """Attention matrix alpha (rows sum to 1 over each node's neighbourhood)."""
    return _layer_forward(graph.attention_mask, H, W, a, slope, None)[1][8]


def gat_layer(graph: RankGraph, H, W, a, slope=0.2, activation=None) -> np.ndarray:
    """One attention layer: h_i' = act(sum_j alpha_ij W h_j), j over N(i) plus i."""
    H = np.asarray(H, dtype=np.float64)
    if H.shape[0] != graph.n_nodes or H.shape[1] != W.shape[0] or a.shape != (2 * W.shape[1],):
        raise ValueError("shape mismatch between node matrix, W and a")
    return _layer_forward(graph.attention_mask, H, W, a, slope, activation)[0]


def forward(graph: RankGraph, params: GatParams):
    mask = graph.attention_mask
    H1, c1 = _layer_forward(mask, graph.features, params.W1, params.a1, params.leaky_slope, "elu")
    H2, c2 = _layer_forward(mask, H1, params.W2, params.a2, params.leaky_slope, None)
    return H2, (c1, c2)


# -- loss ---------------------------------------------------------------------


def _cosines(q, C):
    nq = max(np.linalg.norm(q), _EPS)
    nc = np.maximum(np.linalg.norm(C, axis=1), _EPS)
    return (C @ q) / (nq * nc), nq, nc


def infonce_loss(q_emb, ctx_embs, positive_index: int, temperature: float) -> float:
    """-log softmax_j(cos(q, c_j)/T)[positive]."""
    if temperature <= 0:
        raise ValueError("temperature must be > 0")
    C = np.atleast_2d(np.asarray(ctx_embs, dtype=np.float64))
    if not 0 <= positive_index < C.shape[0]:
        raise IndexError("positive_index out of range")
    sims, _, _ = _cosines(np.asarray(q_emb, dtype=np.float64), C)
    z = sims / temperature
    zmax = z.max()
    loss = zmax + np.log(np.exp(z - zmax).sum()) - z[positive_index]
    return max(float(loss), 0.0)


def _loss_grad_embeddings(H2, positive_index, temperature):
    q, C = H2[0], H2[1:]
    sims, nq, nc = _cosines(q, C)
    z = sims / temperature
    p = np.exp(z - z.max())
    p /= p.sum()
    loss = max(float(np.log(np.exp(z - z.max()).sum()) + z.max() - z[positive_index]), 0.0)
    dz = p.copy()
    dz[positive_index] -= 1.0
    dsim = dz / temperature
    dH2 = np.zeros_like(H2)
    dH2[0] = (dsim[:, None] * (C / (nq * nc[:, None]) - sims[:, None] * q[None, :] / nq ** 2)).sum(axis=0)
    dH2[1:] = dsim[:, None] * (q[None, :] / (nq * nc[:, None]) - sims[:, None] * C / nc[:, None] ** 2)
    return loss, dH2


def loss_and_grad(params: GatParams, batch, temperature: float):
    """Mean InfoNCE over ``batch`` of (RankGraph, positive context index) pairs."""
    grads = params.zeros_like()
    total = 0.0
    if not batch:
        return 0.0, grads
    for graph, pos in batch:
        H2, (c1, c2) = forward(graph, params)
        loss, dH2 = _loss_grad_embeddings(H2, pos, temperature)
        total += loss
        dH1, dW2, da2 = _layer_backward(dH2, c2)
        _, dW1, da1 = _layer_backward(dH1, c1)
        grads.W1 += dW1
        grads.a1 += da1
        grads.W2 += dW2
        grads.a2 += da2
    n = len(batch)
    for arr in grads.arrays():
        arr /= n
    return total / n, grads


def batch_loss(params: GatParams, batch, temperature: float) -> float:
    if not batch:
        return 0.0
    return sum(infonce_loss(H2[0], H2[1:], pos, temperature)
               for H2, pos in ((forward(g, params)[0], pos) for g, pos in batch)) / len(batch)


def grad_params(params: GatParams, batch, temperature: float) -> GatParams:
    return loss_and_grad(params, batch, temperature)[1]


def select_pseudo_positive(query: str, contexts, embedder) -> int:
    """Index of the context whose raw embedding is closest to the query's."""
    if not contexts:
        raise ValueError("contexts must be non-empty")
    qv = embedder.embed(query)
    best, best_sim = 0, -np.inf
    for j, c in enumerate(contexts):
        s = cosine(qv, embedder.embed(getattr(c, "text", c)))
        if s > best_sim:
            best, best_sim = j, s
    return best


def train(params: GatParams, batch, cfg: RankerConfig = RankerConfig(), epochs=None,
          metrics_path=None):
    """Full-batch gradient descent. Returns (params, [(epoch, loss), ...]).

    The loss logged for epoch e is measured before that epoch's update.
    """
    epochs = cfg.epochs if epochs is None else epochs
    history = []
    for epoch in range(epochs):
        loss, grads = loss_and_grad(params, batch, cfg.temperature)
        history.append((epoch, loss))
        params = params.step(grads, cfg.learning_rate)
    if metrics_path is not None:
        Path(metrics_path).write_text(
            "".join(json.dumps({"epoch": e, "loss": l}) + "\n" for e, l in history),
            encoding="utf-8",
        )
    return params, history


# -- inference ----------------------------------------------------------------


@dataclass(frozen=True)
class RelevantSet:
    ranked: list  # [(context index, score)], best first


@dataclass(frozen=True)
class FallbackSignal:
    scored: list  # [(context index, score)] for every context, best first


def score_contexts(graph: RankGraph, params: GatParams) -> np.ndarray:
    H2, _ = forward(graph, params)
    sims, _, _ = _cosines(H2[0], H2[1:])
    return sims


def rank_and_filter(graph: RankGraph, params: GatParams, cfg: RankerConfig = RankerConfig()):
    """Keep contexts whose refined cosine to the query clears the threshold.

    Returns the best ``top_n`` as a RelevantSet, or a FallbackSignal carrying
    every score when nothing passes.
    """
    return select(score_contexts(graph, params), cfg)


def select(scores, cfg: RankerConfig):
    """Threshold-and-top-n selection on precomputed scores."""
    order = sorted(range(len(scores)), key=lambda j: (-scores[j], j))
    ranked = [(j, float(scores[j])) for j in order]
    passing = [(j, s) for j, s in ranked if s >= cfg.relevance_threshold]
    return RelevantSet(passing[:cfg.top_n]) if passing else FallbackSignal(ranked)
