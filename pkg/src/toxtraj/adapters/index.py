"""Exact in-memory cosine index."""

from __future__ import annotations

import numpy as np


class VectorIndex:
    """Immutable after construction. Linear scan; fine up to ~1e5 entries."""

    def __init__(self, entries, dim=None):
        entries = list(entries)
        ids = [cid for cid, _ in entries]
        if len(set(ids)) != len(ids):
            raise ValueError("chunk ids in an index must be unique")
        if entries:
            mat = np.vstack([np.asarray(v, dtype=np.float64) for _, v in entries])
            if dim is not None and mat.shape[1] != dim:
                raise ValueError(f"vectors have dimension {mat.shape[1]}, expected {dim}")
            dim = mat.shape[1]
        else:
            mat = np.zeros((0, dim or 0))
        self.ids = ids
        self.dim = dim
        self._mat = mat
        self._mat.setflags(write=False)
        self._norms = np.sqrt((mat * mat).sum(axis=1))

    def __len__(self):
        return len(self.ids)

    def vector(self, cid) -> np.ndarray:
        return self._mat[self.ids.index(cid)]

    def entries(self):
        return list(zip(self.ids, self._mat))


def retrieve_top_k(index: VectorIndex, query_vec, k: int) -> list[tuple[str, float]]:
    """Top-k by cosine, descending; equal scores ordered by ascending id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(index) == 0:
        return []
    q = np.asarray(query_vec, dtype=np.float64)
    if q.shape != (index.dim,):
        raise ValueError(f"query dimension {q.shape[-1]} does not match index dimension {index.dim}")
    qn = np.sqrt((q * q).sum())
    # row-wise reduction (not BLAS) so identical rows give identical scores
    scores = (index._mat * q).sum(axis=1) / (index._norms * qn)
    order = sorted(range(len(index)), key=lambda i: (-scores[i], index.ids[i]))
    return [(index.ids[i], float(scores[i])) for i in order[:k]]
