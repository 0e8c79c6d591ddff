"""Exact cosine ranking for integer vectors, in rational arithmetic.

The query norm is common to every score, so ordering by cosine equals
ordering by sign(v.q) * (v.q)^2 / |v|^2, which is rational for integer input.
"""

from fractions import Fraction


def _key(v, q):
    dot = sum(int(a) * int(b) for a, b in zip(v, q))
    sq = sum(int(a) * int(a) for a in v)
    mag = Fraction(dot * dot, sq)
    return mag if dot >= 0 else -mag


def top_k(entries, q, k):
    ranked = sorted(entries, key=lambda e: (-_key(e[1], q), e[0]))
    return [cid for cid, _ in ranked[:k]]
