#!/usr/bin/env python3
"""Compare manual GAT + InfoNCE gradients with central finite differences on random rank graphs."""

from __future__ import annotations

import argparse
import time

import numpy as np

from toxtraj.ranker import GatParams, RankGraph, batch_loss, grad_params


def random_graph(rng, k, f, p_edge=0.5):
    adj = np.zeros((k + 1, k + 1), dtype=bool)
    adj[0, 1:] = adj[1:, 0] = True
    upper = np.triu(rng.random((k + 1, k + 1)) < p_edge, 1)
    upper[0] = False
    adj |= upper | upper.T
    return RankGraph(rng.normal(size=(k + 1, f)), adj)


def numeric_grad(params, batch, tau, eps):
    out = params.zeros_like()
    for name in GatParams.NAMES:
        arr, g = getattr(params, name), getattr(out, name)
        for idx in np.ndindex(arr.shape):
            old = arr[idx]
            arr[idx] = old + eps
            up = batch_loss(params, batch, tau)
            arr[idx] = old - eps
            down = batch_loss(params, batch, tau)
            arr[idx] = old
            g[idx] = (up - down) / (2 * eps)
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--contexts", type=int, default=4)
    ap.add_argument("--features", type=int, default=6)
    ap.add_argument("--hidden", type=int, nargs=2, default=(4, 4))
    ap.add_argument("--tau", type=float, default=0.07)
    ap.add_argument("--eps", type=float, default=1e-5)
    args = ap.parse_args()

    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(args.seeds):
        rng = np.random.default_rng(seed)
        params = GatParams.init(args.features, *args.hidden, rng)
        batch = [(random_graph(rng, args.contexts, args.features), int(rng.integers(args.contexts)))]
        analytic = grad_params(params, batch, args.tau)
        numeric = numeric_grad(params, batch, args.tau, args.eps)
        rel = 0.0
        for a, n in zip(analytic.arrays(), numeric.arrays()):
            scale = np.maximum(np.abs(a), np.abs(n))
            live = scale >= 1e-8
            if live.any():
                rel = max(rel, float(np.max(np.abs(a - n)[live] / scale[live])))
        worst = max(worst, rel)
        print(f"seed {seed:3d}  loss {batch_loss(params, batch, args.tau):.6f}  max rel err {rel:.3e}")
    print(f"worst {worst:.3e} over {args.seeds} seeds in {time.perf_counter() - t0:.2f} s")


if __name__ == "__main__":
    main()
