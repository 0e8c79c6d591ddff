#!/usr/bin/env python3
"""Train the template policy on a stationary bandit where one template always recovers the missing entities."""

from __future__ import annotations

import argparse

import numpy as np

from toxtraj.refiner import RefineEpisode, ToyPolicy, policy_update, refine, reward


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--episodes", type=int, default=500)
    ap.add_argument("--templates", type=int, default=3)
    ap.add_argument("--good", type=int, default=1, help="index of the always-recovering template")
    ap.add_argument("--lr", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--every", type=int, default=50, help="print interval")
    args = ap.parse_args()

    policy = ToyPolicy([f"t{i} {{query}} {{missing}}" for i in range(args.templates)], learning_rate=args.lr)
    rng = np.random.default_rng(args.seed)
    missing = {"polyethylene terephthalate", "gut"}
    print("episode  " + "  ".join(f"p[t{i}]" for i in range(args.templates)) + "  baseline")
    for ep in range(1, args.episodes + 1):
        refined, logprob, t = refine(policy, "which organs are affected?", [], missing, rng=rng)
        r = reward(missing, missing if t == args.good else set())
        policy = policy_update(policy, RefineEpisode("which organs are affected?", refined, logprob, r,
                                                     template_id=t))
        if ep % args.every == 0 or ep == args.episodes:
            probs = "  ".join(f"{p:6.3f}" for p in policy.probs)
            print(f"{ep:7d}  {probs}  {policy.baseline:8.3f}")
    print(f"final p[t{args.good}] = {policy.probs[args.good]:.4f}")


if __name__ == "__main__":
    main()
