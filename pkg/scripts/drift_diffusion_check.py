#!/usr/bin/env python3
"""Moment check for the unbiased walk.

Runs a plain random-walk ensemble and prints the estimated single-tick
moments: the mean displacement should vanish, the mean squared displacement
should sit at 1.5 (four unit moves, four sqrt-2 moves, equally likely).
"""

import argparse

import numpy as np

from coocsim import build_model, estimate_drift_diffusion, run
from coocsim.io import parse_matrix, parse_rules

RULES = "interaction walk\nactions random-walk deactivate-none\nend\n"
MATRIX = "ensemble walk 0 0\n"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--agents", type=int, default=10_000)
    ap.add_argument("--side", type=int, default=101)
    ap.add_argument("--ticks", type=int, default=10)
    ap.add_argument("--seed", type=int, default=17)
    args = ap.parse_args()

    model = build_model(parse_rules(RULES), parse_matrix(MATRIX), side=args.side,
                        sizes=args.agents, seed=args.seed, max_ticks=args.ticks)
    res = run(model, report_ticks=range(args.ticks + 1),
              observers=[lambda s, m: s.positions.copy()])
    traj = np.stack([res.observations[t][0] for t in range(args.ticks + 1)])
    est = estimate_drift_diffusion(traj, model.lattice)

    print(f"samples: {est.samples}")
    print(f"mean step: ({est.mean_step[0]:+.5f}, {est.mean_step[1]:+.5f})"
          f"  se ({est.mean_step_se[0]:.5f}, {est.mean_step_se[1]:.5f})")
    print(f"mean squared step: {est.mean_square_step:.5f}  se {est.mean_square_step_se:.5f}"
          f"  (expected 1.5)")


if __name__ == "__main__":
    main()
