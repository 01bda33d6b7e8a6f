#!/usr/bin/env python3
"""Shrink-noise sweep: mean independence ratio vs eta.

Runs the expectation-steered solver with shrink-only noise advice
(alpha = sigma = 0) over a shared instance set for each eta on the grid and
prints one line per eta.  With --sigma > 0 the per-cone random offsets are
switched on as well, reseeded per (eta, instance).
"""

import argparse
import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from qgreedy.angles import load_default_angles  # noqa: E402
from qgreedy.engines import ExpectationCache  # noqa: E402
from qgreedy.graph import generate_regular  # noqa: E402
from qgreedy.noise import NoiseParams  # noqa: E402
from qgreedy.solver import SolverConfig, solve_quantum_greedy  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--eta-max", type=float, default=0.1)
    ap.add_argument("--eta-steps", type=int, default=11)
    ap.add_argument("--alpha", type=float, default=0.0)
    ap.add_argument("--sigma", type=float, default=0.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    schedule = load_default_angles(args.depth).schedule
    cache = ExpectationCache(schedule)
    graphs = [
        generate_regular(args.n, 3, seed=args.seed + i)
        for i in range(args.instances)
    ]
    print(f"N={args.n} depth={args.depth} instances={args.instances}")
    for k in range(args.eta_steps):
        eta = args.eta_max * k / (args.eta_steps - 1) if args.eta_steps > 1 else 0.0
        ratios = []
        for i, g in enumerate(graphs):
            cfg = SolverConfig(
                schedule=schedule,
                advice="noise",
                delta=0.0,
                noise=NoiseParams(eta, args.alpha, args.sigma,
                                  seed=1000 * k + i),
                seed=args.seed + i,
            )
            ratios.append(solve_quantum_greedy(g, cfg, cache).ratio)
        mean = float(np.mean(ratios))
        sem = float(np.std(ratios, ddof=1) / np.sqrt(len(ratios)))
        print(f"eta {eta:5.3f}  mean_r {mean:.5f}  sem {sem:.5f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
