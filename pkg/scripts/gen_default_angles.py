#!/usr/bin/env python3
"""Regenerate the angle files shipped in qgreedy/data/angles.

Optimizes depth by depth, feeding each optimum forward as the warm start for
the next, and writes one file per depth.  Deterministic; rerunning
reproduces the shipped files bit for bit.
"""

import argparse
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from qgreedy.angles import optimize_tree_angles, write_angle_file  # noqa: E402

DATA_DIR = pathlib.Path(__file__).resolve().parents[1] / "src/qgreedy/data/angles"
# diminishing returns past a few restarts once the padded start is available
RESTARTS = {1: 8, 2: 8, 3: 4, 4: 2}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-depth", type=int, default=4)
    ap.add_argument("--degree", type=int, default=3)
    ap.add_argument("--lambda", dest="lam", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", type=pathlib.Path, default=DATA_DIR)
    args = ap.parse_args()

    args.out_dir.mkdir(parents=True, exist_ok=True)
    prev = None
    for depth in range(1, args.max_depth + 1):
        t0 = time.time()
        opt = optimize_tree_angles(
            depth,
            args.degree,
            args.lam,
            seed=args.seed,
            restarts=RESTARTS.get(depth, 2),
            warm_start=prev,
        )
        path = args.out_dir / f"p{depth}_d{args.degree}_lam{args.lam:g}.txt"
        write_angle_file(path, opt)
        print(
            f"p={depth}: energy {opt.energy:+.12f}  "
            f"({time.time() - t0:.1f}s)  -> {path.name}",
            flush=True,
        )
        prev = opt.schedule
    return 0


if __name__ == "__main__":
    sys.exit(main())
